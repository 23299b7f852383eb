"""Exact integer linear algebra over Z.

Everything here works on plain Python ints, so entries never overflow.
Matrices are immutable :class:`IntMatrix` values; vectors are tuples of ints.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Iterable, Sequence

IntVector = tuple[int, ...]


class LatticeError(ValueError):
    """Raised for degenerate input to a lattice operation."""


@dataclass(frozen=True)
class IntMatrix:
    """A dense integer matrix stored row-major.

    ``nrows`` and ``ncols`` are kept explicitly so that empty shapes such as
    2x0 (no relations in Z^2) round-trip correctly.
    """

    nrows: int
    ncols: int
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if len(self.rows) != self.nrows or any(len(r) != self.ncols for r in self.rows):
            raise LatticeError(f"matrix entries do not match shape {self.nrows}x{self.ncols}")

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]], ncols: int | None = None) -> IntMatrix:
        rows = tuple(tuple(int(x) for x in r) for r in rows)
        if ncols is None:
            if not rows:
                raise LatticeError("column count needed for a matrix with no rows")
            ncols = len(rows[0])
        return cls(len(rows), ncols, rows)

    @classmethod
    def from_columns(cls, columns: Iterable[Sequence[int]], nrows: int) -> IntMatrix:
        cols = [tuple(int(x) for x in c) for c in columns]
        for c in cols:
            if len(c) != nrows:
                raise LatticeError(f"column {c} does not have {nrows} entries")
        return cls(nrows, len(cols), tuple(tuple(c[i] for c in cols) for i in range(nrows)))

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> IntMatrix:
        return cls(nrows, ncols, tuple((0,) * ncols for _ in range(nrows)))

    @classmethod
    def diagonal(cls, entries: Sequence[int]) -> IntMatrix:
        n = len(entries)
        return cls(n, n, tuple(tuple(entries[i] if i == j else 0 for j in range(n)) for i in range(n)))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def columns(self) -> tuple[IntVector, ...]:
        return tuple(tuple(r[j] for r in self.rows) for j in range(self.ncols))

    def column(self, j: int) -> IntVector:
        return tuple(r[j] for r in self.rows)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.rows[i][j]

    def transpose(self) -> IntMatrix:
        return IntMatrix(self.ncols, self.nrows, self.columns)

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.ncols != other.nrows:
            raise LatticeError(f"cannot multiply {self.shape} by {other.shape}")
        cols = other.columns
        return IntMatrix(
            self.nrows,
            other.ncols,
            tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in cols) for r in self.rows),
        )

    def apply(self, v: Sequence[int]) -> IntVector:
        if len(v) != self.ncols:
            raise LatticeError(f"vector of length {len(v)} does not fit a {self.shape} matrix")
        return tuple(sum(a * b for a, b in zip(r, v)) for r in self.rows)

    def is_diagonal(self) -> bool:
        return all(x == 0 for i, r in enumerate(self.rows) for j, x in enumerate(r) if i != j)

    def det(self) -> int:
        """Determinant by fraction-free Bareiss elimination."""
        if self.nrows != self.ncols:
            raise LatticeError("determinant of a non-square matrix")
        n = self.nrows
        a = [list(r) for r in self.rows]
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k] != 0:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1] if n else 1


def vector_gcd(v: Iterable[int]) -> int:
    return reduce(gcd, v, 0)


def primitive_vector(v: Sequence[int]) -> IntVector:
    """Return the first lattice point on the ray through ``v``."""
    g = vector_gcd(v)
    if g == 0:
        raise LatticeError("zero vector has no direction")
    return tuple(x // g for x in v)


def is_primitive(v: Sequence[int]) -> bool:
    return vector_gcd(v) == 1


# --- Smith normal form -------------------------------------------------------


@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ A @ V == S`` with U, V unimodular and S in Smith form.

    The inverses of U and V are carried along since cokernel and saturation
    computations need them and inverting afterwards would be wasteful.
    """

    U: IntMatrix
    S: IntMatrix
    V: IntMatrix
    U_inv: IntMatrix
    V_inv: IntMatrix

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.S[i, i] for i in range(min(self.S.shape)))

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)


def _identity_lists(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(A: IntMatrix) -> SmithDecomposition:
    m, n = A.shape
    S = [list(r) for r in A.rows]
    U, Ui = _identity_lists(m), _identity_lists(m)
    V, Vi = _identity_lists(n), _identity_lists(n)

    def swap_rows(i: int, j: int) -> None:
        S[i], S[j] = S[j], S[i]
        U[i], U[j] = U[j], U[i]
        for row in Ui:
            row[i], row[j] = row[j], row[i]

    def add_row(i: int, j: int, c: int) -> None:  # row_i += c * row_j
        S[i] = [a + c * b for a, b in zip(S[i], S[j])]
        U[i] = [a + c * b for a, b in zip(U[i], U[j])]
        for row in Ui:
            row[j] -= c * row[i]

    def negate_row(i: int) -> None:
        S[i] = [-a for a in S[i]]
        U[i] = [-a for a in U[i]]
        for row in Ui:
            row[i] = -row[i]

    def swap_cols(i: int, j: int) -> None:
        for M in (S, V):
            for row in M:
                row[i], row[j] = row[j], row[i]
        Vi[i], Vi[j] = Vi[j], Vi[i]

    def add_col(i: int, j: int, c: int) -> None:  # col_i += c * col_j
        for M in (S, V):
            for row in M:
                row[i] += c * row[j]
        Vi[j] = [a - c * b for a, b in zip(Vi[j], Vi[i])]

    for t in range(min(m, n)):
        while True:
            pivot = None
            for i in range(t, m):
                for j in range(t, n):
                    if S[i][j] and (pivot is None or abs(S[i][j]) < abs(S[pivot[0]][pivot[1]])):
                        pivot = (i, j)
            if pivot is None:
                break
            if pivot[0] != t:
                swap_rows(t, pivot[0])
            if pivot[1] != t:
                swap_cols(t, pivot[1])
            p = S[t][t]
            clean = True
            for i in range(t + 1, m):
                if S[i][t]:
                    add_row(i, t, -(S[i][t] // p))
                    clean = clean and S[i][t] == 0
            for j in range(t + 1, n):
                if S[t][j]:
                    add_col(j, t, -(S[t][j] // p))
                    clean = clean and S[t][j] == 0
            if not clean:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if S[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if S[t][t] < 0:
            negate_row(t)

    def freeze(M: list[list[int]], r: int, c: int) -> IntMatrix:
        return IntMatrix(r, c, tuple(tuple(row) for row in M))

    return SmithDecomposition(
        U=freeze(U, m, m), S=freeze(S, m, n), V=freeze(V, n, n),
        U_inv=freeze(Ui, m, m), V_inv=freeze(Vi, n, n),
    )


# --- Hermite normal form -----------------------------------------------------


def hermite_rows(rows: Sequence[Sequence[int]], ncols: int) -> tuple[IntVector, ...]:
    """Row-style Hermite normal form of the lattice spanned by ``rows``.

    Returns a basis of the row lattice in echelon form with positive pivots
    and entries above each pivot reduced into ``[0, pivot)``. Zero rows are
    dropped, so the result is the canonical basis of the row lattice.
    """
    work = [list(r) for r in rows if any(r)]
    out: list[list[int]] = []
    col = 0
    while work and col < ncols:
        nz = [r for r in work if r[col]]
        if not nz:
            col += 1
            continue
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            head = nz[0]
            for r in nz[1:]:
                q = r[col] // head[col]
                for k in range(ncols):
                    r[k] -= q * head[k]
            nz = [r for r in nz if r[col]]
        head = nz[0]
        if head[col] < 0:
            head[:] = [-x for x in head]
        work = [r for r in work if r is not head and any(r)]
        p = head[col]
        for r in out:
            q = r[col] // p
            if q:
                for k in range(ncols):
                    r[k] -= q * head[k]
        out.append(head)
        col += 1
    return tuple(tuple(r) for r in out)


# --- finite(ly generated) abelian groups ------------------------------------


@dataclass(frozen=True)
class FinAbGroup:
    """A finitely generated abelian group Z^r + Z/w_1 + ... + Z/w_t.

    ``projection`` maps ambient coordinates onto the normal form: the first
    ``free_rank`` rows give free coordinates, the remaining rows give torsion
    residues, one per invariant factor.
    """

    free_rank: int
    invariant_factors: tuple[int, ...]
    projection: IntMatrix

    @property
    def order(self) -> int | None:
        """Group order, or ``None`` when the group is infinite."""
        if self.free_rank:
            return None
        out = 1
        for w in self.invariant_factors:
            out *= w
        return out

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.invariant_factors

    @property
    def torsion_rows(self) -> tuple[tuple[int, ...], ...]:
        return self.projection.rows[self.free_rank:]

    def free_part(self, v: Sequence[int]) -> IntVector:
        return tuple(sum(a * b for a, b in zip(r, v)) for r in self.projection.rows[: self.free_rank])

    def torsion_part(self, v: Sequence[int]) -> IntVector:
        return tuple(
            sum(a * b for a, b in zip(r, v)) % w
            for r, w in zip(self.torsion_rows, self.invariant_factors)
        )

    def project(self, v: Sequence[int]) -> IntVector:
        """Image of an ambient vector, free coordinates first, residues in ``[0, w)``."""
        return self.free_part(v) + self.torsion_part(v)

    def same_type(self, other: FinAbGroup) -> bool:
        return self.free_rank == other.free_rank and self.invariant_factors == other.invariant_factors

    def describe(self) -> str:
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        parts.extend(f"Z/{w}" for w in self.invariant_factors)
        order = self.order
        text = " x ".join(parts) if parts else "trivial"
        return f"{text} (order {'infinite' if order is None else order})"


def _normalize_residue_row(row: Sequence[int], w: int) -> tuple[int, ...]:
    # Scale by a unit so the first unit entry becomes 1; an automorphism of Z/w.
    row = tuple(x % w for x in row)
    for x in row:
        if gcd(x, w) == 1:
            inv = pow(x, -1, w)
            return tuple((y * inv) % w for y in row)
    return row


def cokernel(A: IntMatrix) -> FinAbGroup:
    """The quotient of Z^rows by the span of the columns of ``A``."""
    snf = smith_normal_form(A)
    m = A.nrows
    diag = snf.diagonal
    rank = snf.rank
    U = snf.U.rows
    free = hermite_rows(U[rank:], m) if rank < m else ()
    torsion = [(d, _normalize_residue_row(U[i], d)) for i, d in enumerate(diag) if d > 1]
    rows = tuple(free) + tuple(r for _, r in torsion)
    return FinAbGroup(
        free_rank=m - rank,
        invariant_factors=tuple(d for d, _ in torsion),
        projection=IntMatrix(len(rows), m, rows),
    )


# --- saturation and indices --------------------------------------------------


def matrix_rank(vectors: Sequence[Sequence[int]], dim: int) -> int:
    if not vectors:
        return 0
    return smith_normal_form(IntMatrix.from_rows(vectors, dim)).rank


def saturate_span(vectors: Sequence[Sequence[int]], dim: int) -> tuple[IntVector, ...]:
    """Hermite basis of ``Z^dim`` intersected with the rational span of ``vectors``."""
    if not vectors:
        return ()
    snf = smith_normal_form(IntMatrix.from_rows(vectors, dim))
    # Rows of V^{-1} form a basis of Z^dim; the first `rank` span the saturation.
    return hermite_rows(snf.V_inv.rows[: snf.rank], dim)


def solve_rational(rows: Sequence[Sequence[int]], rhs: Sequence[int]) -> tuple[Fraction, ...] | None:
    """Solve ``sum_j x_j * rows[j] == rhs`` for the coefficients ``x``.

    ``rows`` are the vectors being combined. Returns ``None`` if ``rhs`` is
    not in their rational span. The solution is unique when the vectors are
    independent; otherwise free coefficients are set to zero.
    """
    k = len(rows)
    d = len(rhs)
    # Augmented system: d equations in k unknowns.
    a = [[Fraction(rows[j][i]) for j in range(k)] + [Fraction(rhs[i])] for i in range(d)]
    pivots: list[int] = []
    r = 0
    for c in range(k):
        p = next((i for i in range(r, d) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(d):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == d:
            break
    if any(a[i][k] != 0 for i in range(r, d)):
        return None
    x = [Fraction(0)] * k
    for i, c in enumerate(pivots):
        x[c] = a[i][k]
    return tuple(x)


def coordinates_in_basis(basis: Sequence[Sequence[int]], v: Sequence[int]) -> IntVector:
    """Integer coordinates of ``v`` in a lattice basis; raises if ``v`` is not in the lattice."""
    x = solve_rational(basis, v)
    if x is None or any(c.denominator != 1 for c in x):
        raise LatticeError(f"{tuple(v)} is not in the lattice spanned by {list(map(tuple, basis))}")
    return tuple(int(c) for c in x)


def lattice_index(
    vectors: Sequence[Sequence[int]],
    ambient: Sequence[Sequence[int]] | None = None,
) -> int:
    """Index of the subgroup generated by ``vectors`` in a lattice of the same rank.

    ``ambient`` is a basis of the containing lattice; by default the
    saturation of the span of ``vectors`` is used, which makes the result
    the multiplicity of a simplicial cone with those generators.
    """
    if not vectors:
        return 1
    dim = len(vectors[0])
    if matrix_rank(vectors, dim) != len(vectors):
        raise LatticeError("not a lattice of full rank in span")
    if ambient is None:
        ambient = saturate_span(vectors, dim)
    if len(ambient) != len(vectors):
        raise LatticeError("not a lattice of full rank in span")
    coords = [coordinates_in_basis(ambient, v) for v in vectors]
    return abs(IntMatrix.from_rows(coords).det())


def unimodular_inverse(A: IntMatrix) -> IntMatrix:
    """Integer inverse of a square matrix with determinant +-1."""
    if A.nrows != A.ncols or abs(A.det()) != 1:
        raise LatticeError("matrix is not unimodular")
    snf = smith_normal_form(A)
    # U A V = S = diag(1,...,1), so A^{-1} = V U.
    return snf.V @ snf.U
