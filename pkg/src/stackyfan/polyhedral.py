"""Rational simplicial cones and fans.

Cones that are not full-dimensional are handled inside their saturated span
lattice ``N_sigma``. Covectors on ``N_sigma`` are written in the basis dual
to :func:`~stackyfan.lattice.saturate_span` of the cone's generators; for a
full-dimensional cone that basis is the standard one, so the coordinates
coincide with the usual coordinates of ``M``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations, product
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence

from .lattice import (
    IntMatrix,
    IntVector,
    LatticeError,
    coordinates_in_basis,
    is_primitive,
    lattice_index,
    matrix_rank,
    primitive_vector,
    saturate_span,
    smith_normal_form,
    solve_rational,
)


class FanError(ValueError):
    """Raised when rays, cones or fans are malformed."""


@dataclass(frozen=True, order=True)
class Ray:
    generator: IntVector
    name: str

    def __post_init__(self) -> None:
        if not is_primitive(self.generator):
            raise FanError(f"ray {self.name}: generator {self.generator} is not primitive")


@dataclass(frozen=True)
class Cone:
    """A simplicial cone given by its rays, in fan order.

    The zero cone has no rays; ``ambient_rank`` keeps its dimension known.
    """

    rays: tuple[Ray, ...]
    ambient_rank: int

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(r.name for r in self.rays)

    @property
    def generators(self) -> tuple[IntVector, ...]:
        return tuple(r.generator for r in self.rays)

    @property
    def dim(self) -> int:
        return len(self.rays)

    @cached_property
    def span_basis(self) -> tuple[IntVector, ...]:
        """Hermite basis of the saturated span lattice ``N_sigma``."""
        return saturate_span(self.generators, self.ambient_rank)

    @cached_property
    def span_coordinates(self) -> IntMatrix:
        """Row i holds the coordinates of ray i in :attr:`span_basis`."""
        if not self.rays:
            return IntMatrix.zeros(0, 0)
        return IntMatrix.from_rows(
            [coordinates_in_basis(self.span_basis, g) for g in self.generators], self.dim
        )

    @cached_property
    def multiplicity(self) -> int:
        return lattice_index(self.generators) if self.rays else 1

    def is_smooth(self) -> bool:
        return self.multiplicity == 1

    @cached_property
    def _solver(self):
        # Pivot coordinates with a nonzero minor, plus that minor's adjugate and determinant.
        k = self.dim
        for cols in combinations(range(self.ambient_rank), k):
            sub = IntMatrix.from_rows([[g[c] for g in self.generators] for c in cols], k)
            if sub.det():
                adj, det = _adjugate_and_det(sub)
                return cols, adj, det
        raise FanError("non-simplicial input")

    def __repr__(self) -> str:
        return f"Cone([{','.join(self.names)}])"


def make_cone(generators: Sequence[Sequence[int]], names: Sequence[str] | None = None) -> Cone:
    """Convenience constructor for a standalone cone from (not necessarily primitive) vectors."""
    gens = [primitive_vector(g) for g in generators]
    if names is None:
        names = [f"r{i + 1}" for i in range(len(gens))]
    if not gens:
        raise FanError("use Cone((), rank) for the zero cone")
    rank = len(gens[0])
    if matrix_rank(gens, rank) != len(gens):
        raise FanError("non-simplicial input")
    return Cone(tuple(sorted(Ray(g, n) for g, n in zip(gens, names))), rank)


def cone_coordinates(cone: Cone, point: Sequence[int]) -> tuple[Fraction, ...] | None:
    """Coefficients ``q`` with ``point == sum q_i * zeta_i`` and ``q >= 0``, else ``None``."""
    if not cone.rays:
        return () if not any(point) else None
    cols, adj, det = cone._solver
    xs = [point[c] for c in cols]
    num = [sum(a * b for a, b in zip(row, xs)) for row in adj]
    if any(n * det < 0 for n in num):
        return None
    gens = cone.generators
    for i in range(cone.ambient_rank):
        if det * point[i] != sum(n * g[i] for n, g in zip(num, gens)):
            return None
    return tuple(Fraction(n, det) for n in num)


def dual_cone_basis(cone: Cone) -> tuple[IntVector, ...]:
    """Primitive ray generators of the dual cone in ``M_sigma``, one per ray.

    The i-th covector pairs positively with ray i and vanishes on the others.
    """
    if not cone.rays:
        raise FanError("dual of zero cone undefined here")
    G = cone.span_coordinates
    k = cone.dim
    out = []
    for i in range(k):
        # Solve G m = e_i over Q and clear denominators.
        e = [int(j == i) for j in range(k)]
        m = solve_rational(G.transpose().rows, e)
        den = lcm(*(c.denominator for c in m))
        out.append(primitive_vector([int(c * den) for c in m]))
    return tuple(out)


def pairing(covector: Sequence[int], vector: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(covector, vector))


def _adjugate_and_det(A: IntMatrix) -> tuple[list[list[int]], int]:
    # adj(A) = det(A) * A^{-1}, computed column by column over Q.
    n = A.nrows
    det = A.det()
    cols = []
    for i in range(n):
        x = solve_rational(A.transpose().rows, [int(j == i) for j in range(n)])
        cols.append([int(c * det) for c in x])
    return [[cols[j][i] for j in range(n)] for i in range(n)], det


def _parallelepiped_data(generators: Sequence[Sequence[int]]):
    dim = len(generators[0])
    basis = saturate_span(generators, dim)
    k = len(basis)
    if k != len(generators):
        raise FanError("non-simplicial input")
    # Columns of A are the generators in basis coordinates.
    A = IntMatrix.from_columns([coordinates_in_basis(basis, g) for g in generators], k)
    adj, det = _adjugate_and_det(A)
    return basis, A, adj, det


def _parallelepiped_points(A: IntMatrix, adj, det) -> list[IntVector]:
    k = A.nrows
    snf = smith_normal_form(A)
    sgn = 1 if det > 0 else -1
    D = abs(det)
    points = []
    for y in product(*(range(d) for d in snf.diagonal)):
        x = snf.U_inv.apply(y)
        # D * A^{-1} x, reduced into [0, D): the fractional part of the cone coordinates.
        lam = [(sgn * sum(a * b for a, b in zip(row, x))) % D for row in adj]
        points.append(tuple(sum(A[i, j] * lam[j] for j in range(k)) // D for i in range(k)))
    return points


def _to_ambient(basis, coords) -> IntVector:
    return tuple(sum(c * b[t] for c, b in zip(coords, basis)) for t in range(len(basis[0])))


def fundamental_parallelepiped(generators: Sequence[Sequence[int]]) -> list[IntVector]:
    """Lattice points of the half-open parallelepiped spanned by independent ``generators``.

    Points are taken in the saturated span lattice and returned in ambient
    coordinates. There are exactly ``lattice_index(generators)`` of them,
    the origin included.
    """
    basis, A, adj, det = _parallelepiped_data(generators)
    return [_to_ambient(basis, p) for p in _parallelepiped_points(A, adj, det)]


def hilbert_basis(generators: Sequence[Sequence[int]]) -> tuple[IntVector, ...]:
    """Minimal generating set of the lattice points of a simplicial cone, sorted."""
    if not generators:
        return ()
    dim = len(generators[0])
    if matrix_rank(generators, dim) != len(generators):
        raise FanError("non-simplicial input")
    gens = [primitive_vector(g) for g in generators]
    basis, A, adj, det = _parallelepiped_data(gens)
    sgn = 1 if det > 0 else -1
    cands = set(A.columns)
    cands.update(p for p in _parallelepiped_points(A, adj, det) if any(p))
    cands = sorted(cands)
    # Scaled cone coordinates; x is in the cone iff all are >= 0.
    scaled = {x: [sgn * sum(a * b for a, b in zip(row, x)) for row in adj] for x in cands}
    # In a saturated cone, x is reducible iff x - g stays in the cone for another candidate g.
    irreducible = []
    for x in cands:
        lx = scaled[x]
        if not any(
            g != x and all(a >= b for a, b in zip(lx, scaled[g])) for g in cands
        ):
            irreducible.append(x)
    return tuple(sorted(_to_ambient(basis, x) for x in irreducible))


# --- fans --------------------------------------------------------------------


@dataclass(frozen=True)
class Fan:
    """A finite simplicial fan, stored face-closed with canonically ordered rays and cones.

    Use :meth:`from_cones` to build from maximal cones. The raw constructor is
    kept for :func:`validate_fan`, which must be able to inspect broken input.
    """

    lattice_rank: int
    rays: tuple[Ray, ...]
    cones: tuple[Cone, ...]
    _by_name: Mapping[str, Ray] = field(init=False, repr=False, compare=False)
    _cone_index: Mapping[frozenset, Cone] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_by_name", {r.name: r for r in self.rays})
        object.__setattr__(self, "_cone_index", {frozenset(c.names): c for c in self.cones})

    @classmethod
    def from_cones(
        cls,
        lattice_rank: int,
        rays: Iterable[Ray],
        cones: Iterable[Iterable[str]],
    ) -> Fan:
        """Build a fan from rays and cones given by ray names, closing under faces."""
        rays = sorted(rays)
        by_name = {}
        for r in rays:
            if len(r.generator) != lattice_rank:
                raise FanError(f"ray {r.name}: generator {r.generator} is not in Z^{lattice_rank}")
            if r.name in by_name:
                raise FanError(f"duplicate ray name {r.name}")
            by_name[r.name] = r
        order = {r.name: i for i, r in enumerate(rays)}
        faces: set[tuple[str, ...]] = {()}
        for c in cones:
            c = list(c)
            for n in c:
                if n not in by_name:
                    raise FanError(f"cone {c} refers to unknown ray {n}")
            if len(set(c)) != len(c):
                raise FanError(f"cone {c} repeats a ray")
            ordered = tuple(sorted(c, key=order.__getitem__))
            for k in range(len(ordered) + 1):
                faces.update(combinations(ordered, k))
        for r in rays:
            faces.add((r.name,))
        return cls(lattice_rank, tuple(rays), _sort_cones(faces, by_name, order, lattice_rank))

    def ray(self, name: str) -> Ray:
        try:
            return self._by_name[name]
        except KeyError:
            raise FanError(f"unknown ray {name}") from None

    def ray_index(self, name: str) -> int:
        return self.rays.index(self.ray(name))

    def cone(self, names: Iterable[str]) -> Cone:
        key = frozenset(names)
        try:
            return self._cone_index[key]
        except KeyError:
            raise FanError(f"no cone on rays {sorted(key)}") from None

    def has_cone(self, names: Iterable[str]) -> bool:
        return frozenset(names) in self._cone_index

    @property
    def zero_cone(self) -> Cone:
        return Cone((), self.lattice_rank)

    def maximal_cones(self) -> tuple[Cone, ...]:
        sets = [frozenset(c.names) for c in self.cones]
        return tuple(c for c, s in zip(self.cones, sets) if not any(s < t for t in sets))

    def faces_of(self, cone: Cone) -> tuple[Cone, ...]:
        s = frozenset(cone.names)
        return tuple(c for c in self.cones if frozenset(c.names) <= s)


def _sort_cones(faces, by_name, order, rank) -> tuple[Cone, ...]:
    cones = []
    for f in faces:
        cones.append(Cone(tuple(by_name[n] for n in sorted(f, key=order.__getitem__)), rank))
    cones.sort(key=lambda c: (c.dim, [order[n] for n in c.names]))
    return tuple(cones)


def minimal_containing_cone(fan: Fan, point: Sequence[int]) -> Cone | None:
    """The cone holding ``point`` in its relative interior, or ``None`` off the support."""
    if not any(point):
        return fan.zero_cone
    for cone in fan.cones:
        if not cone.rays:
            continue
        q = cone_coordinates(cone, point)
        if q is not None and all(c > 0 for c in q):
            return cone
    return None


# --- fan validation ----------------------------------------------------------


@dataclass(frozen=True)
class FanReport:
    problems: tuple[str, ...]

    @property
    def valid(self) -> bool:
        return not self.problems

    def __bool__(self) -> bool:
        return self.valid


def _fm_feasible(ineqs: list[tuple[list[Fraction], Fraction]], nvars: int) -> bool:
    """Decide feasibility of ``{x : c.x >= b for (c, b) in ineqs}`` by Fourier-Motzkin."""

    def normalize(c, b):
        den = lcm(*(x.denominator for x in c), b.denominator)
        ci = [int(x * den) for x in c]
        bi = int(b * den)
        g = gcd(*ci, bi)
        if g > 1:
            ci = [x // g for x in ci]
            bi //= g
        return tuple(ci), bi

    system = {normalize(c, b) for c, b in ineqs}
    for k in range(nvars):
        pos = [s for s in system if s[0][k] > 0]
        neg = [s for s in system if s[0][k] < 0]
        new = {s for s in system if s[0][k] == 0}
        for (pc, pb), (nc, nb) in product(pos, neg):
            a, b = -nc[k], pc[k]
            c = [Fraction(a * x + b * y) for x, y in zip(pc, nc)]
            new.add(normalize(c, Fraction(a * pb + b * nb)))
        system = new
    return all(b <= 0 for _, b in system)


def _eliminate_equalities(eqs: list[list[Fraction]], nvars: int):
    """Reduce ``E z = 0``; return (free var indices, expression of each var in free vars)."""
    a = [row[:] for row in eqs]
    pivots = []
    r = 0
    for c in range(nvars):
        p = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(nvars) if c not in pivots]
    expr = {}
    for c in free:
        expr[c] = [Fraction(int(c == f)) for f in free]
    for i, c in enumerate(pivots):
        expr[c] = [-a[i][f] for f in free]
    return free, expr


def intersection_is_common_face(sigma: Cone, tau: Cone) -> bool:
    """Exact check that ``sigma & tau == cone(shared rays)`` for simplicial cones.

    A point of the intersection is ``V_sigma a == V_tau b`` with ``a, b >= 0``.
    It lies in the shared face iff every ``a_i`` on a non-shared ray of sigma
    vanishes, so for each such ray we ask Fourier-Motzkin whether
    ``a_i >= 1`` is feasible (the system is homogeneous, so ``a_i > 0`` scales).
    """
    shared = set(sigma.names) & set(tau.names)
    k, l = sigma.dim, tau.dim
    nvars = k + l
    eqs = [
        [Fraction(g[t]) for g in sigma.generators] + [Fraction(-g[t]) for g in tau.generators]
        for t in range(sigma.ambient_rank)
    ]
    free, expr = _eliminate_equalities(eqs, nvars)
    base = [(expr[v], Fraction(0)) for v in range(nvars)]
    for i, name in enumerate(sigma.names):
        if name in shared:
            continue
        if _fm_feasible(base + [(expr[i], Fraction(1))], len(free)):
            return False
    return True


def validate_fan(fan: Fan) -> FanReport:
    """Check simpliciality, face closure and that cones meet in common faces.

    Only pairs of maximal cones are compared: if two maximal cones meet in a
    shared face, so do all of their faces, since faces of a simplicial cone
    are exactly its ray subsets.
    """
    problems = []
    gens = {}
    for r in fan.rays:
        if r.generator in gens:
            problems.append(f"rays {gens[r.generator]} and {r.name} share generator {r.generator}")
        gens[r.generator] = r.name
    names = {frozenset(c.names) for c in fan.cones}
    for c in fan.cones:
        if c.rays and matrix_rank(c.generators, fan.lattice_rank) != c.dim:
            problems.append(f"cone [{','.join(c.names)}] is not simplicial: generators dependent")
        for k in range(c.dim):
            for f in combinations(c.names, k):
                if frozenset(f) not in names:
                    problems.append(f"cone [{','.join(c.names)}] is missing face [{','.join(f)}]")
    for r in fan.rays:
        if frozenset([r.name]) not in names:
            problems.append(f"ray {r.name} is not a cone of the fan")
    if problems:
        return FanReport(tuple(problems))
    maximal = fan.maximal_cones()
    for s, t in combinations(maximal, 2):
        if not intersection_is_common_face(s, t):
            problems.append(
                f"cones [{','.join(s.names)}] and [{','.join(t.names)}] do not meet in a common face"
            )
    return FanReport(tuple(problems))


__all__ = [
    "Cone",
    "Fan",
    "FanError",
    "FanReport",
    "LatticeError",
    "Ray",
    "cone_coordinates",
    "dual_cone_basis",
    "fundamental_parallelepiped",
    "hilbert_basis",
    "intersection_is_common_face",
    "make_cone",
    "minimal_containing_cone",
    "pairing",
    "validate_fan",
]
