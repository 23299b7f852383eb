"""Stacky fans with a finitely generated group N and their reduction.

``N`` is carried as ``Z^n / (columns of relations)``. Its splitting into a
free part and cyclic factors comes from :func:`~stackyfan.lattice.cokernel`:
free coordinates are the Hermite-normalised free rows of the Smith
transform, torsion coordinates are its residue rows. That choice fixes the
otherwise non-canonical torsion coefficients ``b_{i,j}`` of the gerbe data.
The fan lives in the free quotient ``N/torsion`` written in those free
coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .lattice import FinAbGroup, IntMatrix, IntVector, cokernel, vector_gcd
from .polyhedral import Fan
from .stacky import StackyFan, freenet_generator, make_stacky_fan


class BcsError(ValueError):
    pass


@dataclass(frozen=True)
class BcsStackyFan:
    """``(N, Sigma, beta)``; column ``i`` of ``beta`` is ``b_i`` for ``fan.rays[i]``."""

    group_generators: int
    relations: IntMatrix
    fan: Fan
    beta: IntMatrix

    def __post_init__(self) -> None:
        n = self.group_generators
        if self.relations.nrows != n:
            raise BcsError(f"relations must have {n} rows, one per generator of N")
        if self.beta.shape != (n, len(self.fan.rays)):
            raise BcsError(
                f"beta must be {n}x{len(self.fan.rays)} (one column per ray), got {self.beta.shape}"
            )
        if self.group.free_rank != self.fan.lattice_rank:
            raise BcsError(
                f"fan lives in Z^{self.fan.lattice_rank} but N has free rank {self.group.free_rank}"
            )

    @cached_property
    def group(self) -> FinAbGroup:
        return cokernel(self.relations)

    @property
    def is_reduced(self) -> bool:
        return not self.group.invariant_factors

    def reduced_image(self, i: int) -> IntVector:
        """``b_i`` pushed to ``N/torsion``."""
        return self.group.free_part(self.beta.column(i))

    def levels(self) -> dict[str, int]:
        """Level of each ray, i.e. ``n_i`` with ``bbar_i == n_i * zeta_i``."""
        out = {}
        for i, ray in enumerate(self.fan.rays):
            b = self.reduced_image(i)
            n = vector_gcd(b)
            if n == 0 or tuple(x // n for x in b) != ray.generator:
                raise BcsError(
                    f"beta does not span the rays: image {b} of b_{i + 1} is not a positive "
                    f"multiple of ray {ray.name} {ray.generator}"
                )
            out[ray.name] = n
        return out


@dataclass(frozen=True)
class GerbeData:
    """Root orders ``w_j`` with the coefficients ``b_{i,j}`` of each ray divisor.

    ``factors[j] == (w_j, (b_{1,j}, ..., b_{r,j}))`` in fan ray order.
    """

    factors: tuple[tuple[int, tuple[int, ...]], ...]

    @property
    def is_empty(self) -> bool:
        return not self.factors


def reduce_bcs(bcs: BcsStackyFan) -> tuple[StackyFan, GerbeData]:
    framed = make_stacky_fan(bcs.fan, bcs.levels())
    g = bcs.group
    torsion = [g.torsion_part(bcs.beta.column(i)) for i in range(len(bcs.fan.rays))]
    factors = tuple(
        (w, tuple(t[j] for t in torsion)) for j, w in enumerate(g.invariant_factors)
    )
    return framed, GerbeData(factors)


def bcs_to_framed(bcs: BcsStackyFan) -> StackyFan:
    if not bcs.is_reduced:
        raise BcsError("N has torsion; use reduce_bcs to split off the gerbe data first")
    return make_stacky_fan(bcs.fan, bcs.levels())


def framed_to_bcs(sf: StackyFan) -> BcsStackyFan:
    d = sf.lattice_rank
    beta = IntMatrix.from_columns([freenet_generator(sf, r) for r in sf.fan.rays], d)
    return BcsStackyFan(d, IntMatrix.zeros(d, 0), sf.fan, beta)
