"""Free resolutions of the monoids ``sigma^v & M``.

The free monoid ``F`` is pinned to coordinates: a covector ``m`` goes to
``(<m, n_rho * zeta_rho>)_rho``. With all levels one this is the minimal
free resolution, i.e. ``F`` is the set of rational covectors that pair
nonnegatively and integrally with the generators ``zeta_rho``. Scaling row
``rho`` by ``n_rho`` composes with ``e_rho -> n_rho * e_rho``.

Everything happens in ``M_sigma``, the dual of the saturated span lattice,
which is the sharpening of ``sigma^v & M`` for cones that are not
full-dimensional.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .lattice import IntMatrix, IntVector
from .polyhedral import Cone, FanError, dual_cone_basis, hilbert_basis, pairing
from .stacky import StackyFan


@dataclass(frozen=True)
class FreeResolution:
    """Image of the Hilbert basis of ``sigma^v & M_sigma`` in ``N^dim sigma``.

    Column ``j`` of ``image`` is the image of ``monoid_generators[j]``; row
    ``i`` belongs to ``cone.rays[i]``.
    """

    cone: Cone
    monoid_generators: tuple[IntVector, ...]
    image: IntMatrix
    levels: tuple[int, ...]

    @property
    def rank(self) -> int:
        return self.cone.dim

    def image_columns(self) -> tuple[IntVector, ...]:
        return self.image.columns


def _resolution(cone: Cone, levels: Sequence[int]) -> FreeResolution:
    if not cone.rays:
        raise FanError("the zero cone has a trivial monoid; nothing to resolve")
    gens = hilbert_basis(dual_cone_basis(cone))
    G = cone.span_coordinates
    rows = [
        tuple(n * pairing(p, zeta) for p in gens)
        for zeta, n in zip(G.rows, levels)
    ]
    return FreeResolution(cone, gens, IntMatrix(cone.dim, len(gens), tuple(rows)), tuple(levels))


def minimal_free_resolution(cone: Cone) -> FreeResolution:
    return _resolution(cone, [1] * cone.dim)


def stacky_free_resolution(sf: StackyFan, cone: Cone) -> FreeResolution:
    if not sf.fan.has_cone(cone.names) or sf.fan.cone(cone.names) != cone:
        raise FanError(f"cone [{','.join(cone.names)}] is not in the fan")
    return _resolution(cone, [sf.level(n) for n in cone.names])


def ray_correspondence(res: FreeResolution) -> dict[int, str]:
    """Map each coordinate axis of ``F`` to the ray it corresponds to.

    For axis ``a`` we find a monoid generator whose image is a positive
    multiple of ``e_a`` and read off the unique ray it pairs positively with.
    Raises if this fails to be a bijection.
    """
    G = res.cone.span_coordinates
    out: dict[int, str] = {}
    for a in range(res.rank):
        lift = None
        for p, col in zip(res.monoid_generators, res.image.columns):
            if col[a] > 0 and all(x == 0 for i, x in enumerate(col) if i != a):
                lift = p
                break
        if lift is None:
            raise FanError(f"no multiple of axis {a} lies in the image")
        positive = [i for i, zeta in enumerate(G.rows) if pairing(lift, zeta) > 0]
        if len(positive) != 1:
            raise FanError(f"axis {a}: lift {lift} pairs positively with {len(positive)} rays")
        out[a] = res.cone.names[positive[0]]
    if sorted(out.values()) != sorted(res.cone.names):
        raise FanError("axis/ray correspondence is not a bijection")
    return out


def is_close_submonoid(generators: Sequence[Sequence[int]], ambient_rank: int) -> bool:
    """Whether the monoid generated by ``generators`` is close to ``N^ambient_rank``.

    For nonnegative vectors, ``e_i`` lies in their rational cone exactly when
    one of them is a positive multiple of ``e_i``: any other generator used
    with positive weight would leave a positive entry off axis ``i``.
    """
    for g in generators:
        if len(g) != ambient_rank:
            raise ValueError(f"generator {tuple(g)} is not in N^{ambient_rank}")
        if any(x < 0 for x in g):
            raise ValueError(f"generator {tuple(g)} has a negative coordinate")
    for i in range(ambient_rank):
        if not any(g[i] > 0 and all(x == 0 for j, x in enumerate(g) if j != i) for g in generators):
            return False
    return True


def scaling_law_holds(minimal: FreeResolution, stacky: FreeResolution) -> bool:
    """``stacky.image == diag(levels) @ minimal.image``."""
    return stacky.image == IntMatrix.diagonal(list(stacky.levels)) @ minimal.image


__all__ = [
    "FreeResolution",
    "is_close_submonoid",
    "minimal_free_resolution",
    "ray_correspondence",
    "scaling_law_holds",
    "stacky_free_resolution",
]
