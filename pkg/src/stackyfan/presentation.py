"""Local quotient presentations, stabilizers and the canonical smooth cover.

Finite group schemes are recorded by the isomorphism type of their
character group (invariant factors) together with the characters through
which ``Z^{sigma(1)}`` acts; over an algebraically closed field of
characteristic zero this pins down the group up to isomorphism.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .lattice import FinAbGroup, IntMatrix, IntVector, cokernel
from .polyhedral import Cone, Fan, FanError, Ray, cone_coordinates
from .stacky import (
    StackyFan,
    StackyFanMorphism,
    canonical_freenet,
    freenet_generator,
    validate_morphism,
)


@dataclass(frozen=True)
class QuotientPresentation:
    """Affine chart ``[A^d / G]`` over the cone ``sigma``.

    ``map_matrix`` has one row per ray of ``sigma`` and one column per
    basis vector of ``M_sigma``; its cokernel is the character group of
    ``G``. ``characters[i]`` is the class of ``e_i`` in that cokernel.
    """

    cone: Cone
    levels: tuple[int, ...]
    map_matrix: IntMatrix
    group: FinAbGroup
    characters: tuple[IntVector, ...]

    @property
    def chart_rank(self) -> int:
        return self.cone.dim


def _scaled_generators(sf: StackyFan, cone: Cone) -> IntMatrix:
    # Row i: n_i * zeta_i in coordinates of N_sigma.
    G = cone.span_coordinates
    levels = [sf.level(n) for n in cone.names]
    return IntMatrix(cone.dim, cone.dim, tuple(tuple(n * x for x in row) for n, row in zip(levels, G.rows)))


def _require_cone(sf: StackyFan, cone: Cone) -> None:
    if not sf.fan.has_cone(cone.names) or sf.fan.cone(cone.names) != cone:
        raise FanError(f"cone [{','.join(cone.names)}] is not in the fan")


def local_quotient_presentation(sf: StackyFan, cone: Cone) -> QuotientPresentation:
    _require_cone(sf, cone)
    k = cone.dim
    levels = tuple(sf.level(n) for n in cone.names)
    if k == 0:
        trivial = cokernel(IntMatrix.zeros(0, 0))
        return QuotientPresentation(cone, (), IntMatrix.zeros(0, 0), trivial, ())
    # Entry (rho, j) = <m_j, n_rho * zeta_rho> for the dual basis m_j of M_sigma.
    map_matrix = _scaled_generators(sf, cone)
    group = cokernel(map_matrix)
    chars = tuple(group.project([int(i == j) for j in range(k)]) for i in range(k))
    return QuotientPresentation(cone, levels, map_matrix, group, chars)


def stabilizer_group(sf: StackyFan, cone: Cone) -> FinAbGroup:
    """Stabilizer at the generic point of the orbit of ``cone``.

    Computed as ``N_sigma / sum Z * n_rho * zeta_rho``. For a ray this is
    ``Z/n_rho``; for a cone it has the same invariant factors as the group
    of :func:`local_quotient_presentation`, the defining matrices being
    transposes of each other.
    """
    _require_cone(sf, cone)
    if not cone.rays:
        return cokernel(IntMatrix.zeros(0, 0))
    return cokernel(_scaled_generators(sf, cone).transpose())


def expected_stabilizer_order(sf: StackyFan, cone: Cone) -> int:
    out = cone.multiplicity
    for n in cone.names:
        out *= sf.level(n)
    return out


def divisor_multiplicity(sf: StackyFan, ray: str | Ray) -> int:
    """Coefficient ``n_rho`` in the pullback of the divisor of ``ray`` to the stack."""
    return sf.level(ray)


def stabilizer_orders(sf: StackyFan) -> dict[str, int]:
    """Order of the generic stabilizer over each ray divisor."""
    return {r.name: stabilizer_group(sf, sf.fan.cone([r.name])).order for r in sf.fan.rays}


# --- canonical cover ---------------------------------------------------------


@dataclass(frozen=True)
class CoverData:
    """Smooth cover ``X_Delta -> X(Sigma, Sigma^0)`` built on ``Z^{Sigma(1)}``.

    Coordinate ``i`` of the cover lattice belongs to ``base ray i`` (fan
    order) and the cover ray on it is named ``cover_ray_names[i]``.
    """

    cover_fan: Fan
    eta: IntMatrix
    morphism: StackyFanMorphism
    cover_ray_names: tuple[str, ...]


def cover_ray_name(base_name: str) -> str:
    return f"e_{base_name}"


def canonical_cover(sf: StackyFan) -> CoverData:
    """Cover fan: faces of the positive orthant whose rays lie in one cone of the base.

    Because the base fan is face-closed, those faces are exactly the
    coordinate cones ``cone(e_rho : rho in tau)`` for ``tau`` in the base.
    """
    base = sf.fan
    r = len(base.rays)
    names = tuple(cover_ray_name(x.name) for x in base.rays)
    rays = [Ray(tuple(int(i == j) for j in range(r)), names[i]) for i in range(r)]
    cones = [[cover_ray_name(n) for n in c.names] for c in base.cones]
    cover_fan = Fan.from_cones(r, rays, cones)
    eta = IntMatrix.from_columns([freenet_generator(sf, x) for x in base.rays], base.lattice_rank)
    # The cover fan is smooth by construction: coordinate cones always meet in coordinate faces.
    source = canonical_freenet(cover_fan, check_fan=False)
    morphism = validate_morphism(eta, source, sf)
    return CoverData(cover_fan, eta, morphism, names)


def cover_hits_maximal_cones(sf: StackyFan, cover: CoverData) -> bool:
    """Each maximal base cone is the image of some maximal cover cone."""
    cover_max = cover.cover_fan.maximal_cones()
    for sigma in sf.fan.maximal_cones():
        hit = False
        for gamma in cover_max:
            images = [cover.eta.apply(g) for g in gamma.generators]
            if len(images) != sigma.dim:
                continue
            # The image is spanned by the P_rho, which are primitive multiples of rays.
            if all(cone_coordinates(sigma, v) is not None for v in images) and _spans_cone(sigma, images):
                hit = True
                break
        if not hit:
            return False
    return True


def _spans_cone(sigma: Cone, images) -> bool:
    # Every ray of sigma must be a positive multiple of one image vector.
    for zeta in sigma.generators:
        if not any(_positive_multiple(v, zeta) for v in images):
            return False
    return True


def _positive_multiple(v, zeta) -> bool:
    k = next((a // b for a, b in zip(v, zeta) if b), 0)
    return k > 0 and all(a == k * b for a, b in zip(v, zeta))


def orthant_faces_in_base(sf: StackyFan, eta: IntMatrix) -> list[tuple[str, ...]]:
    """Faces of the positive orthant of ``Z^{Sigma(1)}`` whose image lies in a cone of the base.

    This is the literal definition of the cover fan, evaluated by brute force
    over all ray subsets; :func:`canonical_cover` uses the equivalent
    ray-subset description.
    """
    base = sf.fan
    out = []
    for k in range(len(base.rays) + 1):
        for subset in combinations(range(len(base.rays)), k):
            images = [eta.column(i) for i in subset]
            if any(all(cone_coordinates(tau, v) is not None for v in images) for tau in base.cones):
                out.append(tuple(base.rays[i].name for i in subset))
    return out
