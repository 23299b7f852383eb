"""Stacky fans and their morphisms.

A free-net is stored only through its levels: on a cone with rays
``rho_1..rho_k`` it is the free monoid on ``n_i * zeta_i``. Membership is
computed from cone coordinates instead of materialising point sets.

Morphisms are checked on generators. If ``f`` sends every ray of ``sigma``
into one target cone ``tau`` and every ``P_rho`` into the target free-net, then
``f(sigma & net)`` lies in ``tau & net``: the source monoid is generated by the
``P_rho``, each image lies in the net of a face of ``tau``, and the net of
``tau`` is a monoid containing the nets of its faces.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .lattice import IntMatrix, IntVector, unimodular_inverse
from .polyhedral import Cone, Fan, FanError, Ray, cone_coordinates, minimal_containing_cone, validate_fan


class StackyFanError(ValueError):
    pass


@dataclass(frozen=True)
class StackyFan:
    """A simplicial fan together with a positive level on every ray.

    ``levels`` is aligned with ``fan.rays``. Equality is structural.
    """

    fan: Fan
    levels: tuple[int, ...]

    def level(self, ray: str | Ray) -> int:
        name = ray.name if isinstance(ray, Ray) else ray
        return self.levels[self.fan.ray_index(name)]

    def level_map(self) -> dict[str, int]:
        return {r.name: n for r, n in zip(self.fan.rays, self.levels)}

    @property
    def lattice_rank(self) -> int:
        return self.fan.lattice_rank

    @property
    def is_canonical(self) -> bool:
        return all(n == 1 for n in self.levels)


def make_stacky_fan(fan: Fan, levels: Mapping[str, int], *, check_fan: bool = True) -> StackyFan:
    if check_fan:
        report = validate_fan(fan)
        if not report.valid:
            raise FanError("; ".join(report.problems))
    out = []
    for r in fan.rays:
        if r.name not in levels:
            raise StackyFanError(f"ray {r.name} has no level")
        n = levels[r.name]
        if not isinstance(n, int) or n < 1:
            raise StackyFanError(f"ray {r.name}: level must be a positive integer, got {n}")
        out.append(n)
    extra = set(levels) - {r.name for r in fan.rays}
    if extra:
        raise StackyFanError(f"levels given for unknown rays {sorted(extra)}")
    return StackyFan(fan, tuple(out))


def canonical_freenet(fan: Fan, *, check_fan: bool = True) -> StackyFan:
    return make_stacky_fan(fan, {r.name: 1 for r in fan.rays}, check_fan=check_fan)


def freenet_generator(sf: StackyFan, ray: str | Ray) -> IntVector:
    """``P_rho = n_rho * zeta_rho``."""
    name = ray.name if isinstance(ray, Ray) else ray
    r = sf.fan.ray(name)
    n = sf.level(name)
    return tuple(n * x for x in r.generator)


@dataclass(frozen=True)
class Membership:
    """Answer of :func:`freenet_contains`.

    When contained, ``multiples`` gives the coefficient of each ``P_rho`` of
    ``cone``. Otherwise ``failing_ray`` names a ray whose coordinate is not a
    multiple of its level, or is ``None`` when the point is off the support.
    """

    contained: bool
    cone: Cone | None
    coordinates: tuple[Fraction, ...] | None = None
    multiples: tuple[int, ...] | None = None
    failing_ray: str | None = None

    def __bool__(self) -> bool:
        return self.contained


def freenet_contains(sf: StackyFan, point: Sequence[int]) -> Membership:
    cone = minimal_containing_cone(sf.fan, point)
    if cone is None:
        return Membership(False, None)
    q = cone_coordinates(cone, point)
    multiples = []
    for r, c in zip(cone.rays, q):
        n = sf.level(r.name)
        if c.denominator != 1 or c.numerator % n:
            return Membership(False, cone, q, None, r.name)
        multiples.append(c.numerator // n)
    return Membership(True, cone, q, tuple(multiples))


# --- morphisms ---------------------------------------------------------------


@dataclass(frozen=True)
class Obstruction:
    """Why a lattice map is not a morphism of stacky fans.

    ``kind`` is ``"cone"`` (no target cone contains the image of ``cone``) or
    ``"freenet"`` (the image of the generator of ``ray`` leaves the target net).
    """

    kind: str
    cone: tuple[str, ...] | None = None
    ray: str | None = None
    point: IntVector | None = None
    image: IntVector | None = None

    def describe(self) -> str:
        if self.kind == "cone":
            return f"cone [{','.join(self.cone)}] maps into no cone of the target"
        return (
            f"ray {self.ray}: generator {_fmt(self.point)} maps to {_fmt(self.image)}, "
            "not in the target free-net"
        )


def _fmt(v: Sequence[int]) -> str:
    return "(" + ",".join(str(x) for x in v) + ")"


class InvalidMorphism(StackyFanError):
    def __init__(self, obstruction: Obstruction):
        super().__init__(obstruction.describe())
        self.obstruction = obstruction


@dataclass(frozen=True)
class StackyFanMorphism:
    """A lattice map that is a morphism of stacky fans.

    Only :func:`validate_morphism`, :func:`compose` and :func:`identity`
    produce these. ``cone_map`` records, for each source cone, a target cone
    containing its image; it is a witness and does not take part in equality.
    """

    source: StackyFan
    target: StackyFan
    matrix: IntMatrix
    cone_map: Mapping[tuple[str, ...], tuple[str, ...]] = field(compare=False, repr=False)


def _image_cone(matrix: IntMatrix, cone: Cone, target: Fan) -> Cone | None:
    images = [matrix.apply(g) for g in cone.generators]
    # Cones containing the image are closed under intersection and fan cones
    # are sorted by dimension, so the first hit is the smallest one.
    for tau in target.cones:
        if all(cone_coordinates(tau, v) is not None for v in images):
            return tau
    return None


def find_obstruction(matrix: IntMatrix, src: StackyFan, tgt: StackyFan) -> tuple[Obstruction | None, dict]:
    """Return ``(None, cone_map)`` for a morphism, else ``(obstruction, partial map)``."""
    if matrix.shape != (tgt.lattice_rank, src.lattice_rank):
        raise ValueError(
            f"matrix of shape {matrix.shape} cannot map Z^{src.lattice_rank} to Z^{tgt.lattice_rank}"
        )
    cone_map = {}
    for sigma in src.fan.cones:
        tau = _image_cone(matrix, sigma, tgt.fan)
        if tau is None:
            return Obstruction("cone", cone=sigma.names), cone_map
        cone_map[sigma.names] = tau.names
    for r in src.fan.rays:
        p = freenet_generator(src, r)
        image = matrix.apply(p)
        if not freenet_contains(tgt, image):
            return Obstruction("freenet", ray=r.name, point=p, image=image), cone_map
    return None, cone_map


def validate_morphism(matrix: IntMatrix, src: StackyFan, tgt: StackyFan) -> StackyFanMorphism:
    """Accept ``matrix`` as a morphism ``src -> tgt`` or raise :class:`InvalidMorphism`."""
    obstruction, cone_map = find_obstruction(matrix, src, tgt)
    if obstruction is not None:
        raise InvalidMorphism(obstruction)
    return StackyFanMorphism(src, tgt, matrix, cone_map)


def is_morphism(matrix: IntMatrix, src: StackyFan, tgt: StackyFan) -> bool:
    return find_obstruction(matrix, src, tgt)[0] is None


def identity(sf: StackyFan) -> StackyFanMorphism:
    cone_map = {c.names: c.names for c in sf.fan.cones}
    return StackyFanMorphism(sf, sf, IntMatrix.identity(sf.lattice_rank), cone_map)


def compose(g: StackyFanMorphism, f: StackyFanMorphism) -> StackyFanMorphism:
    """``g o f``; the composite needs no revalidation."""
    if f.target != g.source:
        raise StackyFanError("cannot compose: target of f is not the source of g")
    cone_map = {s: g.cone_map[t] for s, t in f.cone_map.items()}
    return StackyFanMorphism(f.source, g.target, g.matrix @ f.matrix, cone_map)


def is_isomorphism(m: StackyFanMorphism) -> bool:
    if m.matrix.nrows != m.matrix.ncols or abs(m.matrix.det()) != 1:
        return False
    return is_morphism(unimodular_inverse(m.matrix), m.target, m.source)


def forget_to_fan(sf: StackyFan) -> Fan:
    return sf.fan


def forget_morphism(m: StackyFanMorphism) -> IntMatrix:
    return m.matrix


def reconstruct_from_stabilizers(fan: Fan, orders: Mapping[str, int]) -> StackyFan:
    """The stacky fan whose level on each ray is the stabilizer order over its divisor."""
    for r in fan.rays:
        if r.name not in orders:
            raise StackyFanError(f"no stabilizer order given for ray {r.name}")
    return make_stacky_fan(fan, orders)
