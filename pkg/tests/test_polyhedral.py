import random
from itertools import product

import pytest

from corpus import angular_fan, in_cone, multiplicity, random_independent, stellar_fan
from stackyfan.lattice import IntMatrix
from stackyfan.polyhedral import (
    Cone,
    Fan,
    FanError,
    Ray,
    cone_coordinates,
    dual_cone_basis,
    fundamental_parallelepiped,
    hilbert_basis,
    intersection_is_common_face,
    make_cone,
    minimal_containing_cone,
    pairing,
    validate_fan,
)


def oracle_hilbert(generators):
    """Irreducible lattice points of the cone, found by brute force.

    Every irreducible point lies in the closed parallelepiped on the
    generators, hence in its bounding box. A point x is reducible iff some
    nonzero y != x in the cone has x - y in the cone too.
    """
    n = len(generators[0])
    lo = [sum(min(0, g[i]) for g in generators) for i in range(n)]
    hi = [sum(max(0, g[i]) for g in generators) for i in range(n)]
    pts = [
        p
        for p in product(*(range(a, b + 1) for a, b in zip(lo, hi)))
        if any(p) and in_cone(generators, p)
    ]
    out = set()
    for x in pts:
        reducible = any(
            y != x and in_cone(generators, tuple(a - b for a, b in zip(x, y))) for y in pts
        )
        if not reducible:
            out.add(x)
    return out


def hilbert_corpus(seed=11, count=60):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        rank = rng.choice([2, 2, 3, 3])
        k = rng.randint(1, rank) if rank == 3 else 2
        gens = random_independent(rng, rank, k, bound=4, max_mult=12)
        out.append(tuple(gens))
    return out


def test_hilbert_examples():
    assert set(hilbert_basis([(0, 1), (2, -1)])) == {(0, 1), (1, 0), (2, -1)}
    assert set(hilbert_basis([(1, 0), (1, 2)])) == {(1, 0), (1, 1), (1, 2)}
    assert set(hilbert_basis([(1, 0), (0, 1)])) == {(1, 0), (0, 1)}
    with pytest.raises(FanError, match="non-simplicial"):
        hilbert_basis([(1, 0), (0, 1), (1, 1)])


@pytest.mark.parametrize("gens", hilbert_corpus(), ids=str)
def test_hilbert_matches_brute_force(gens):
    hb = hilbert_basis(gens)
    assert set(hb) == oracle_hilbert(gens)
    assert len(hb) >= len(gens)
    assert (len(hb) == len(gens)) == (multiplicity(gens) == 1)


def test_fundamental_parallelepiped_size():
    rng = random.Random(5)
    for _ in range(40):
        gens = random_independent(rng, 3, rng.randint(1, 3), bound=4, max_mult=30)
        assert len(fundamental_parallelepiped(gens)) == multiplicity(gens)


def test_dual_basis_pairs_diagonally():
    rng = random.Random(2)
    for _ in range(80):
        rank = rng.randint(1, 4)
        gens = random_independent(rng, rank, rank, bound=6)
        cone = make_cone(gens)
        dual = dual_cone_basis(cone)
        P = [[pairing(m, z) for z in cone.generators] for m in dual]
        for i in range(rank):
            assert P[i][i] > 0
            assert all(P[i][j] == 0 for j in range(rank) if j != i)


def test_dual_of_example_cone():
    cone = make_cone([(1, 0), (1, 2)])
    assert dual_cone_basis(cone) == ((2, -1), (0, 1))
    assert set(hilbert_basis(dual_cone_basis(cone))) == {(0, 1), (1, 0), (2, -1)}


def test_cone_coordinates_reconstruct_point():
    rng = random.Random(4)
    for _ in range(80):
        gens = random_independent(rng, 3, rng.randint(1, 3), bound=5)
        cone = make_cone(gens)
        w = [rng.randint(0, 4) for _ in gens]
        p = tuple(sum(c * g[i] for c, g in zip(w, cone.generators)) for i in range(3))
        q = cone_coordinates(cone, p)
        assert q is not None and list(q) == w
        if any(w):
            neg = tuple(-x for x in p)
            assert cone_coordinates(cone, neg) is None


def test_span_data_of_lower_dimensional_cone():
    cone = make_cone([(1, 2)])
    assert cone.span_basis == ((1, 2),)
    assert cone.span_coordinates.rows == ((1,),)
    cone = make_cone([(2, 0, 0), (0, 1, 1)])
    assert cone.multiplicity == 1
    assert cone.span_coordinates.det() in (1, -1)


def _fan(rank, rays, cones):
    return Fan.from_cones(rank, [Ray(g, n) for n, g in rays.items()], cones)


def test_example_fan_is_valid_and_closed():
    fan = _fan(2, {"r1": (1, 0), "r2": (1, 2)}, [["r1", "r2"]])
    assert validate_fan(fan).valid
    assert [c.names for c in fan.cones] == [(), ("r1",), ("r2",), ("r1", "r2")]


def test_overlapping_cones_rejected():
    fan = _fan(2, {"a": (1, 0), "b": (0, 1), "c": (1, 1), "d": (1, 2)}, [["a", "c"], ["b", "c"], ["a", "d"]])
    report = validate_fan(fan)
    assert not report.valid


def test_interior_ray_rejected():
    # (1,1) is a ray of the fan but sits inside the cone on (1,0),(0,1).
    fan = _fan(2, {"a": (1, 0), "b": (0, 1), "c": (1, 1)}, [["a", "b"]])
    assert not validate_fan(fan).valid


def test_non_simplicial_and_non_convex_rejected():
    fan = _fan(2, {"a": (1, 0), "b": (-1, 0)}, [["a", "b"]])
    assert not validate_fan(fan).valid
    fan = _fan(3, {"a": (1, 0, 0), "b": (0, 1, 0), "c": (1, 1, 0)}, [["a", "b", "c"]])
    assert not validate_fan(fan).valid


def test_generated_fans_validate():
    rng = random.Random(9)
    for _ in range(60):
        assert validate_fan(angular_fan(rng)).valid
        assert validate_fan(stellar_fan(rng, rank=rng.choice([2, 3]))).valid


def test_relabelled_overlap_in_three_dimensions():
    # Two 3D cones crossing along a diagonal plane without sharing a face.
    fan = _fan(
        3,
        {"a": (1, 0, 0), "b": (0, 1, 0), "c": (0, 0, 1), "d": (1, 1, -1), "e": (1, 1, 1)},
        [["a", "b", "c"], ["a", "b", "d"], ["c", "d", "e"]],
    )
    assert not validate_fan(fan).valid


def test_intersection_common_face():
    a, b, c = Ray((1, 0), "a"), Ray((0, 1), "b"), Ray((-1, 0), "c")
    s = Cone((a, b), 2)
    t = Cone((b, c), 2)
    assert intersection_is_common_face(s, t)
    d = Ray((1, 1), "d")
    assert not intersection_is_common_face(Cone((a, d), 2), s)


def test_minimal_containing_cone():
    fan = _fan(2, {"r1": (1, 0), "r2": (1, 2)}, [["r1", "r2"]])
    assert minimal_containing_cone(fan, (3, 2)).names == ("r1", "r2")
    assert minimal_containing_cone(fan, (5, 0)).names == ("r1",)
    assert minimal_containing_cone(fan, (2, 4)).names == ("r2",)
    assert minimal_containing_cone(fan, (0, 0)).names == ()
    assert minimal_containing_cone(fan, (0, 1)) is None


def test_ray_requires_primitive_generator():
    with pytest.raises(FanError, match="not primitive"):
        Ray((2, 0), "x")


def test_matrix_apply_and_shapes():
    M = IntMatrix.from_rows([[1, 2], [3, 4]])
    assert M.apply((1, 1)) == (3, 7)
    assert M.transpose().rows == ((1, 3), (2, 4))
    assert M.det() == -2
