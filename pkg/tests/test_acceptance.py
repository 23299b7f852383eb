"""Acceptance criteria, one test each.

Every test records a PASS/FAIL line; ``conftest.py`` prints them at the end
of the run. ``python tests/test_acceptance.py`` prints them directly.
"""

from __future__ import annotations

import random
import sys
import time
from itertools import product
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from cli_cases import CASES, golden_path, render, run  # noqa: E402
from corpus import (  # noqa: E402
    multiplicity,
    random_independent,
    random_stacky_cone,
    random_stacky_fan,
    single_cone_fan,
    solve_q,
)
from stackyfan import docformat  # noqa: E402
from stackyfan.bcs import BcsStackyFan, bcs_to_framed, framed_to_bcs, reduce_bcs  # noqa: E402
from stackyfan.lattice import IntMatrix, cokernel  # noqa: E402
from stackyfan.polyhedral import hilbert_basis, minimal_containing_cone, validate_fan  # noqa: E402
from stackyfan.presentation import (  # noqa: E402
    canonical_cover,
    cover_hits_maximal_cones,
    local_quotient_presentation,
    stabilizer_group,
    stabilizer_orders,
)
from stackyfan.resolution import (  # noqa: E402
    is_close_submonoid,
    minimal_free_resolution,
    ray_correspondence,
    stacky_free_resolution,
)
from stackyfan.stacky import (  # noqa: E402
    canonical_freenet,
    compose,
    forget_morphism,
    freenet_contains,
    freenet_generator,
    identity,
    is_morphism,
    reconstruct_from_stabilizers,
    validate_morphism,
)
from test_lattice import residue_group_order  # noqa: E402
from test_polyhedral import oracle_hilbert  # noqa: E402
from test_stacky import morphism_corpus  # noqa: E402

DATA = Path(__file__).parent / "data"
RESULTS: dict[int, tuple[bool, str]] = {}

TITLES = {
    1: "worked example: levels, net generators, stabilizers, characters",
    2: "order law and presentation consistency on random stacky cones",
    3: "ray stabilizers and reconstruction from stabilizer orders",
    4: "minimal and stacky free resolutions",
    5: "Hilbert basis against brute-force oracle",
    6: "cokernel order against residue enumeration",
    7: "category laws, forget functor, Hom determinism",
    8: "BCS roundtrips, gerbe examples, free-net agreement",
    9: "canonical cover invariants",
    10: "CLI golden files and parse/serialize fixed point",
}


def record(n: int):
    def wrap(fn):
        def test():
            try:
                detail = fn() or ""
            except BaseException:
                RESULTS[n] = (False, "")
                raise
            RESULTS[n] = (True, detail)

        test.__name__ = fn.__name__
        test.__doc__ = fn.__doc__
        return test

    return wrap


def stacky_corpus(seed=101, count=220):
    rng = random.Random(seed)
    return [random_stacky_cone(rng, bound=6, max_level=5) for _ in range(count)]


@record(1)
def test_criterion_1_worked_example():
    start = time.perf_counter()
    sf = docformat.load(DATA / "example21.sf")
    assert sf.levels == (2, 1)
    assert [freenet_generator(sf, r) for r in sf.fan.rays] == [(2, 0), (1, 2)]
    fan = sf.fan
    assert [r.generator for r in fan.rays] == [(1, 0), (1, 2)]
    assert stabilizer_group(sf, fan.cone(["r1"])).invariant_factors == (2,)
    assert stabilizer_group(sf, fan.cone(["r2"])).is_trivial
    sigma = fan.cone(["r1", "r2"])
    assert stabilizer_group(sf, sigma).invariant_factors == (4,)
    pres = local_quotient_presentation(sf, sigma)
    assert pres.group.invariant_factors == (4,) and pres.characters == ((1,), (2,))
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    return f"{elapsed * 1000:.0f} ms"


@record(2)
def test_criterion_2_order_law():
    corpus = stacky_corpus()
    assert len(corpus) >= 200
    cones = 0
    for sf, sigma in corpus:
        for tau in sf.fan.cones:
            expected = multiplicity(tau.generators) if tau.rays else 1
            for n in tau.names:
                expected *= sf.level(n)
            assert stabilizer_group(sf, tau).order == expected
            cones += 1
        assert local_quotient_presentation(sf, sigma).group.invariant_factors == (
            stabilizer_group(sf, sigma).invariant_factors
        )
    return f"{len(corpus)} stacky cones, {cones} faces"


@record(3)
def test_criterion_3_ray_stabilizers():
    corpus = stacky_corpus()
    rays = 0
    for sf, _ in corpus:
        for r in sf.fan.rays:
            n = sf.level(r.name)
            assert stabilizer_group(sf, sf.fan.cone([r.name])).invariant_factors == (() if n == 1 else (n,))
            rays += 1
        assert reconstruct_from_stabilizers(sf.fan, stabilizer_orders(sf)) == sf
    return f"{rays} rays"


@record(4)
def test_criterion_4_resolutions():
    rng = random.Random(104)
    smooth = 0
    count = 150
    for _ in range(count):
        rank = rng.randint(1, 3)
        sf, sigma = random_stacky_cone(rng, rank=rank, k=rank, bound=4, max_mult=24)
        mini = minimal_free_resolution(sigma)
        cols = mini.image_columns()
        assert is_close_submonoid(cols, sigma.dim)
        corr = ray_correspondence(mini)
        assert corr == dict(enumerate(sigma.names))
        if multiplicity(sigma.generators) == 1:
            smooth += 1
            unit = {tuple(int(i == j) for j in range(sigma.dim)) for i in range(sigma.dim)}
            assert set(cols) == unit and len(cols) == sigma.dim
        stacky = stacky_free_resolution(sf, sigma)
        assert stacky.image == IntMatrix.diagonal([sf.level(n) for n in sigma.names]) @ mini.image
    assert smooth > 0
    return f"{count} cones, {smooth} smooth"


@record(5)
def test_criterion_5_hilbert_oracle():
    rng = random.Random(105)
    count = 50
    for _ in range(count):
        rank = rng.choice([2, 3])
        gens = random_independent(rng, rank, rng.randint(1, rank), bound=4, max_mult=12)
        assert set(hilbert_basis(gens)) == oracle_hilbert(gens)
    return f"{count} cones"


@record(6)
def test_criterion_6_cokernel_oracle():
    rng = random.Random(106)
    done = 0
    while done < 150:
        n = rng.randint(1, 3)
        A = IntMatrix.from_rows([[rng.randint(-8, 8) for _ in range(n)] for _ in range(n)])
        d = abs(A.det())
        if not 0 < d <= 60:
            continue
        assert cokernel(A).order == residue_group_order(A) == d
        done += 1
    return f"{done} matrices"


@record(7)
def test_criterion_7_category_laws():
    _, arrows = morphism_corpus()
    by_source: dict[int, list] = {}
    for a in arrows:
        by_source.setdefault(id(a.source), []).append(a)
    triples = 0
    for f in arrows:
        assert compose(identity(f.target), f) == f == compose(f, identity(f.source))
        assert validate_morphism(f.matrix, f.source, f.target) == f
        for g in by_source.get(id(f.target), []):
            gf = compose(g, f)
            assert is_morphism(gf.matrix, gf.source, gf.target)
            assert forget_morphism(gf) == forget_morphism(g) @ forget_morphism(f)
            for h in by_source.get(id(g.target), []):
                assert compose(h, gf) == compose(compose(h, g), f)
                triples += 1
    assert triples > 0
    return f"{len(arrows)} arrows, {triples} triples"


@record(8)
def test_criterion_8_bcs():
    rng = random.Random(108)
    for _ in range(50):
        sf = random_stacky_fan(rng)
        framed, gerbe = reduce_bcs(framed_to_bcs(sf))
        assert framed == sf and gerbe.is_empty
    ray = single_cone_fan([(1,)])
    z2 = BcsStackyFan(2, IntMatrix.from_columns([(0, 2)], 2), ray, IntMatrix.from_columns([(1, 1)], 2))
    assert reduce_bcs(z2)[1].factors == ((2, (1,)),)
    z3 = BcsStackyFan(2, IntMatrix.from_columns([(0, 3)], 2), ray, IntMatrix.from_columns([(2, 0)], 2))
    assert reduce_bcs(z3)[1].factors == ((3, (0,)),)
    points = 0
    for _ in range(20):
        sf = random_stacky_fan(rng, max_level=3)
        if len(sf.fan.rays) > 4:
            continue
        bcs = framed_to_bcs(sf)
        framed = bcs_to_framed(bcs)
        cols = {r.name: bcs.beta.column(i) for i, r in enumerate(bcs.fan.rays)}
        for x in product(range(-3, 4), repeat=sf.lattice_rank):
            cone = minimal_containing_cone(bcs.fan, x)
            if cone is None:
                expected = False
            elif not cone.rays:
                expected = True
            else:
                a = solve_q([cols[n] for n in cone.names], x)
                expected = a is not None and all(c >= 0 and c.denominator == 1 for c in a)
            assert expected == bool(freenet_contains(framed, x))
            points += 1
    return f"{points} sampled points"


@record(9)
def test_criterion_9_cover():
    rng = random.Random(109)
    count = 50
    for _ in range(count):
        sf = random_stacky_fan(rng)
        cover = canonical_cover(sf)
        assert validate_morphism(cover.eta, canonical_freenet(cover.cover_fan), sf) == cover.morphism
        assert all(c.is_smooth() for c in cover.cover_fan.cones)
        assert validate_fan(cover.cover_fan).valid
        assert cover_hits_maximal_cones(sf, cover)
    sf = docformat.load(DATA / "example21.sf")
    cover = canonical_cover(sf)
    assert len(cover.cover_fan.cones) == 4
    assert cover.eta.columns == ((2, 0), (1, 2))
    return f"{count} stacky fans"


@record(10)
def test_criterion_10_cli_determinism():
    for name, argv, code in CASES:
        a, b = render(*run(argv)), render(*run(argv))
        assert a == b == golden_path(name).read_text(encoding="utf-8")
        assert a.startswith(f"exit: {code}\n")
    for name in ("validate", "reconstruct", "bcs_to_framed", "framed_to_bcs"):
        argv = next(c[1] for c in CASES if c[0] == name)
        out = run(argv)[1]
        assert docformat.serialize(docformat.parse_document(out)) == out
    return f"{len(CASES)} golden files"


def summary_lines() -> list[str]:
    lines = []
    for n, title in TITLES.items():
        if n not in RESULTS:
            continue
        ok, detail = RESULTS[n]
        extra = f" ({detail})" if detail else ""
        lines.append(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {title}{extra}")
    return lines


if __name__ == "__main__":
    failed = False
    tests = [v for k, v in globals().items() if k.startswith("test_criterion_")]
    for t in tests:
        try:
            t()
        except Exception:
            failed = True
    print("\n".join(summary_lines()))
    sys.exit(1 if failed else 0)
