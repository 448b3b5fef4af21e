import json
import random

import pytest

import oracles
from specialopen import theorems as th
from specialopen.fincat import (
    CatFunctor,
    CatValuedFunctor,
    FinCategory,
    FinPoset,
    categories_isomorphic,
    grothendieck,
)
from specialopen.homology import HomologySummary
from specialopen.manifolds import (
    EMPTY,
    ModelError,
    OpenSetRep,
    build_AkBkp,
    build_Bk,
    enumerate_balls,
    parse_model,
    stride_family,
)
from specialopen.sset import constant_sset_functor, discrete_set, point


def bundle(spec, k):
    m = parse_model(spec)
    return build_Bk(m, enumerate_balls(m), k)


def test_nerve_ak_k0():
    rep = th.verify_nerve_ak(parse_model("cycle:5"), 0, sweep=1)
    assert rep.passed and rep.left["homology"]["betti"] == [1, 0]


def test_nerve_ak_circle():
    rep = th.verify_nerve_ak(parse_model("cycle:6"), 1, 1, sweep=2)
    assert rep.passed and rep.left["text"] == rep.right["text"] == "(2, 1)"
    assert rep.stabilization["verdict"] == "stable"
    assert th.ISOTOPY_NOTE in rep.notes


def test_nerve_ak_f2_mode():
    rep = th.verify_nerve_ak(parse_model("interval:6"), 2, 1, sweep=0, coeff="f2")
    assert rep.passed and rep.left["f2"] == rep.right["f2"] == [3, 0]


def test_nerve_ak_margin():
    with pytest.raises(ModelError, match="model too small"):
        th.verify_nerve_ak(parse_model("interval:5"), 2)
    with pytest.raises(ModelError):
        th.verify_nerve_ak(parse_model("grid:3x3"), 1)


def test_thomason_over_terminal():
    h = FinPoset(["a", "b", "c"], [("a", "b"), ("c", "b")]).as_category()
    pt = FinCategory.discrete(["*"])
    rep = th.verify_thomason(pt, CatValuedFunctor(pt, {"*": h}, {0: CatFunctor.identity(h)}))
    assert rep.passed and rep.left["text"] == "(1, 0, 0)"


def test_thomason_constant_terminal():
    c = FinPoset(["a", "b", "c", "d"], [("a", "b"), ("a", "c"), ("d", "b"), ("d", "c")]).as_category()
    pt = FinCategory.discrete(["*"])
    f = CatValuedFunctor(c, {a: pt for a in c.objects}, lambda m: CatFunctor.identity(pt))
    rep = th.verify_thomason(c, f)
    # the nerve of this poset is a circle
    assert rep.passed and rep.left["text"] == "(1, 1, 0)"


def test_thomason_semidirect():
    c, f = th.semidirect_instance()
    rep = th.verify_thomason(c, f, 2)
    assert rep.passed
    # H_1 of the classifying space of S_3 is its abelianization Z/2
    assert rep.left["homology"]["torsion"][1] == [2]


def test_thomason_random_batch():
    rng = random.Random(7)
    for _ in range(10):
        c, f = th.random_poset_functor(rng)
        assert len(c.objects) <= 4 and all(len(f(a).objects) <= 4 for a in c.objects)
        assert th.verify_thomason(c, f).passed


def test_random_functor_is_not_trivial():
    rng = random.Random(1)
    nonconstant = 0
    for _ in range(20):
        c, f = th.random_poset_functor(rng)
        for m in c.morphisms:
            if not c.is_identity(m) and len(set(f.fmap(m).obj.values())) > 1:
                nonconstant += 1
    assert nonconstant > 0


def test_semidirect_report():
    rep = th.verify_semidirect()
    assert rep.passed and rep.left["abelian"] is False


def test_fiber_point_valued_and_terminal():
    c = FinPoset(["a", "b"], [("a", "b")]).as_category()
    assert th.verify_vertex_fiber(c, constant_sset_functor(c, point())).passed
    pt = FinCategory.discrete(["*"])
    assert th.verify_vertex_fiber(pt, constant_sset_functor(pt, discrete_set(3))).passed


def test_fiber_random_instances():
    rng = random.Random(2)
    for _ in range(10):
        c, f = th.random_fiber_instance(rng)
        assert th.verify_vertex_fiber(c, f).passed


def test_terminal_j_cases():
    b = bundle("interval:3", 1)
    assert th.verify_homotopy_terminal_J(b, 0).passed
    rep = th.verify_homotopy_terminal_J(b, 1)
    assert rep.passed and rep.right["initial_is_constant_last"]
    assert th.verify_homotopy_terminal_J(bundle("cycle:5", 2), 1).passed


def test_decomposition_cases():
    assert th.verify_grothendieck_decomposition(bundle("interval:3", 0), 1).passed
    assert th.verify_grothendieck_decomposition(bundle("interval:3", 1), 1).passed
    assert th.verify_grothendieck_decomposition(bundle("interval:4", 2), 2).passed
    with pytest.raises(ModelError):
        th.verify_grothendieck_decomposition(bundle("interval:3", 1), 0)


def test_decomposition_rejects_wrong_hint():
    b = bundle("interval:3", 1)
    left = build_AkBkp(b, 1)
    total, _ = grothendieck(b.A_category, th.decomposition_functor(b, 1))
    good = {s: (s[-1], s[:-1]) for s in left.objects}
    assert categories_isomorphic(left, total, good) is not None
    objs = list(left.objects)
    a = max(objs, key=lambda s: len(left.out_morphisms(s)))
    z = min(objs, key=lambda s: len(left.out_morphisms(s)))
    bad = dict(good)
    bad[a], bad[z] = good[z], good[a]
    assert categories_isomorphic(left, total, bad) is None


def test_refinement_full_family_trivial():
    m = parse_model("cycle:6")
    rep = th.verify_refinement(m, 1, 0, None, enumerate_balls(m))
    assert rep.passed and rep.left == rep.right


def test_refinement_examples():
    m = parse_model("cycle:8")
    rep = th.verify_refinement(m, 1, 0, None, stride_family(m, 2))
    assert rep.passed and rep.left["text"] == "(2, 1)"
    m6 = parse_model("interval:6")
    assert th.verify_refinement(m6, 2, 1, None, stride_family(m6, 2)).passed


def test_refinement_errors():
    m = parse_model("interval:4")
    with pytest.raises(ModelError, match="not a basis"):
        th.verify_refinement(m, 1, 0, None, [b for b in enumerate_balls(m) if len(b.points) > 1])
    other = enumerate_balls(parse_model("interval:6"))
    with pytest.raises(ModelError, match="not contained"):
        th.verify_refinement(m, 1, 0, None, other)


def test_kan_extension_constant():
    b = bundle("interval:3", 1)
    sets = {u: ("s", "t") for u in b.objects}
    lim = th.kan_extend_discrete(b, sets, lambda u, w, x: x)
    assert sorted(fam[0] for fam in lim) == ["s", "t"]
    lim0 = th.kan_extend_discrete(b, sets, lambda u, w, x: x, EMPTY)
    assert sorted(lim0) == [("s",), ("t",)]


def test_kan_extension_colorings_against_brute_force():
    for spec, k, v in (("interval:3", 1, None), ("interval:4", 2, OpenSetRep.of([0, 1, 2, 3]))):
        b = bundle(spec, k)
        sets, restrict = th.component_colorings(b)
        ours = sorted(th.kan_extend_discrete(b, sets, restrict, v))
        objs = list(b.objects)
        arrows = [(w, u, (lambda u, w: lambda x: restrict(u, w, x))(u, w))
                  for u, w in b.B.leq if u != w]
        brute = sorted(tuple(f[o] for o in objs) for f in oracles.brute_limit(objs, arrows, sets))
        assert ours == brute


def test_bary_examples():
    x = th.BarycentricPoint((0.5, 0.3, 0.2), 1)
    assert th.bary_retract(x).coords == pytest.approx((0.0, 0.6, 0.4), abs=1e-12)
    assert th.bary_homotopy(x, 0.5).coords == pytest.approx((0.25, 0.45, 0.3), abs=1e-12)
    y = th.BarycentricPoint((0.2, 0.8), 0)
    assert th.bary_retract(y).coords == pytest.approx(y.coords, abs=1e-12)
    assert th.bary_homotopy(x, 0.0).coords == pytest.approx(x.coords, abs=1e-12)


@pytest.mark.parametrize("coords,q", [((0.5, 0.6), 0), ((1.2, -0.2), 0), ((1.0,), 1), ((), 0)])
def test_bary_validation(coords, q):
    with pytest.raises(ValueError):
        th.BarycentricPoint(coords, q)


def test_bary_zero_tail():
    with pytest.raises(ValueError, match="zero tail"):
        th.bary_retract(th.BarycentricPoint((1.0, 0.0), 1))


def test_bary_batch():
    rep = th.verify_bary(3, 500)
    assert rep.passed and rep.left["idempotent"] == 500


def test_report_json_round_trip():
    rep = th.verify_semidirect()
    text = rep.to_json()
    assert json.loads(text)["wall_time_ms"] is None and json.loads(text)["v"] == 1
    back = th.CheckReport.from_json(text)
    assert back.to_json() == text
    assert json.loads(rep.to_json(timings=True))["wall_time_ms"] is not None
    with pytest.raises(ValueError):
        th.CheckReport.from_json(text.replace('"v":1', '"v":9'))


def test_compare_summaries():
    a = HomologySummary([1, 1], [(), ()])
    b = HomologySummary([1, None], [(), None], 0)
    assert th.compare_summaries(a, a, 1) == (th.PASS, 1)
    assert th.compare_summaries(a, b, 1) == (th.INCONCLUSIVE_TRUNCATION, 0)
    assert th.compare_summaries(a, HomologySummary([1, 0], [(), (2,)]), 1) == (th.FAIL, 0)
