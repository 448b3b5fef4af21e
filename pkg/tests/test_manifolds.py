import pytest

import oracles
from specialopen.fincat import poset_violations, wide_subcategory
from specialopen.homology import homology, normalized_chains
from specialopen.manifolds import (
    EMPTY,
    ModelError,
    OpenSetRep,
    ak_poset_category,
    build_AkBkp,
    build_AkqBk,
    build_Bk,
    config_cells,
    config_complex,
    enumerate_balls,
    is_isotopy_equiv,
    load_family,
    parse_model,
    parse_region,
    parse_subbasis,
    restrict_to,
    stride_family,
    validate_basis,
)
from specialopen.sset import pi0


def bundle(spec, k, family=None):
    m = parse_model(spec)
    return build_Bk(m, enumerate_balls(m) if family is None else family, k)


def test_parse_model():
    assert parse_model("interval:5").n == 5
    assert parse_model("grid:2x3").size == (2, 3)
    assert parse_model("cycle:4").spec() == "cycle:4"


@pytest.mark.parametrize("spec", ["cycle:2", "torus:3", "interval:x", "grid:2", "interval:0"])
def test_parse_model_rejects(spec):
    with pytest.raises(ModelError):
        parse_model(spec)


def test_cycle_too_small_message():
    with pytest.raises(ModelError, match="model too small"):
        parse_model("cycle:2")


def test_balls_of_l3():
    balls = enumerate_balls(parse_model("interval:3"))
    sizes = sorted(len(b.points) for b in balls)
    assert sizes == [1, 1, 1, 2, 2, 3]
    assert {b.points for b in balls} == set(oracles.arcs("interval", 3))


def test_balls_of_c4_and_grids():
    assert {b.points for b in enumerate_balls(parse_model("cycle:4"))} == set(oracles.arcs("cycle", 4))
    assert len(enumerate_balls(parse_model("cycle:4"))) == 12
    assert len(enumerate_balls(parse_model("grid:1x1"))) == 1
    # choose two of 3 row cuts and two of 4 column cuts
    assert len(enumerate_balls(parse_model("grid:2x3"))) == 18


def test_validate_basis():
    m = parse_model("interval:5")
    full = enumerate_balls(m)
    assert validate_basis(m, full)
    assert validate_basis(m, [b for b in full if len(b.points) == 1])
    holes = [b for b in full if not (2 in b.points and len(b.points) <= 2)]
    assert not validate_basis(m, holes)
    g = parse_model("grid:2x2")
    assert validate_basis(g, [b for b in enumerate_balls(g) if len(b.points) == 1])


def test_stride_family_is_basis():
    for spec in ("cycle:8", "interval:6", "grid:3x3"):
        m = parse_model(spec)
        fam = stride_family(m, 2)
        assert validate_basis(m, fam) and len(fam) < len(enumerate_balls(m))


def test_isotopy_examples():
    m = parse_model("interval:3")
    assert is_isotopy_equiv(m, OpenSetRep.of([1]), OpenSetRep.of([0, 1, 2]))
    assert not is_isotopy_equiv(m, OpenSetRep.of([0, 2]), OpenSetRep.of([0, 1, 2]))
    assert is_isotopy_equiv(m, EMPTY, EMPTY)
    assert not is_isotopy_equiv(m, EMPTY, OpenSetRep.of([0]))
    with pytest.raises(ModelError):
        is_isotopy_equiv(m, OpenSetRep.of([0]), OpenSetRep.of([1]))


@pytest.mark.parametrize("spec,k,count", [("interval:3", 1, 7), ("cycle:4", 2, 15), ("interval:6", 2, None),
                                          ("cycle:6", 2, None), ("cycle:7", 3, None)])
def test_bk_objects_against_oracle(spec, k, count):
    b = bundle(spec, k)
    kind, n = spec.split(":")
    expect = {frozenset(s) for s in oracles.special_open_sets(kind, int(n), k)}
    assert {frozenset(u.points) for u in b.objects} == expect
    if count is not None:
        assert len(b.objects) == count


def test_k0_is_single_empty_set():
    for spec in ("interval:4", "cycle:5", "grid:2x2"):
        b = bundle(spec, 0)
        assert b.objects == [EMPTY]


def test_ak_relation_against_oracle():
    for spec, k in (("interval:4", 2), ("cycle:6", 2)):
        b = bundle(spec, k)
        kind, n = spec.split(":")
        for u in b.objects:
            for v in b.objects:
                inside = set(u.points) <= set(v.points)
                assert b.B.le(u, v) == inside
                assert b.A.le(u, v) == (inside and oracles.isotopy(kind, int(n), u.points, v.points))
        assert poset_violations(b.A) == []


def test_ak_is_wide_subcategory_of_bk():
    b = bundle("interval:3", 1)
    bc = b.B_category
    model = b.model
    wide = wide_subcategory(bc, lambda m: is_isotopy_equiv(model, bc.src[m], bc.dst[m]))
    assert set(wide.morphisms) and {(wide.src[m], wide.dst[m]) for m in wide.morphisms} == \
        {(u, v) for u, v in b.A.leq}


def test_restrict_to():
    b = bundle("interval:3", 1)
    assert restrict_to(b, OpenSetRep.of(range(3))).objects == b.objects
    assert restrict_to(b, EMPTY).objects == [EMPTY]
    small = restrict_to(b, OpenSetRep.of([0, 1]))
    assert sorted(u.points for u in small.objects) == [(), (0,), (0, 1), (1,)]


def test_string_category_p0_and_k0():
    b = bundle("cycle:5", 1)
    assert build_AkBkp(b, 0).objects == tuple((u,) for u in b.A.elements)
    assert build_AkBkp(b, 0).num_morphisms == b.A.num_relations()
    one = build_AkBkp(bundle("cycle:5", 0), 2)
    assert one.objects == ((EMPTY, EMPTY, EMPTY),) and one.num_morphisms == 1


def test_l3_pair_count():
    # objects are the <=-pairs of B_1
    b = bundle("interval:3", 1)
    cat = build_AkBkp(b, 1)
    assert len(cat.objects) == oracles.count_strings(b.objects, b.B.le, 1) == 22


def test_string_morphisms_componentwise():
    b = bundle("interval:4", 2)
    cat = build_AkBkp(b, 1)
    objs = list(cat.objects)
    for s in objs[:40]:
        for t in objs:
            expect = all(b.A.le(x, y) for x, y in zip(s, t))
            assert (cat.arrow(s, t) is not None) == expect
    cat2, _ = build_AkqBk(b, 1)
    for s in list(cat2.objects)[:40]:
        assert all(b.A.le(s[i], s[i + 1]) for i in range(len(s) - 1))
        for t in cat2.objects:
            assert (cat2.arrow(s, t) is not None) == all(b.B.le(x, y) for x, y in zip(s, t))


def test_akqbk_q0_and_J():
    b = bundle("interval:3", 1)
    cat, j = build_AkqBk(b, 0)
    assert len(cat.objects) == len(b.objects) and cat.num_morphisms == b.B.num_relations()
    cat1, j1 = build_AkqBk(b, 2)
    assert all(j1(u) == (u, u, u) for u in b.objects)
    one, _ = build_AkqBk(bundle("interval:3", 0), 1)
    assert len(one.objects) == 1


def test_ak_poset_category_region():
    b = bundle("interval:4", 1)
    sub = ak_poset_category(b, OpenSetRep.of([0, 1]))
    assert len(sub.objects) == 4


def test_config_complex_small_cases():
    m = parse_model("cycle:6")
    x0 = config_complex(m, 0)
    assert x0.counts()[0] == 1 and pi0(x0) == 1
    x = config_complex(parse_model("interval:5"), 1)
    assert homology(normalized_chains(x), 1).betti == [1, 0]
    with pytest.raises(ModelError, match="model too small"):
        config_cells(parse_model("cycle:5"), 2)


def test_config_c9_two_points_against_oracle():
    x = config_complex(parse_model("cycle:9"), 2)
    ours = homology(normalized_chains(x), 1)
    cells, le = oracles.config_poset("cycle", 9, 2)
    assert len(config_cells(parse_model("cycle:9"), 2)) == len(cells)
    ref = oracles.order_complex_homology(cells, le, 1, torsion=False)
    assert [(b, ()) for b in ours.betti] == ref == [(1, ()), (1, ())]


@pytest.mark.parametrize("spec,j", [("interval:7", 2), ("cycle:7", 2), ("cycle:6", 1)])
def test_config_cells_against_oracle(spec, j):
    kind, n = spec.split(":")
    cells, _ = oracles.config_poset(kind, int(n), j)
    ours = config_cells(parse_model(spec), j)
    norm = lambda c: frozenset(tuple(sorted(x)) for x in c)
    assert {norm(c) for c in ours} == {norm(c) for c in cells}


def test_parse_region():
    m = parse_model("interval:8")
    assert parse_region(m, None).points == tuple(range(8))
    assert parse_region(m, "0-3,5").points == (0, 1, 2, 3, 5)
    assert parse_region(m, "empty") == EMPTY
    with pytest.raises(ModelError):
        parse_region(m, "7-9")
    with pytest.raises(ModelError):
        parse_region(m, "a-b")


def test_subbasis_specs(tmp_path):
    m = parse_model("interval:4")
    assert len(parse_subbasis(m, None)) == len(enumerate_balls(m))
    assert parse_subbasis(m, "stride:2") == stride_family(m, 2)
    f = tmp_path / "balls.txt"
    f.write_text("0\n1\n2\n3  # singletons\n1 2\n")
    fam = load_family(m, f)
    assert len(fam) == 5 and validate_basis(m, fam)
    f.write_text("0 2\n")
    with pytest.raises(ModelError):
        load_family(m, f)
    g = parse_model("grid:2x2")
    f.write_text("0,0 0,1\n")
    assert load_family(g, f)[0].points == frozenset({0, 1})
    with pytest.raises(ModelError):
        parse_subbasis(m, "stride:x")


def test_non_basis_family_rejected():
    m = parse_model("interval:4")
    with pytest.raises(ModelError, match="not a basis"):
        build_Bk(m, [b for b in enumerate_balls(m) if len(b.points) > 1], 1)
