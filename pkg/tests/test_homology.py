import random

import pytest
from sympy import Matrix
from sympy.matrices.normalforms import invariant_factors
from sympy.polys.domains import ZZ

import oracles
from specialopen.fincat import FinCategory, FinPoset
from specialopen.homology import (
    ChainComplex,
    HomologyError,
    HomologySummary,
    IntMatrix,
    betti_f2,
    coreduce,
    dumps_matrix,
    f2_from_integral,
    homology,
    loads_matrix,
    normalized_chains,
    rank_f2,
    reduced_homology,
    smith,
)
from specialopen.sset import boundary_triangle, nerve, point, simplicial_complex
from specialopen.theorems import symmetric_group_3


def z(n):
    return FinCategory.from_group(list(range(n)), lambda a, b: (a + b) % n, 0)


def as_pairs(h: HomologySummary):
    return [(b, tuple(t)) for b, t in zip(h.betti, h.torsion)]


def test_chains_of_point():
    cc = normalized_chains(point())
    assert cc.ranks == [1] and cc.boundaries[0].shape == (0, 1)


def test_chains_of_triangle_boundary():
    cc = normalized_chains(boundary_triangle())
    assert cc.ranks == [3, 3]
    assert cc.boundaries[1].to_dense() == [[-1, -1, 0], [1, 0, -1], [0, 1, 1]]


def test_chains_of_z2_nerve():
    cc = normalized_chains(nerve(z(2), 3))
    assert cc.ranks == [1, 1, 1, 1]
    assert cc.truncated
    cc.check()


def test_insufficient_top_raises():
    with pytest.raises(HomologyError, match="insufficient"):
        normalized_chains(point(), 2)


def test_smith_examples():
    assert smith(IntMatrix.from_dense([[1, 0, 0], [0, 1, 0], [0, 0, 1]])) == (1, 1, 1)
    assert smith(IntMatrix(3, 2)) == ()
    assert smith(IntMatrix.from_dense([[2, 4], [0, 4]])) == (2, 4)


def test_smith_against_sympy():
    rng = random.Random(11)
    for _ in range(60):
        r, c = rng.randint(1, 6), rng.randint(1, 6)
        rows = [[rng.choice([0, 0, 0, 1, -1, 2, -3, 6]) for _ in range(c)] for _ in range(r)]
        ours = smith(IntMatrix.from_dense(rows))
        ref = tuple(sorted(abs(int(d)) for d in invariant_factors(Matrix(rows), domain=ZZ) if d != 0))
        assert ours == ref, rows


def test_divisibility_chain_is_enforced():
    with pytest.raises(HomologyError):
        HomologySummary([0], [(4, 2)])


def test_homology_examples():
    assert homology(normalized_chains(boundary_triangle()), 1).betti == [1, 1]
    h = homology(normalized_chains(nerve(z(2), 3)), 2)
    assert as_pairs(h) == [(1, ()), (0, (2,)), (0, ())]
    cone = FinPoset(["a", "b", "m"], [("a", "m"), ("b", "m")]).as_category()
    assert homology(normalized_chains(nerve(cone, 3)), 2).betti == [1, 0, 0]


@pytest.mark.parametrize("n", [2, 3, 4])
def test_cyclic_group_against_bar_oracle(n):
    ours = as_pairs(homology(normalized_chains(nerve(z(n), 3)), 2))
    assert ours == oracles.group_bar_homology(list(range(n)), lambda a, b: (a + b) % n, 0, 2)


def test_s3_against_bar_oracle():
    g = symmetric_group_3()
    ours = as_pairs(homology(normalized_chains(nerve(g, 3)), 2))
    ref = oracles.group_bar_homology(list(g.morphisms), g.compose, g.identity("*"), 2)
    assert ours == ref == [(1, ()), (0, (2,)), (0, ())]


def test_rp2_torsion():
    cc = normalized_chains(simplicial_complex(oracles.RP2))
    assert as_pairs(homology(cc, 2)) == oracles.simplicial_complex_homology(oracles.RP2, 2)
    assert as_pairs(reduced_homology(cc, 2)) == [(1, ()), (0, (2,)), (0, ())]
    assert betti_f2(cc, 2) == [1, 1, 1]


def test_truncation_reporting():
    cc = normalized_chains(nerve(z(2), 2))
    with pytest.raises(HomologyError):
        homology(cc, 2)
    h = homology(cc, 2, strict=False)
    assert h.betti[2] is None and h.valid_through == 1


def test_check_rejects_non_complex():
    d1 = IntMatrix.from_dense([[1], [1]])
    d2 = IntMatrix.from_dense([[1]])
    cc = ChainComplex([2, 1, 1], [IntMatrix(0, 2), d1, d2])
    with pytest.raises(HomologyError):
        cc.check()


def test_coreduce_cone_to_point():
    cone = FinPoset(["a", "b", "c", "m"], [("a", "m"), ("b", "m"), ("c", "m"), ("a", "b")]).as_category()
    red, log = coreduce(normalized_chains(nerve(cone, 3)))
    assert red.ranks[0] == 1 and sum(red.ranks[1:]) == 0
    assert log.ratio > 1


def test_coreduce_preserves_triangle_homology():
    red, _ = coreduce(normalized_chains(boundary_triangle()))
    assert homology(red, 1).betti == [1, 1]


def test_coreduce_against_direct_and_oracle():
    rng = random.Random(5)
    for i in range(100):
        facets = oracles.random_facets(rng)
        cc = normalized_chains(simplicial_complex(facets, 3))
        cc.check()
        direct = homology(cc, 2)
        red, _ = coreduce(cc)
        red.check()
        assert homology(red, 2) == direct, facets
        if i < 25:
            assert as_pairs(direct) == oracles.simplicial_complex_homology(facets, 2)


def test_f2_examples_and_consistency():
    assert betti_f2(normalized_chains(boundary_triangle()), 1) == [1, 1]
    assert betti_f2(normalized_chains(point()), 1) == [1, 0]
    cc = normalized_chains(nerve(z(2), 3))
    h = homology(cc, 2)
    assert betti_f2(cc, 2) == [1, 1, 1] == f2_from_integral(h)


def test_rank_f2():
    assert rank_f2(IntMatrix.from_dense([[2, 0], [0, 1]])) == 1
    assert rank_f2(IntMatrix.from_dense([[1, 1], [1, 1]])) == 1


def test_matrix_format_round_trip():
    m = IntMatrix.from_dense([[0, 2, 0], [-1, 0, 5]])
    assert loads_matrix(dumps_matrix(m)) == m
    assert dumps_matrix(m).splitlines()[0] == "2 3 3"


@pytest.mark.parametrize("text", ["", "2 2 5\n0 0 1", "x y\n", "2 2\n0 0"])
def test_matrix_format_rejects(text):
    with pytest.raises(HomologyError):
        loads_matrix(text)


def test_matmul_against_dense():
    a = IntMatrix.from_dense([[1, 2], [0, -1], [3, 0]])
    b = IntMatrix.from_dense([[2, 0, 1], [1, 1, 0]])
    expect = [[sum(x * y for x, y in zip(row, col)) for col in zip(*b.to_dense())] for row in a.to_dense()]
    assert (a @ b).to_dense() == expect
