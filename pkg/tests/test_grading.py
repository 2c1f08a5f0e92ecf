from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from dshier.exact import minimal_polynomial
from dshier.grading import (
    HALF,
    TripleError,
    classify_perturbation,
    find_integrable_element,
    grading_from,
    integrable_triple_check,
    is_coisotropic,
    make_integrable_triple,
    nilpotent_type_probe,
    nilpotent_type_test,
    omega_form,
    sl2_from_partition,
    sl2_from_root,
    so_centralizer_span,
    so_integrable_triple,
    so_nilpotent_type_pattern,
)
from dshier.liealg import (
    F_element,
    bracket,
    build_g2,
    build_sl,
    build_so_from_partition,
    centralizer,
    is_nilpotent_elem,
    orthogonal_partitions,
    span_basis,
)


def so_grading(part):
    alg, ix = build_so_from_partition(part)
    return alg, ix, grading_from(sl2_from_partition(alg, part, ix))


SL2 = build_sl(2)
SL2_G = grading_from(sl2_from_partition(SL2, [2]))
SO7, IX7, SO7_G = so_grading([3, 2, 2])
G2 = build_g2()
G2_G = grading_from(sl2_from_root(G2, "e(a+2b)", "e(-a-2b)"))

NONZERO = [p for n in (5, 6, 7, 8) for p in orthogonal_partitions(n) if max(p) > 1]


def test_sl2_grading():
    assert SL2_G.depth == 1
    assert {k: len(v) for k, v in SL2_G.pieces.items()} == {-1: 1, 0: 1, 1: 1}
    assert omega_form(SL2_G).shape == (0, 0)


def test_so7_h_entries():
    s = sl2_from_partition(SO7, [3, 2, 2], IX7)
    M = SO7.matrix_of(s.h)
    assert [M[k, k] for k in range(7)] == [2, 0, -2, 1, -1, 1, -1]
    assert SO7_G.depth == Fraction(3, 2)


def test_sl3_principal_h():
    sl3 = build_sl(3)
    s = sl2_from_partition(sl3, [3])
    M = sl3.matrix_of(s.h)
    assert [M[k, k] for k in range(3)] == [2, 0, -2]


def test_g2_pieces():
    dims = {k: len(v) for k, v in G2_G.pieces.items()}
    assert G2_G.depth == Fraction(3, 2)
    assert dims[HALF] == 2 and dims[1] == 1 and dims[Fraction(3, 2)] == 2


def test_partition_mismatch():
    with pytest.raises(TripleError):
        sl2_from_partition(build_sl(3), [2, 2])


@pytest.mark.parametrize("part", NONZERO, ids=str)
def test_grading_symmetric_and_total(part):
    alg, ix, g = so_grading(part)
    assert sum(len(v) for v in g.pieces.values()) == alg.dim
    for k, v in g.pieces.items():
        assert len(v) == len(g.piece(-k))
    assert g.depth >= 1
    W = omega_form(g)
    n = W.nrows
    assert all(W[i, j] == -W[j, i] for i in range(n) for j in range(n))
    assert W.rank() == n
    # elements of g_d are central in g_{>0}
    for x in g.piece(g.depth):
        for y in g.gt(0):
            assert bracket(x, y).is_zero()


def test_so8_53_depth():
    _, _, g = so_grading([5, 3])
    assert g.depth == 3  # (4 + 2) / 2 on the exterior square
    assert not nilpotent_type_test(g)


def test_coisotropy_examples():
    assert is_coisotropic(SO7_G.piece(HALF), SO7_G)
    assert not is_coisotropic([], SO7_G)
    E = F_element(SO7, IX7, (1, 1, 1), (1, 1, 2))
    z = centralizer(E, SO7_G.piece(HALF))
    assert len(z) == 2 and is_coisotropic(z, SO7_G)


def test_classify_examples():
    f = SL2_G.f
    c = classify_perturbation(f, SL2["e"], SL2_G)
    assert (c.kind, c.element_type) == ("cyclic", "semisimple")
    c = classify_perturbation(G2_G.f, G2["e(a+2b)"], G2_G)
    assert c.kind == "invalid"
    E = F_element(SO7, IX7, (1, 1, 1), (1, 1, 2))
    c = classify_perturbation(SO7_G.f, E, SO7_G)
    assert (c.kind, c.element_type) == ("quasicyclic", "mixed")


def test_classify_rejects_inhomogeneous():
    with pytest.raises(TripleError):
        classify_perturbation(SL2_G.f, SL2["e"] + SL2["h"], SL2_G)


@pytest.mark.parametrize("part", [p for p in NONZERO if sum(p) >= 7], ids=str)
def test_nilpotent_type_probe_agrees(part):
    alg, ix, g = so_grading(part)
    verdict = nilpotent_type_probe(g.f, g, trials=6, seed=1)
    if nilpotent_type_test(g):
        assert verdict.nilpotent_type
    # the converse direction is probabilistic and lives in the acceptance sweep


def test_so7_triple():
    t = so_integrable_triple([3, 2, 2])
    rep = integrable_triple_check(t)
    assert rep.ok, rep
    assert all(rep.extras.values())
    p = minimal_polynomial(t.alg.matrix_of(t.f1 + t.E))
    assert p.coeffs == (0, -2, 0, 1)
    assert bracket(t.f1, t.f2).is_zero() and bracket(t.f2, t.E).is_zero()


@pytest.mark.parametrize("part", [[3, 2, 2], [3, 2, 2, 1], [3, 2, 2, 2, 2], [5, 4, 4]], ids=str)
def test_so_triple_centralizer_matches_closed_form(part):
    t = so_integrable_triple(part)
    alg, ix = t.alg, None
    _, ix = build_so_from_partition(part)
    z = centralizer(t.E, t.grading.piece(HALF))
    expect = so_centralizer_span(alg, ix)
    assert [x.coords for x in span_basis(z)] == [x.coords for x in span_basis(expect)]
    # E kills n = l_perp + g_{>=1}
    for y in t.reduction.n:
        assert bracket(t.E, y).is_zero()
    assert not is_nilpotent_elem(t.f + t.E)


def test_so_pattern():
    assert so_nilpotent_type_pattern([3, 2, 2])
    assert not so_nilpotent_type_pattern([3, 3, 1])
    with pytest.raises(TripleError):
        so_integrable_triple([3, 3, 1])


def test_reduction_data_invariants():
    t = so_integrable_triple([3, 2, 2])
    r = t.reduction
    g = t.grading
    W = omega_form(g)
    assert all(bracket(a, b).is_zero() or g.f.parent.form(g.f, bracket(a, b)) == 0 for a in r.l for b in r.l)
    assert len(r.m) + len(r.p) == t.alg.dim
    assert len(span_basis(list(r.m) + list(r.p))) == t.alg.dim
    assert len(span_basis(list(r.l) + list(r.l_perp))) == len(r.l_perp)
    for x in r.p:
        assert g.degree_of(x) is not None and g.degree_of(x) <= HALF
    assert W.rank() == 4


def test_sl2_trivial_triple_and_nonsense():
    t = make_integrable_triple(SL2_G.f, SL2.zero(), SL2["e"], SL2_G)
    assert integrable_triple_check(t).ok
    bad = make_integrable_triple(SL2_G.f, SL2.zero(), SL2_G.f, SL2_G, l=[])
    rep = integrable_triple_check(bad)
    assert not rep.conditions["(ii)"] and not rep.conditions["(iii)"]


def test_find_integrable_element():
    assert find_integrable_element(SL2_G.f, SL2_G, "d").coords == SL2["e"].coords
    assert find_integrable_element(G2_G.f, G2_G, "d-1/2") is None
    sl3 = build_sl(3)
    g = grading_from(sl2_from_partition(sl3, [2, 1]))
    E = find_integrable_element(g.f, g, "d-1/2")
    assert E is not None
    c = classify_perturbation(g.f, E, g)
    assert (c.kind, c.element_type) == ("quasicyclic", "semisimple")


@given(st.integers(0, 10_000))
def test_probe_is_seed_deterministic(seed):
    a = nilpotent_type_probe(SO7_G.f, SO7_G, trials=2, seed=seed)
    b = nilpotent_type_probe(SO7_G.f, SO7_G, trials=2, seed=seed)
    assert a == b
