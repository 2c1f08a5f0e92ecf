from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from dshier.diffpoly import DiffPoly, var
from dshier.grading import grading_from, make_integrable_triple, sl2_from_partition, so_integrable_triple
from dshier.hierarchy import (
    HierarchyError,
    HSplit,
    WindowTooSmall,
    ZGrading,
    center_check,
    check_grading_bookkeeping,
    check_h_closed,
    default_a,
    densities,
    density_top,
    exp_ad,
    flatness_check,
    gauge_invariant,
    gauge_perturb,
    principal_sl2_slice,
    random_h_element,
    required_max_degree,
    residual,
    series_add,
    slice_evaluate,
    solve_hk,
    solve_recursion,
)
from dshier.liealg import build_sl
from dshier.pva import LocalFunctional

SL2 = build_sl(2)
SL2_G = grading_from(sl2_from_partition(SL2, [2]))
SL2_T = make_integrable_triple(SL2_G.f, SL2.zero(), SL2["e"], SL2_G)
u = var("u")


@pytest.fixture(scope="module")
def sl2_run():
    return solve_recursion(SL2_T, 5)


@pytest.fixture(scope="module")
def so7_run():
    return solve_recursion(so_integrable_triple([3, 2, 2]), 2)


def test_zgrading_degrees():
    zg = ZGrading(SL2_T)
    assert zg.k == 1 and zg.zdeg == -2
    b = next(i for i, x in enumerate(zg.basis) if x == SL2["e"])
    assert zg.bdeg[b] == 1
    assert zg.degree((b, 1)) == -1  # f + zE is homogeneous of degree -1


def test_sl2_residual_and_bookkeeping(sl2_run):
    assert residual(sl2_run) == {}
    assert check_grading_bookkeeping(sl2_run)
    assert list(sl2_run.variables) == ["q1", "q2"]


def test_so7_residual(so7_run):
    assert len(so7_run.variables) == 15
    assert residual(so7_run) == {}
    assert check_grading_bookkeeping(so7_run)
    dens = densities(so7_run)
    assert dens and not dens[0][1].is_zero()
    assert flatness_check(so7_run).ok


def test_so7_h_closed(so7_run):
    assert check_h_closed(so7_run.split, [Fraction(k, 2) for k in range(-1, 5)])


def test_uniqueness(sl2_run):
    again = solve_recursion(SL2_T, 5)
    assert again.U == sl2_run.U and again.h == sl2_run.h


def test_sl2_slice_densities(sl2_run):
    sl = principal_sl2_slice(sl2_run)
    got = [slice_evaluate(F, sl, sl2_run.variables) for _, F in densities(sl2_run)]
    assert got[0] == LocalFunctional(u)
    assert got[1] == LocalFunctional(u * u * Fraction(-1, 4))
    assert got[2] == LocalFunctional((u ** 3 - u * u.d(2) / 2) / 8)


def test_window_too_small(sl2_run):
    with pytest.raises(WindowTooSmall):
        densities(sl2_run, count=10)
    short = solve_recursion(SL2_T, 1)
    with pytest.raises(WindowTooSmall):
        densities(short, count=50)
    assert required_max_degree(SL2_T, 3) == 5


def test_density_top(sl2_run):
    assert density_top(sl2_run, default_a(sl2_run)) == densities(sl2_run)[0][0]


def test_center_check(sl2_run):
    assert center_check(default_a(sl2_run), sl2_run)
    zg = sl2_run.zg
    assert not center_check(zg.constant(SL2["h"]), sl2_run)
    with pytest.raises(HierarchyError):
        densities(sl2_run, a=zg.constant(SL2["h"]))


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_gauge_invariance(sl2_run, seed):
    S = random_h_element(sl2_run, seed)
    r2 = gauge_perturb(sl2_run, S, seed)
    assert residual(r2) == {}
    assert gauge_invariant(sl2_run, r2)
    assert flatness_check(r2).ok


def test_gauge_rejects_non_h(sl2_run):
    zg = sl2_run.zg
    with pytest.raises(HierarchyError):
        gauge_perturb(sl2_run, zg.constant(SL2["e"]))  # degree 1 but not in h
    with pytest.raises(HierarchyError):
        gauge_perturb(sl2_run, zg.constant(SL2["f"]))  # negative degree


def test_flatness(sl2_run):
    rep = flatness_check(sl2_run)
    assert rep.ok and rep.max_nonzero == 0


def test_residual_detects_corruption(sl2_run):
    bad_h = dict(sl2_run.h)
    k = next(iter(k for k in bad_h if sl2_run.zg.degree(k) >= 1))
    bad_h[k] = bad_h[k] + var("q1")
    bad = type(sl2_run)(**{**sl2_run.__dict__, "h": bad_h})
    assert residual(bad) != {}


def test_solve_hk_rejects_inhomogeneous(sl2_run):
    zg = sl2_run.zg
    A = series_add(zg.constant(SL2["e"]), zg.constant(SL2["h"]))
    with pytest.raises(HierarchyError):
        solve_hk(A, sl2_run.split, 1)


@given(st.lists(st.integers(-4, 4), min_size=3, max_size=3), st.integers(0, 2))
def test_solve_hk_decomposition(coeffs, step):
    """h + [f + zE, U] reproduces A, h lies in the kernel part, and the answer is unique."""
    split = HSplit(ZGrading(SL2_T))
    zg = split.zg
    i = Fraction(2 * step + 1)  # degrees where sl2 has both parts
    keys = zg.keys_of_degree(i)
    A = {k: DiffPoly.const(c) * var("w") for k, c in zip(keys, coeffs) if c}
    h, U = solve_hk(A, split, i)
    lhs = series_add(h, zg.bracket(split.lam, U))
    assert lhs == A
    assert zg.bracket(split.lam1, h) == {}
    h2, U2 = solve_hk(A, split, i)
    assert (h2, U2) == (h, U)


def test_exp_ad_of_zero(sl2_run):
    zg = sl2_run.zg
    X = zg.constant(SL2["f"])
    assert exp_ad(zg, {}, X, 3) == X


def test_json_export(sl2_run):
    import json
    d = json.loads(sl2_run.to_json(densities(sl2_run)))
    assert d["max_degree"] == "5"
    assert [x["z_power"] for x in d["densities"]] == [m for m, _ in densities(sl2_run)]


@pytest.mark.parametrize("part", [[3], [2, 1]], ids=str)
def test_sl3_runs(part):
    from dshier.grading import find_integrable_element
    from dshier.liealg import jordan_decomposition_elem

    alg = build_sl(3)
    g = grading_from(sl2_from_partition(alg, part))
    E = find_integrable_element(g.f, g, "d")
    _, n = jordan_decomposition_elem(g.f + E)
    r = solve_recursion(make_integrable_triple(g.f - n, n, E, g), 3)
    assert residual(r) == {}
    assert flatness_check(r).ok
    assert not densities(r)[0][1].is_zero()
