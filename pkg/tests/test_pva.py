import random

import pytest
from hypothesis import given, strategies as st

from dshier.diffpoly import DiffPoly, LambdaPoly, shift_apply_diff, var
from dshier.liealg import build_sl
from dshier.pva import (
    GenBracketTable,
    LenardError,
    LocalFunctional,
    PVAError,
    affine_bracket,
    antiderivative,
    check_axioms,
    evolution,
    flow_derivative,
    functional_bracket,
    functional_eq,
    functional_from_gradient,
    functionals_independent,
    gardner_table,
    ham_flow,
    involution_matrix,
    jacobi_defect,
    lambda_bracket,
    lenard_run,
    poisson_structure_matrix,
    random_diffpoly,
    skew_adjoint,
    solve_operator,
    variational_derivative,
    virasoro_table,
)

from strategies import diffpolys

VIR = virasoro_table()
H1 = gardner_table()
SL2_T0, SL2_TINF = affine_bracket(build_sl(2), build_sl(2)["e"])
u = var("u")
c = DiffPoly.symbol("c")

upolys = diffpolys(("u",), constants=("c",))
apolys = diffpolys(SL2_T0.variables, max_terms=3, max_order=2, max_degree=2)


def lam():
    return LambdaPoly.lam()


def right_leibniz(a, b, x, T):
    # {ab L x} = {a L+d x}_-> b + {b L+d x}_-> a
    out = LambdaPoly()
    for first, second in ((a, b), (b, a)):
        for k, Pk in enumerate(lambda_bracket(first, x, T).coeffs):
            out = out + shift_apply_diff(k, second) * LambdaPoly([Pk])
    return out


def test_virasoro_generator_bracket():
    assert lambda_bracket(u, u, VIR) == LambdaPoly([u.d(), u * 2, 0, c])


def test_ham_flow_kdv():
    assert ham_flow(u * u / 2, u, VIR) == u * u.d() * 3 + c * u.d(3)


def test_poisson_structure_matrix_text():
    assert str(poisson_structure_matrix(VIR)) == "[u[1] + 2*u*D + c*D^3]"


@pytest.mark.parametrize("T,polys", [(VIR, upolys), (SL2_T0, apolys)], ids=["vir", "affine-sl2"])
@given(data=st.data())
def test_bracket_identities(T, polys, data):
    a, b, x = (data.draw(polys) for _ in range(3))
    ab = lambda_bracket(a, b, T)
    # sesquilinearity
    assert lambda_bracket(a.d(), b, T) == -(lam() * ab)
    assert lambda_bracket(a, b.d(), T) == lam() * ab + ab.d()
    # left Leibniz
    assert lambda_bracket(a, b * x, T) == ab * LambdaPoly([x]) + lambda_bracket(a, x, T) * LambdaPoly([b])
    # right Leibniz
    assert lambda_bracket(a * b, x, T) == right_leibniz(a, b, x, T)
    # skewsymmetry
    assert lambda_bracket(b, a, T) == skew_adjoint(ab)


@given(upolys, upolys)
def test_functional_bracket_skew(f, g):
    s = functional_bracket(f, g, VIR) + functional_bracket(g, f, VIR)
    assert s.is_zero()


@given(upolys)
def test_variational_derivative_kills_total_derivatives(f):
    assert variational_derivative(f.d(), "u").is_zero()
    assert functional_eq(f.d(), DiffPoly())


@given(upolys)
def test_antiderivative(f):
    g = f - f.constant_part()
    s = antiderivative(g.d())
    assert s is not None and s.d() == g.d()


def test_antiderivative_none():
    assert antiderivative(u * u) is None
    assert antiderivative(DiffPoly.const(1)) is None


@given(upolys)
def test_gradient_roundtrip(f):
    h = functional_from_gradient({"u": variational_derivative(f, "u")})
    assert h is not None
    assert functional_eq(h, f - f.constant_part())


def test_functional_from_gradient_rejects_non_exact():
    # a gradient has self-adjoint Frechet derivative; u' and u u' do not
    assert functional_from_gradient({"u": u.d()}) is None
    assert functional_from_gradient({"u": u * u.d()}) is None
    assert functional_from_gradient({"u": u.d(2)}) is not None


def test_functional_equality():
    assert LocalFunctional(u * u.d(2)) == LocalFunctional(-(u.d() * u.d()))
    assert not LocalFunctional(u).is_zero()
    assert not LocalFunctional(DiffPoly.const(1)).is_zero()


def test_check_axioms_pass():
    for T in (VIR, H1, SL2_T0, SL2_TINF, SL2_T0 + SL2_TINF):
        rep = check_axioms(T)
        assert rep.ok, str(rep)


def test_injected_skew_violation():
    bad = GenBracketTable(["u"], {("u", "u"): LambdaPoly([u.d(), u * 3])})
    rep = check_axioms(bad)
    assert ("u", "u") in rep.skew_violations


def test_injected_jacobi_violation():
    # [a,b] = a, [b,c] = b, [c,a] = c is antisymmetric but the Jacobiator is a + b + c
    a, b, x = var("a"), var("b"), var("c")
    pairs = {("a", "b"): a, ("b", "c"): b, ("c", "a"): x}
    entries = {}
    for (i, j), v in pairs.items():
        entries[(i, j)] = LambdaPoly([v])
        entries[(j, i)] = LambdaPoly([-v])
    T = GenBracketTable(["a", "b", "c"], entries)
    rep = check_axioms(T)
    assert not rep.skew_violations
    assert rep.jacobi_violations
    i, j, k = rep.jacobi_violations[0]
    assert jacobi_defect(T, i, j, k)


def test_unknown_generator():
    with pytest.raises(PVAError):
        lambda_bracket(var("w"), u, VIR)


def test_table_dict_roundtrip():
    d = VIR.to_dict()
    T = GenBracketTable.from_dict(d)
    assert T.get("u", "u") == VIR.get("u", "u")


def test_solve_operator():
    rho = (u.d() * u * 3 + c * u.d(3),)
    xi = solve_operator(H1, rho)
    assert xi[0].d() == rho[0]
    xi = solve_operator(VIR, (u.d(),))
    assert poisson_structure_matrix(VIR).apply(xi)[0] == u.d()


def test_lenard_kdv():
    F = lenard_run(VIR, H1, u * u / 2, 4)
    assert F[1] == LocalFunctional((u ** 3 + c * u * u.d(2)) / 2)
    for T in (VIR, H1):
        assert all(all(row) for row in involution_matrix(F, T))
    assert functionals_independent(F)


def test_lenard_from_u():
    F = lenard_run(VIR, H1, u, 3)
    assert F[1] == LocalFunctional(u * u / 2)
    assert F[2] == LocalFunctional((u ** 3 + c * u * u.d(2)) / 2)


def test_lenard_failure_carries_partial():
    # reversed pair: H1 xi = Vir grad h has no polynomial solution at the first step for h = u^2/2
    with pytest.raises(LenardError) as exc:
        lenard_run(H1, VIR, u ** 3, 3)
    assert len(exc.value.partial) >= 1


def test_kdv_flows_commute():
    F = lenard_run(VIR, H1, u * u / 2, 3)
    flows = [evolution(G, H1)["u"] for G in F]
    for i in range(3):
        for j in range(i + 1, 3):
            a = flow_derivative(flows[j], {"u": flows[i]})
            b = flow_derivative(flows[i], {"u": flows[j]})
            assert a == b


def test_random_diffpoly_seeded():
    a = random_diffpoly(random.Random(5), ["u"])
    b = random_diffpoly(random.Random(5), ["u"])
    assert a == b


def test_independence():
    assert functionals_independent([u, u * u, u ** 3])
    assert not functionals_independent([u * u, u * u + u.d(), u * u * 2])
