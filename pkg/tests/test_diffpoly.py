from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from dshier.diffpoly import (
    DiffPoly,
    LambdaPoly,
    ParseError,
    format_diffpoly,
    format_lambdapoly,
    parse_diffpoly,
    parse_lambdapoly,
    var,
)

from strategies import diffpolys, rationals

u, v = var("u"), var("v")
uv = diffpolys(("u", "v"), constants=("c",))


def test_printing():
    p = u * u.d(2) * Fraction(1, 2) + u ** 3 - 3
    assert format_diffpoly(p) == "-3 + 1/2*u*u[2] + u^3"
    assert format_diffpoly(DiffPoly()) == "0"


def test_parse_examples():
    assert parse_diffpoly("3*u*u[1] + c*u[3]") == u * u.d() * 3 + DiffPoly.symbol("c") * u.d(3)
    assert parse_diffpoly("u^2/2") == u * u / 2
    P = parse_lambdapoly("(u[1]) + (2*u)*L + (c)*L^3")
    assert P.coeff(1) == u * 2 and P.degree == 3


@pytest.mark.parametrize("bad", ["", "u[", "u[-1]", "u/u", "u^(1/2)", "foo(u)", "c[1]", "u**u"])
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        parse_diffpoly(bad)


@given(uv)
def test_roundtrip(p):
    assert parse_diffpoly(format_diffpoly(p)) == p


@given(uv, uv)
def test_lambda_roundtrip(p, q):
    P = LambdaPoly([p, q, p * q])
    assert parse_lambdapoly(format_lambdapoly(P)) == P


@given(uv, uv)
def test_leibniz(p, q):
    assert (p * q).d() == p.d() * q + p * q.d()


@given(uv, uv, rationals)
def test_d_linear(p, q, a):
    assert (p + q.scale(a)).d() == p.d() + q.d().scale(a)


@given(uv, st.sampled_from(["u", "v"]), st.integers(1, 4))
def test_partial_commutation(p, name, n):
    # d/du[n] . D = d/du[n-1] + D . d/du[n]
    assert p.d().partial(name, n) == p.partial(name, n - 1) + p.partial(name, n).d()


def test_constants_are_constant():
    c = DiffPoly.symbol("c")
    assert c.d().is_zero()
    assert (c * u).d() == c * u.d()
    assert c.constants() == {"c"}


@given(uv)
def test_substitute_identity(p):
    assert p.substitute({"u": u}) == p


@given(uv, uv)
def test_substitute_commutes_with_d(p, q):
    assert p.d().substitute({"u": q}) == p.substitute({"u": q}).d()


def test_shift_apply():
    # (L + D)^2 u = L^2 u + 2 L u' + u''
    P = LambdaPoly([u]).shift_apply(2)
    assert P.coeffs == (u.d(2), u.d() * 2, u)
    assert LambdaPoly([u]).shift_apply(1, -1).coeffs == (-u.d(), -u)


def test_homogeneous_parts():
    p = u + u * u.d() + 7
    assert sorted(p.homogeneous_parts()) == [0, 1, 2]
    assert p.degree() == 2 and p.max_order("u") == 1
