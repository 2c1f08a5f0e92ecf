"""Hypothesis strategies shared by the test modules."""

from fractions import Fraction

from hypothesis import strategies as st

from dshier.diffpoly import DiffPoly


@st.composite
def monomials(draw, variables=("u",), max_order=3, max_degree=3, constants=()):
    t = DiffPoly.const(draw(st.integers(-3, 3).filter(bool)))
    for _ in range(draw(st.integers(0, max_degree))):
        t = t * DiffPoly.var(draw(st.sampled_from(variables)), draw(st.integers(0, max_order)))
    for c in constants:
        if draw(st.booleans()):
            t = t * DiffPoly.symbol(c)
    return t


@st.composite
def diffpolys(draw, variables=("u",), max_terms=4, **kw):
    out = DiffPoly()
    for _ in range(draw(st.integers(0, max_terms))):
        out = out + draw(monomials(variables, **kw))
    return out


rationals = st.fractions(min_value=-5, max_value=5, max_denominator=6).map(Fraction)
