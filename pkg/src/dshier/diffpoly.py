"""Differential polynomials over Q and polynomials in lambda with such coefficients.

A monomial is a sorted tuple of ``((name, order), exponent)`` pairs.  Differential
variables have ``order >= 0``; named constants such as the central charge ``c``
carry ``order == -1``, are killed by the total derivative and never enter
partial or variational derivatives.

Text syntax: ``u1[3]`` is the third derivative of ``u1``, a bare name is the
variable itself, ``c`` is the reserved constant, ``L`` stands for lambda and
``^`` may be used for powers.
"""

from __future__ import annotations

import ast
import re
from fractions import Fraction
from math import comb
from typing import Iterable, Mapping

from .exact import Q, fmt_q

CONST = -1
DEFAULT_CONSTANTS = frozenset({"c"})
LAMBDA_SYMBOL = "L"

Mono = tuple  # ((name, order), exp), ...


def _mono_mul(a: Mono, b: Mono) -> Mono:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for k, e in b:
        d[k] = d.get(k, 0) + e
    return tuple(sorted(d.items()))


def _mono_degree(m: Mono) -> int:
    """Degree in the differential variables (constants excluded)."""
    return sum(e for (_, n), e in m if n >= 0)


class DiffPoly:
    """Immutable element of ``Q[c][u_i^(n)]``."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Mono, Fraction] | None = None):
        t = {}
        if terms:
            for m, a in terms.items():
                if a:
                    t[m] = Q(a)
        self.terms = t
        self._hash = None

    # -- constructors
    @classmethod
    def _raw(cls, terms: dict) -> DiffPoly:
        obj = cls.__new__(cls)
        obj.terms = terms
        obj._hash = None
        return obj

    @classmethod
    def const(cls, a) -> DiffPoly:
        a = Q(a)
        return cls._raw({(): a} if a else {})

    @classmethod
    def var(cls, name: str, order: int = 0) -> DiffPoly:
        if order < 0:
            raise ValueError("derivative order must be >= 0")
        return cls._raw({(((name, order), 1),): Fraction(1)})

    @classmethod
    def symbol(cls, name: str) -> DiffPoly:
        """A named constant such as the central charge."""
        return cls._raw({(((name, CONST), 1),): Fraction(1)})

    @classmethod
    def coerce(cls, x) -> DiffPoly:
        return x if isinstance(x, DiffPoly) else cls.const(x)

    # -- basic protocol
    def __eq__(self, other):
        if not isinstance(other, DiffPoly):
            if isinstance(other, (int, Fraction)):
                other = DiffPoly.const(other)
            else:
                return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self):
        return f"DiffPoly({format_diffpoly(self)!r})"

    def __str__(self):
        return format_diffpoly(self)

    # -- ring operations
    def __add__(self, other) -> DiffPoly:
        if not isinstance(other, (DiffPoly, int, Fraction)):
            return NotImplemented
        other = DiffPoly.coerce(other)
        t = dict(self.terms)
        for m, a in other.terms.items():
            s = t.get(m, 0) + a
            if s:
                t[m] = s
            else:
                t.pop(m, None)
        return DiffPoly._raw(t)

    __radd__ = __add__

    def __neg__(self) -> DiffPoly:
        return DiffPoly._raw({m: -a for m, a in self.terms.items()})

    def __sub__(self, other) -> DiffPoly:
        if not isinstance(other, (DiffPoly, int, Fraction)):
            return NotImplemented
        return self + (-DiffPoly.coerce(other))

    def __rsub__(self, other) -> DiffPoly:
        if not isinstance(other, (DiffPoly, int, Fraction)):
            return NotImplemented
        return DiffPoly.coerce(other) - self

    def scale(self, a) -> DiffPoly:
        a = Q(a)
        if not a:
            return DiffPoly()
        return DiffPoly._raw({m: a * b for m, b in self.terms.items()})

    def __mul__(self, other) -> DiffPoly:
        if not isinstance(other, DiffPoly):
            if isinstance(other, (int, Fraction)):
                return self.scale(other)
            return NotImplemented
        if len(other.terms) == 1 and () in other.terms:
            return self.scale(other.terms[()])
        t: dict = {}
        for m1, a1 in self.terms.items():
            for m2, a2 in other.terms.items():
                m = _mono_mul(m1, m2)
                s = t.get(m, 0) + a1 * a2
                if s:
                    t[m] = s
                else:
                    t.pop(m, None)
        return DiffPoly._raw(t)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, a) -> DiffPoly:
        return self.scale(1 / Q(a))

    def __pow__(self, k: int) -> DiffPoly:
        if k < 0:
            raise ValueError("negative power")
        out = DiffPoly.const(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- inspection
    def variables(self) -> set[str]:
        return {name for m in self.terms for (name, n), _ in m if n >= 0}

    def constants(self) -> set[str]:
        return {name for m in self.terms for (name, n), _ in m if n == CONST}

    def max_order(self, name: str | None = None) -> int:
        """Largest derivative order present (of ``name`` if given), ``-1`` if none."""
        best = -1
        for m in self.terms:
            for (v, n), _ in m:
                if n >= 0 and (name is None or v == name):
                    best = max(best, n)
        return best

    def degree(self) -> int:
        return max((_mono_degree(m) for m in self.terms), default=0)

    def homogeneous_parts(self) -> dict[int, DiffPoly]:
        out: dict[int, dict] = {}
        for m, a in self.terms.items():
            out.setdefault(_mono_degree(m), {})[m] = a
        return {k: DiffPoly._raw(v) for k, v in sorted(out.items())}

    def constant_part(self) -> DiffPoly:
        """Terms free of differential variables (named constants allowed)."""
        return DiffPoly._raw({m: a for m, a in self.terms.items() if _mono_degree(m) == 0})

    def coefficient(self, mono: Mono) -> Fraction:
        return self.terms.get(mono, Fraction(0))

    # -- calculus
    def d(self, times: int = 1) -> DiffPoly:
        """Total derivative: ``u^(n) -> u^(n+1)``, constants go to zero."""
        out = self
        for _ in range(times):
            out = out._d1()
        return out

    def _d1(self) -> DiffPoly:
        t: dict = {}
        for m, a in self.terms.items():
            for (v, n), e in m:
                if n < 0:
                    continue
                rest = dict(m)
                if e == 1:
                    del rest[(v, n)]
                else:
                    rest[(v, n)] = e - 1
                rest[(v, n + 1)] = rest.get((v, n + 1), 0) + 1
                key = tuple(sorted(rest.items()))
                s = t.get(key, 0) + a * e
                if s:
                    t[key] = s
                else:
                    t.pop(key, None)
        return DiffPoly._raw(t)

    def partial(self, name: str, order: int) -> DiffPoly:
        """Partial derivative with respect to ``name^(order)``."""
        key = (name, order)
        t: dict = {}
        for m, a in self.terms.items():
            d = dict(m)
            e = d.get(key)
            if not e:
                continue
            if e == 1:
                del d[key]
            else:
                d[key] = e - 1
            nm = tuple(sorted(d.items()))
            t[nm] = t.get(nm, 0) + a * e
        return DiffPoly(t)

    def substitute(self, mapping: Mapping[str, DiffPoly]) -> DiffPoly:
        """Differential substitution ``u -> P`` (so ``u^(n) -> d^n P``); unmapped names stay."""
        cache: dict = {}

        def image(v, n):
            if (v, n) not in cache:
                if v in mapping and n >= 0:
                    cache[(v, n)] = DiffPoly.coerce(mapping[v]).d(n)
                elif n == CONST:
                    cache[(v, n)] = DiffPoly.symbol(v)
                else:
                    cache[(v, n)] = DiffPoly.var(v, n)
            return cache[(v, n)]

        out = DiffPoly()
        for m, a in self.terms.items():
            term = DiffPoly.const(a)
            for (v, n), e in m:
                term = term * image(v, n) ** e
            out = out + term
        return out

    def scale_by_degree(self, fn) -> DiffPoly:
        """Multiply each monomial by ``fn(degree)``."""
        return DiffPoly({m: a * fn(_mono_degree(m)) for m, a in self.terms.items()})


def dsum(items: Iterable[DiffPoly]) -> DiffPoly:
    t: dict = {}
    for p in items:
        for m, a in p.terms.items():
            s = t.get(m, 0) + a
            if s:
                t[m] = s
            else:
                t.pop(m, None)
    return DiffPoly._raw(t)


def var(name: str, order: int = 0) -> DiffPoly:
    return DiffPoly.var(name, order)


# --------------------------------------------------------------- lambda polys


class LambdaPoly:
    """``sum_k lambda^k p_k`` with DiffPoly coefficients; lambda is central."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        c = [DiffPoly.coerce(x) for x in coeffs]
        while c and c[-1].is_zero():
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def lam(cls) -> LambdaPoly:
        return cls([0, 1])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, k: int) -> DiffPoly:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else DiffPoly()

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        if isinstance(other, (DiffPoly, int, Fraction)):
            other = LambdaPoly([other])
        if not isinstance(other, LambdaPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other) -> LambdaPoly:
        other = _as_lp(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return LambdaPoly([self.coeff(k) + other.coeff(k) for k in range(n)])

    __radd__ = __add__

    def __neg__(self) -> LambdaPoly:
        return LambdaPoly([-c for c in self.coeffs])

    def __sub__(self, other) -> LambdaPoly:
        return self + (-_as_lp(other))

    def __rsub__(self, other) -> LambdaPoly:
        return _as_lp(other) - self

    def __mul__(self, other) -> LambdaPoly:
        other = _as_lp(other)
        if self.is_zero() or other.is_zero():
            return LambdaPoly()
        out = [DiffPoly()] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return LambdaPoly(out)

    __rmul__ = __mul__

    def __truediv__(self, a) -> LambdaPoly:
        return LambdaPoly([c / a for c in self.coeffs])

    def __pow__(self, k: int) -> LambdaPoly:
        out = LambdaPoly([1])
        for _ in range(k):
            out = out * self
        return out

    def d(self, times: int = 1) -> LambdaPoly:
        """Total derivative applied coefficientwise."""
        return LambdaPoly([c.d(times) for c in self.coeffs])

    def at_zero(self) -> DiffPoly:
        return self.coeff(0)

    def shift_apply(self, k: int, sign: int = 1) -> LambdaPoly:
        """``(sign*(lambda + d))^k`` applied to this polynomial, d acting on coefficients."""
        if k == 0:
            return self
        out = LambdaPoly()
        for b in range(k + 1):
            part = self.d(b)
            out = out + LambdaPoly([DiffPoly()] * (k - b) + list(part.coeffs)) * comb(k, b)
        return out * (sign ** k)

    def __repr__(self):
        return f"LambdaPoly({format_lambdapoly(self)!r})"

    def __str__(self):
        return format_lambdapoly(self)


def _as_lp(x) -> LambdaPoly:
    if isinstance(x, LambdaPoly):
        return x
    return LambdaPoly([DiffPoly.coerce(x)])


def shift_apply_diff(k: int, p: DiffPoly, sign: int = 1) -> LambdaPoly:
    """``(sign*(lambda + d))^k p`` for a DiffPoly ``p``."""
    return LambdaPoly([p]).shift_apply(k, sign)


# ------------------------------------------------------------ text syntax

_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def _mono_sort_key(item):
    m, _ = item
    return (_mono_degree(m), tuple((v, n, -e) for (v, n), e in m))


def _format_mono(m: Mono) -> str:
    parts = []
    for (v, n), e in m:
        s = v if n <= 0 else f"{v}[{n}]"
        if e != 1:
            s += f"^{e}"
        parts.append(s)
    return "*".join(parts)


def format_diffpoly(p: DiffPoly) -> str:
    if p.is_zero():
        return "0"
    out = []
    for m, a in sorted(p.terms.items(), key=_mono_sort_key):
        sign = "-" if a < 0 else "+"
        a = abs(a)
        body = _format_mono(m)
        if not body:
            s = fmt_q(a)
        elif a == 1:
            s = body
        else:
            s = f"{fmt_q(a)}*{body}"
        out.append((sign, s))
    first_sign, first = out[0]
    text = ("-" if first_sign == "-" else "") + first
    for sign, s in out[1:]:
        text += f" {sign} {s}"
    return text


def format_lambdapoly(p: LambdaPoly) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for k, c in enumerate(p.coeffs):
        if c.is_zero():
            continue
        lam = "" if k == 0 else (LAMBDA_SYMBOL if k == 1 else f"{LAMBDA_SYMBOL}^{k}")
        if not lam:
            parts.append(f"({format_diffpoly(c)})")
        else:
            parts.append(f"({format_diffpoly(c)})*{lam}")
    return " + ".join(parts)


class ParseError(ValueError):
    pass


def _evaluate(node, constants, allow_lambda):
    ev = lambda n: _evaluate(n, constants, allow_lambda)  # noqa: E731
    if isinstance(node, ast.Expression):
        return ev(node.body)
    if isinstance(node, ast.Constant):
        if isinstance(node.value, bool) or not isinstance(node.value, int):
            raise ParseError(f"unsupported literal {node.value!r}")
        return DiffPoly.const(node.value)
    if isinstance(node, ast.Name):
        name = node.id
        if name == LAMBDA_SYMBOL:
            if not allow_lambda:
                raise ParseError("lambda symbol L is not allowed here")
            return LambdaPoly.lam()
        if name in constants:
            return DiffPoly.symbol(name)
        return DiffPoly.var(name)
    if isinstance(node, ast.Subscript):
        if not isinstance(node.value, ast.Name):
            raise ParseError("only names can carry a derivative order")
        name = node.value.id
        if name in constants or name == LAMBDA_SYMBOL:
            raise ParseError(f"{name} cannot be differentiated in the text syntax")
        sl = node.slice
        if isinstance(sl, ast.Index):  # pragma: no cover - python < 3.9
            sl = sl.value
        if not (isinstance(sl, ast.Constant) and isinstance(sl.value, int) and sl.value >= 0):
            raise ParseError("derivative order must be a non-negative integer literal")
        return DiffPoly.var(name, sl.value)
    if isinstance(node, ast.UnaryOp):
        v = ev(node.operand)
        if isinstance(node.op, ast.USub):
            return -v
        if isinstance(node.op, ast.UAdd):
            return v
    if isinstance(node, ast.BinOp):
        a, b = ev(node.left), ev(node.right)
        if isinstance(node.op, ast.Add):
            return a + b
        if isinstance(node.op, ast.Sub):
            return a - b
        if isinstance(node.op, ast.Mult):
            if isinstance(a, DiffPoly) and isinstance(b, LambdaPoly):
                return b * a
            return a * b
        if isinstance(node.op, ast.Div):
            if isinstance(b, DiffPoly) and len(b.terms) == 1 and () in b.terms:
                return a / b.terms[()]
            raise ParseError("division only by nonzero rational numbers")
        if isinstance(node.op, ast.Pow):
            if isinstance(b, DiffPoly) and set(b.terms) <= {()}:
                e = b.terms.get((), Fraction(0))
                if e.denominator == 1 and e >= 0:
                    return a ** int(e)
            raise ParseError("exponent must be a non-negative integer")
    raise ParseError(f"unsupported syntax: {ast.dump(node)[:60]}")


def _parse(text: str, constants, allow_lambda):
    src = text.replace("^", "**").strip()
    if not src:
        raise ParseError("empty expression")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"cannot parse {text!r}: {exc.msg}") from None
    return _evaluate(tree, frozenset(constants), allow_lambda)


def parse_diffpoly(text: str, constants=DEFAULT_CONSTANTS) -> DiffPoly:
    out = _parse(text, constants, False)
    return DiffPoly.coerce(out)


def parse_lambdapoly(text: str, constants=DEFAULT_CONSTANTS) -> LambdaPoly:
    return _as_lp(_parse(text, constants, True))
