"""Exact rational linear algebra.

Scalars are :class:`fractions.Fraction` throughout.  Matrices are immutable
dense grids; everything here is a pure function of its inputs.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

Rational = Fraction


def Q(x) -> Fraction:
    """Coerce ints, strings like ``"3/2"`` and Fractions to a Fraction."""
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


def fmt_q(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class DimensionError(ValueError):
    pass


class RatMatrix:
    """Dense immutable matrix over the rationals."""

    __slots__ = ("rows", "nrows", "ncols", "_hash")

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None):
        data = tuple(tuple(Q(x) for x in r) for r in rows)
        if data:
            w = len(data[0])
            if any(len(r) != w for r in data):
                raise DimensionError("ragged rows")
        else:
            w = ncols or 0
        if ncols is not None and ncols != w:
            raise DimensionError("declared column count does not match the rows")
        self.rows = data
        self.nrows = len(data)
        self.ncols = w
        self._hash = None

    @classmethod
    def zero(cls, n: int, m: int | None = None) -> RatMatrix:
        m = n if m is None else m
        return cls([[0] * m for _ in range(n)], ncols=m)

    @classmethod
    def identity(cls, n: int) -> RatMatrix:
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], ncols=n)

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence], nrows: int) -> RatMatrix:
        return cls([[c[i] for c in cols] for i in range(nrows)], ncols=len(cols))

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    @property
    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list[tuple[Fraction, ...]]:
        return [self.column(j) for j in range(self.ncols)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatMatrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.shape, self.rows))
        return self._hash

    def __repr__(self):
        body = "; ".join(" ".join(fmt_q(x) for x in r) for r in self.rows)
        return f"RatMatrix({self.nrows}x{self.ncols}: [{body}])"

    def __add__(self, other: RatMatrix) -> RatMatrix:
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")
        return RatMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)],
                         ncols=self.ncols)

    def __sub__(self, other: RatMatrix) -> RatMatrix:
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch {self.shape} vs {other.shape}")
        return RatMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)],
                         ncols=self.ncols)

    def __neg__(self) -> RatMatrix:
        return RatMatrix([[-a for a in r] for r in self.rows], ncols=self.ncols)

    def scale(self, c) -> RatMatrix:
        c = Q(c)
        return RatMatrix([[c * a for a in r] for r in self.rows], ncols=self.ncols)

    def __matmul__(self, other: RatMatrix) -> RatMatrix:
        if self.ncols != other.nrows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        cols = other.columns()
        out = []
        for r in self.rows:
            nz = [(k, a) for k, a in enumerate(r) if a]
            out.append([sum((a * c[k] for k, a in nz), Fraction(0)) for c in cols])
        return RatMatrix(out, ncols=other.ncols)

    def apply(self, v: Sequence) -> tuple[Fraction, ...]:
        if len(v) != self.ncols:
            raise DimensionError("vector length does not match column count")
        nz = [(k, Q(x)) for k, x in enumerate(v) if x]
        return tuple(sum((r[k] * x for k, x in nz), Fraction(0)) for r in self.rows)

    def transpose(self) -> RatMatrix:
        return RatMatrix(self.columns(), ncols=self.nrows)

    T = property(transpose)

    def is_zero(self) -> bool:
        return all(not x for r in self.rows for x in r)

    def __pow__(self, k: int) -> RatMatrix:
        if not self.is_square or k < 0:
            raise DimensionError("power needs a square matrix and k >= 0")
        out, base = RatMatrix.identity(self.nrows), self
        while k:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    def rank(self) -> int:
        return len(_rref(self.rows, self.ncols)[1])

    def inverse(self) -> RatMatrix:
        if not self.is_square:
            raise DimensionError("inverse of a non-square matrix")
        n = self.nrows
        aug = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(self.rows)]
        red, piv = _rref(aug, 2 * n, stop_col=n)
        if len(piv) < n or piv[-1] >= n:
            raise ZeroDivisionError("matrix is singular")
        return RatMatrix([r[n:] for r in red[:n]], ncols=n)


def _rref(rows, ncols, stop_col=None):
    """Reduced row echelon form with leftmost pivots, first nonzero row swapped up."""
    m = [list(r) for r in rows]
    stop = ncols if stop_col is None else stop_col
    pivots: list[int] = []
    pr = 0
    for c in range(stop):
        sel = next((i for i in range(pr, len(m)) if m[i][c]), None)
        if sel is None:
            continue
        m[pr], m[sel] = m[sel], m[pr]
        inv = 1 / m[pr][c]
        row = [x * inv for x in m[pr]]
        m[pr] = row
        nzc = [k for k in range(c, ncols) if row[k]]
        for i in range(len(m)):
            if i != pr and m[i][c]:
                a = m[i][c]
                ri = m[i]
                for k in nzc:
                    ri[k] -= a * row[k]
        pivots.append(c)
        pr += 1
        if pr == len(m):
            break
    return m, pivots


def rref(M: RatMatrix) -> tuple[RatMatrix, list[int]]:
    red, piv = _rref(M.rows, M.ncols)
    return RatMatrix(red, ncols=M.ncols), piv


def kernel_basis(M: RatMatrix) -> list[tuple[Fraction, ...]]:
    """Basis of the null space, one vector per free column.

    The vector for free column ``j`` has a 1 in position ``j`` and zeros in
    every other free position, so the basis is the unique reduced one.
    """
    red, piv = _rref(M.rows, M.ncols)
    pivset = set(piv)
    basis = []
    for j in range(M.ncols):
        if j in pivset:
            continue
        v = [Fraction(0)] * M.ncols
        v[j] = Fraction(1)
        for r, pc in enumerate(piv):
            v[pc] = -red[r][j]
        basis.append(tuple(v))
    return basis


def solve_linear(M: RatMatrix, b: Sequence) -> tuple[Fraction, ...] | None:
    """Some ``v`` with ``M v = b`` (free coordinates zero), or ``None``."""
    if len(b) != M.nrows:
        raise DimensionError(f"right-hand side has length {len(b)}, expected {M.nrows}")
    n = M.ncols
    aug = [list(r) + [Q(x)] for r, x in zip(M.rows, b)]
    red, piv = _rref(aug, n + 1)
    if piv and piv[-1] == n:
        return None
    v = [Fraction(0)] * n
    for r, pc in enumerate(piv):
        v[pc] = red[r][n]
    return tuple(v)


def row_space_basis(vectors: Sequence[Sequence], dim: int) -> list[tuple[Fraction, ...]]:
    """Echelon normal form of the span of ``vectors``."""
    if not vectors:
        return []
    red, piv = _rref([[Q(x) for x in v] for v in vectors], dim)
    return [tuple(r) for r in red[: len(piv)]]


def span_rank(vectors: Sequence[Sequence], dim: int) -> int:
    if not vectors:
        return 0
    return len(_rref([[Q(x) for x in v] for v in vectors], dim)[1])


def in_span(v: Sequence, vectors: Sequence[Sequence], dim: int) -> bool:
    return span_rank(list(vectors) + [v], dim) == span_rank(vectors, dim)


# ---------------------------------------------------------------- polynomials


class Poly1:
    """Univariate polynomial over Q, coefficients stored low degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        c = [Q(x) for x in coeffs]
        while c and not c[-1]:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def monomial(cls, k: int, a=1) -> Poly1:
        return cls([0] * k + [a])

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def lc(self) -> Fraction:
        return self.coeffs[-1]

    def monic(self) -> Poly1:
        if self.is_zero():
            raise ZeroDivisionError("zero polynomial has no leading coefficient")
        inv = 1 / self.lc()
        return Poly1(a * inv for a in self.coeffs)

    def __eq__(self, other):
        if isinstance(other, Poly1):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other: Poly1) -> Poly1:
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return Poly1(x + y for x, y in zip(a, b))

    def __neg__(self) -> Poly1:
        return Poly1(-x for x in self.coeffs)

    def __sub__(self, other: Poly1) -> Poly1:
        return self + (-other)

    def __mul__(self, other) -> Poly1:
        if not isinstance(other, Poly1):
            return Poly1(Q(other) * x for x in self.coeffs)
        if self.is_zero() or other.is_zero():
            return Poly1()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Poly1(out)

    __rmul__ = __mul__

    def divmod(self, other: Poly1) -> tuple[Poly1, Poly1]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        dq = len(r) - len(other.coeffs)
        if dq < 0:
            return Poly1(), self
        q = [Fraction(0)] * (dq + 1)
        inv = 1 / other.lc()
        for k in range(dq, -1, -1):
            c = r[k + other.degree] * inv
            q[k] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    r[k + j] -= c * b
        return Poly1(q), Poly1(r[: other.degree])

    def __floordiv__(self, other: Poly1) -> Poly1:
        return self.divmod(other)[0]

    def __mod__(self, other: Poly1) -> Poly1:
        return self.divmod(other)[1]

    def derivative(self) -> Poly1:
        return Poly1(k * a for k, a in enumerate(self.coeffs) if k)

    def __call__(self, x):
        acc = Fraction(0)
        for a in reversed(self.coeffs):
            acc = acc * x + a
        return acc

    def eval_matrix(self, M: RatMatrix) -> RatMatrix:
        """Horner evaluation at a square matrix."""
        n = M.nrows
        acc = RatMatrix.zero(n)
        ident = RatMatrix.identity(n)
        for a in reversed(self.coeffs):
            acc = acc @ M + ident.scale(a)
        return acc

    def __repr__(self):
        return f"Poly1({self})"

    def __str__(self):
        if self.is_zero():
            return "0"
        parts = []
        for k in range(self.degree, -1, -1):
            a = self.coeffs[k]
            if not a:
                continue
            mono = "" if k == 0 else ("L" if k == 1 else f"L^{k}")
            if mono and abs(a) == 1:
                s = mono
            else:
                s = fmt_q(abs(a)) + (f"*{mono}" if mono else "")
            parts.append(("-" if a < 0 else "+", s))
        head = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        return head + "".join(f" {sg} {s}" for sg, s in parts[1:])


def poly_gcd(a: Poly1, b: Poly1) -> Poly1:
    while not b.is_zero():
        a, b = b, a % b
    return a.monic() if not a.is_zero() else a


def poly_lcm(a: Poly1, b: Poly1) -> Poly1:
    if a.is_zero() or b.is_zero():
        return Poly1()
    return ((a * b) // poly_gcd(a, b)).monic()


def squarefree_part(p: Poly1) -> Poly1:
    """Monic product of the distinct irreducible factors of ``p``."""
    if p.is_zero():
        raise ValueError("squarefree part of the zero polynomial is undefined")
    if p.degree == 0:
        return Poly1([1])
    return (p // poly_gcd(p, p.derivative())).monic()


def is_squarefree(p: Poly1) -> bool:
    return squarefree_part(p) == p.monic()


# ---------------------------------------------------------- matrix invariants


def _krylov_min_poly(M: RatMatrix, v: tuple) -> Poly1:
    """Minimal polynomial of ``M`` relative to the vector ``v``."""
    n = M.nrows
    seq = [v]
    while True:
        w = M.apply(seq[-1])
        coeffs = solve_linear(RatMatrix.from_columns(seq, n), w)
        if coeffs is not None:
            # w = sum c_k M^k v  =>  x^m - sum c_k x^k annihilates v
            return Poly1([-c for c in coeffs] + [1])
        seq.append(w)


def minimal_polynomial(M: RatMatrix) -> Poly1:
    """Monic minimal polynomial by Krylov growth on the standard basis.

    Basis vectors already in the span of the Krylov spaces built so far are
    skipped; the minimal polynomial is the lcm of the local ones.
    """
    if not M.is_square:
        raise DimensionError("minimal polynomial of a non-square matrix")
    n = M.nrows
    if n == 0:
        return Poly1([1])
    result = Poly1([1])
    span: list[tuple] = []
    for j in range(n):
        e = tuple(Fraction(int(i == j)) for i in range(n))
        if span and in_span(e, span, n):
            continue
        local = _krylov_min_poly(M, e)
        result = poly_lcm(result, local)
        w = e
        for _ in range(local.degree):
            span.append(w)
            w = M.apply(w)
        span = row_space_basis(span, n)
        if len(span) == n:
            break
    return result


def is_nilpotent_matrix(M: RatMatrix) -> bool:
    p = minimal_polynomial(M)
    return all(not a for a in p.coeffs[:-1])


def chevalley_decomposition(M: RatMatrix) -> tuple[RatMatrix, RatMatrix]:
    """Additive Jordan decomposition ``M = S + N`` with ``S``, ``N`` polynomials in ``M``.

    Newton iteration ``S <- S - p(S) p'(S)^-1`` on the squarefree part ``p``
    of the minimal polynomial converges in at most log2(multiplicity) steps.
    """
    if not M.is_square:
        raise DimensionError("Chevalley decomposition of a non-square matrix")
    p = squarefree_part(minimal_polynomial(M))
    dp = p.derivative()
    S = M
    while True:
        pS = p.eval_matrix(S)
        if pS.is_zero():
            break
        S = S - pS @ dp.eval_matrix(S).inverse()
    return S, M - S
