"""Finite-dimensional Lie algebras given by structure constants.

Algebras carry a nondegenerate invariant symmetric form (as a Gram matrix)
and, for matrix algebras, the matrices of their defining representation.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .exact import (
    Q,
    RatMatrix,
    chevalley_decomposition,
    fmt_q,
    is_squarefree,
    kernel_basis,
    minimal_polynomial,
    row_space_basis,
    solve_linear,
    span_rank,
)

SparseVec = dict  # index -> Fraction


class LieAlgebraError(ValueError):
    pass


def _axpy(acc: dict, a: Fraction, x: Mapping[int, Fraction]) -> None:
    for k, v in x.items():
        s = acc.get(k, 0) + a * v
        if s:
            acc[k] = s
        else:
            acc.pop(k, None)


class LieAlgebraSpec:
    """A Lie algebra with labeled basis, sparse structure constants and a form.

    ``structure_constants[(i, j)]`` maps ``k`` to ``c_ij^k`` for ``i < j``;
    the opposite order is implied by antisymmetry.
    """

    def __init__(
        self,
        labels: Sequence[str],
        structure_constants: Mapping[tuple[int, int], Mapping[int, Fraction]],
        form_gram: RatMatrix,
        *,
        name: str = "",
        defining_rep: Sequence[RatMatrix] | None = None,
        validate: bool = True,
    ):
        self.labels = tuple(labels)
        self.dim = len(self.labels)
        self.name = name
        sc: dict[tuple[int, int], dict[int, Fraction]] = {}
        for (i, j), vec in structure_constants.items():
            vec = {k: Q(c) for k, c in vec.items() if c}
            if not vec:
                continue
            if i == j:
                raise LieAlgebraError(f"[x{i}, x{i}] must vanish")
            if i > j:
                i, j = j, i
                vec = {k: -c for k, c in vec.items()}
            if (i, j) in sc and sc[(i, j)] != vec:
                raise LieAlgebraError(f"inconsistent structure constants for ({i},{j})")
            sc[(i, j)] = vec
        self._sc = sc
        self.form_gram = form_gram
        self.defining_rep = tuple(defining_rep) if defining_rep is not None else None
        self._index = {lab: k for k, lab in enumerate(self.labels)}
        self._ad_cache: dict = {}
        self._center = None
        self._rep_coords = None
        if form_gram.shape != (self.dim, self.dim):
            raise LieAlgebraError("Gram matrix has the wrong shape")
        if validate:
            self.validate()

    # -- basic access

    def bracket_basis(self, i: int, j: int) -> dict[int, Fraction]:
        if i == j:
            return {}
        if i < j:
            return self._sc.get((i, j), {})
        return {k: -c for k, c in self._sc.get((j, i), {}).items()}

    def structure_items(self):
        """``((i, j), {k: c})`` for ``i < j`` in sorted order."""
        return sorted(self._sc.items())

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise LieAlgebraError(f"unknown basis label {label!r}") from None

    def basis(self) -> list[LieElement]:
        return [self.basis_element(i) for i in range(self.dim)]

    def basis_element(self, i: int) -> LieElement:
        return LieElement(self, tuple(Fraction(int(k == i)) for k in range(self.dim)))

    def __getitem__(self, label: str) -> LieElement:
        return self.basis_element(self.index(label))

    def zero(self) -> LieElement:
        return LieElement(self, (Fraction(0),) * self.dim)

    def element(self, coords: Iterable) -> LieElement:
        c = tuple(Q(x) for x in coords)
        if len(c) != self.dim:
            raise LieAlgebraError(f"expected {self.dim} coordinates, got {len(c)}")
        return LieElement(self, c)

    def from_sparse(self, vec: Mapping[int, Fraction]) -> LieElement:
        c = [Fraction(0)] * self.dim
        for k, v in vec.items():
            c[k] = Q(v)
        return LieElement(self, tuple(c))

    def __repr__(self):
        return f"LieAlgebraSpec({self.name or 'unnamed'}, dim={self.dim})"

    # -- invariants

    def validate(self) -> None:
        """Check Jacobi, symmetry, nondegeneracy and invariance of the form."""
        n = self.dim
        for i, j, k in itertools.combinations(range(n), 3):
            acc: dict = {}
            for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
                for m, v in self.bracket_basis(a, b).items():
                    _axpy(acc, v, self.bracket_basis(m, c))
            if acc:
                raise LieAlgebraError(
                    f"Jacobi identity fails on ({self.labels[i]}, {self.labels[j]}, {self.labels[k]})")
        G = self.form_gram
        if G != G.T:
            raise LieAlgebraError("invariant form is not symmetric")
        if G.rank() != n:
            raise LieAlgebraError("invariant form is degenerate")
        # ([x_i, x_j] | x_k) + (x_j | [x_i, x_k]) == 0
        for i in range(n):
            for j in range(n):
                bij = self.bracket_basis(i, j)
                for k in range(j, n):
                    s = sum((c * G[m, k] for m, c in bij.items()), Fraction(0))
                    s += sum((c * G[j, m] for m, c in self.bracket_basis(i, k).items()), Fraction(0))
                    if s:
                        raise LieAlgebraError(
                            f"form is not invariant on ({self.labels[i]}, {self.labels[j]}, {self.labels[k]})")

    # -- derived structure

    def ad_matrix_basis(self, i: int) -> RatMatrix:
        if i not in self._ad_cache:
            cols = []
            for j in range(self.dim):
                col = [Fraction(0)] * self.dim
                for k, c in self.bracket_basis(i, j).items():
                    col[k] = c
                cols.append(col)
            self._ad_cache[i] = RatMatrix.from_columns(cols, self.dim)
        return self._ad_cache[i]

    def form(self, x: LieElement, y: LieElement) -> Fraction:
        G = self.form_gram
        return sum((a * G[i, j] * b for i, a in x.items() for j, b in y.items()), Fraction(0))

    def killing_gram(self) -> RatMatrix:
        ads = [self.ad_matrix_basis(i) for i in range(self.dim)]
        rows = []
        for i in range(self.dim):
            rows.append([_trace_prod(ads[i], ads[j]) for j in range(self.dim)])
        return RatMatrix(rows, ncols=self.dim)

    def center(self) -> list[LieElement]:
        if self._center is None:
            stacked = []
            for j in range(self.dim):
                stacked.extend((-self.ad_matrix_basis(j)).rows)
            M = RatMatrix(stacked, ncols=self.dim)
            self._center = [self.element(v) for v in kernel_basis(M)]
        return list(self._center)

    # -- matrix algebras

    def matrix_of(self, x: LieElement) -> RatMatrix:
        if self.defining_rep is None:
            raise LieAlgebraError(f"{self!r} has no defining representation")
        n = self.defining_rep[0].nrows
        acc = RatMatrix.zero(n)
        for i, c in x.items():
            acc = acc + self.defining_rep[i].scale(c)
        return acc

    def element_from_matrix(self, M: RatMatrix) -> LieElement:
        if self.defining_rep is None:
            raise LieAlgebraError(f"{self!r} has no defining representation")
        if self._rep_coords is None:
            from .exact import rref
            n = self.defining_rep[0].nrows
            flat = RatMatrix([[x for r in B.rows for x in r] for B in self.defining_rep], ncols=n * n)
            _, piv = rref(flat)
            if len(piv) != self.dim:
                raise LieAlgebraError("defining representation is not faithful")
            B = RatMatrix([[flat[k, p] for k in range(self.dim)] for p in piv], ncols=self.dim)
            self._rep_coords = (piv, B.inverse())
        piv, Binv = self._rep_coords
        n = M.ncols
        x = self.element(Binv.apply([M[divmod(p, n)] for p in piv]))
        if self.matrix_of(x) != M:
            raise LieAlgebraError("matrix does not lie in the algebra")
        return x

    # -- serialization

    def to_json(self) -> str:
        """``{dim, labels, sc: [[i,j,k,num,den],...], gram: [["p/q",...],...]}``."""
        sc = [[i, j, k, c.numerator, c.denominator]
              for (i, j), vec in self.structure_items() for k, c in sorted(vec.items())]
        gram = [[fmt_q(x) for x in r] for r in self.form_gram.rows]
        return json.dumps({"dim": self.dim, "labels": list(self.labels), "sc": sc, "gram": gram})

    @classmethod
    def from_json(cls, text: str, *, name: str = "", validate: bool = True) -> LieAlgebraSpec:
        data = json.loads(text)
        sc: dict = {}
        for i, j, k, num, den in data["sc"]:
            sc.setdefault((i, j), {})[k] = Fraction(num, den)
        gram = RatMatrix([[Fraction(x) for x in r] for r in data["gram"]], ncols=data["dim"])
        if len(data["labels"]) != data["dim"]:
            raise LieAlgebraError("label count does not match dim")
        return cls(data["labels"], sc, gram, name=name, validate=validate)


def _trace_prod(A: RatMatrix, B: RatMatrix) -> Fraction:
    n = A.nrows
    return sum((A[i, k] * B[k, i] for i in range(n) for k in range(n) if A[i, k]), Fraction(0))


@dataclass(frozen=True, eq=False)
class LieElement:
    parent: LieAlgebraSpec
    coords: tuple

    def items(self):
        return ((i, c) for i, c in enumerate(self.coords) if c)

    def sparse(self) -> dict[int, Fraction]:
        return dict(self.items())

    def _check(self, other: LieElement) -> None:
        if other.parent is not self.parent:
            raise LieAlgebraError("elements belong to different algebras")

    def __add__(self, other: LieElement) -> LieElement:
        self._check(other)
        return LieElement(self.parent, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: LieElement) -> LieElement:
        self._check(other)
        return LieElement(self.parent, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> LieElement:
        return LieElement(self.parent, tuple(-a for a in self.coords))

    def __mul__(self, c) -> LieElement:
        c = Q(c)
        return LieElement(self.parent, tuple(c * a for a in self.coords))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, LieElement):
            return NotImplemented
        return self.parent is other.parent and self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __repr__(self):
        if self.is_zero():
            return "0"
        labels = self.parent.labels
        out = []
        for i, c in self.items():
            s = labels[i] if c == 1 else (f"-{labels[i]}" if c == -1 else f"{fmt_q(c)}*{labels[i]}")
            out.append(s)
        return " + ".join(out).replace("+ -", "- ")


# ------------------------------------------------------------------ operations


def bracket(x: LieElement, y: LieElement) -> LieElement:
    x._check(y)
    alg = x.parent
    acc: dict = {}
    for i, a in x.items():
        for j, b in y.items():
            if i != j:
                _axpy(acc, a * b, alg.bracket_basis(i, j))
    return alg.from_sparse(acc)


def ad_matrix(x: LieElement) -> RatMatrix:
    alg = x.parent
    acc = RatMatrix.zero(alg.dim)
    for i, c in x.items():
        acc = acc + alg.ad_matrix_basis(i).scale(c)
    return acc


def _operator(x: LieElement) -> RatMatrix:
    """Matrix used for Jordan-type questions: the defining representation if any, else ad."""
    alg = x.parent
    return alg.matrix_of(x) if alg.defining_rep is not None else ad_matrix(x)


def is_nilpotent_elem(x: LieElement) -> bool:
    p = minimal_polynomial(_operator(x))
    return all(not a for a in p.coeffs[:-1])


def is_semisimple_elem(x: LieElement) -> bool:
    return is_squarefree(minimal_polynomial(_operator(x)))


def jordan_decomposition_elem(x: LieElement) -> tuple[LieElement, LieElement]:
    """``(x_s, x_n)``, the semisimple and nilpotent parts of ``x``.

    Matrix algebras decompose in the defining representation (the parts of a
    matrix in sl, so or sp stay in it).  Abstract algebras decompose ``ad x``
    and pull the semisimple part back through ``ad``, which needs a trivial
    center.
    """
    alg = x.parent
    if alg.defining_rep is not None:
        Sm, Nm = chevalley_decomposition(alg.matrix_of(x))
        if Nm.is_zero():
            return x, alg.zero()
        xs = alg.element_from_matrix(Sm)
        return xs, x - xs
    S, N = chevalley_decomposition(ad_matrix(x))
    if N.is_zero():
        return x, alg.zero()
    if alg.center():
        raise LieAlgebraError("Jordan decomposition through ad needs a trivial center")
    xs = _preimage_of_ad(alg, S)
    return xs, x - xs


def _preimage_of_ad(alg: LieAlgebraSpec, S: RatMatrix) -> LieElement:
    """Solve ``ad y = S`` column by column until ``y`` is pinned down."""
    rows: list = []
    rhs: list = []
    for j in range(alg.dim):
        # ad(y) e_j = [y, x_j] = -ad(x_j) y
        rows.extend((-alg.ad_matrix_basis(j)).rows)
        rhs.extend(S.column(j))
        M = RatMatrix(rows, ncols=alg.dim)
        if M.rank() == alg.dim or j == alg.dim - 1:
            sol = solve_linear(M, rhs)
            break
    if sol is None:
        raise LieAlgebraError("semisimple part of ad x is not inner")
    y = alg.element(sol)
    if ad_matrix(y) != S:
        raise LieAlgebraError("semisimple part of ad x is not inner")
    return y


def centralizer(x: LieElement, subspace: Sequence[LieElement]) -> list[LieElement]:
    """Echelon basis of ``{v in span(subspace) : [x, v] = 0}``."""
    alg = x.parent
    for s in subspace:
        x._check(s)
    if not subspace:
        return []
    cols = [bracket(x, s).coords for s in subspace]
    ker = kernel_basis(RatMatrix.from_columns(cols, alg.dim))
    vecs = []
    for c in ker:
        v = [Fraction(0)] * alg.dim
        for a, s in zip(c, subspace):
            if a:
                for i, b in s.items():
                    v[i] += a * b
        vecs.append(v)
    return [alg.element(v) for v in row_space_basis(vecs, alg.dim)]


def span_basis(elems: Sequence[LieElement]) -> list[LieElement]:
    if not elems:
        return []
    alg = elems[0].parent
    return [alg.element(v) for v in row_space_basis([e.coords for e in elems], alg.dim)]


def elements_rank(elems: Sequence[LieElement]) -> int:
    if not elems:
        return 0
    return span_rank([e.coords for e in elems], elems[0].parent.dim)


# ------------------------------------------------------------------ builders


def _sparse_mat(n: int, entries: Mapping[tuple[int, int], Fraction]) -> dict:
    return {k: Q(v) for k, v in entries.items() if v}


def _sparse_commutator(A: dict, B: dict) -> dict:
    out: dict = {}
    for (i, k), a in A.items():
        for (k2, j), b in B.items():
            if k == k2:
                out[(i, j)] = out.get((i, j), 0) + a * b
    for (i, k), b in B.items():
        for (k2, j), a in A.items():
            if k == k2:
                out[(i, j)] = out.get((i, j), 0) - b * a
    return {k: v for k, v in out.items() if v}


def _sparse_trace_prod(A: dict, B: dict) -> Fraction:
    s = Fraction(0)
    for (i, k), a in A.items():
        b = B.get((k, i))
        if b:
            s += a * b
    return s


def matrix_algebra(labels: Sequence[str], mats: Sequence[Mapping[tuple[int, int], Fraction]], n: int,
                   *, name: str = "", form_scale=1, validate: bool = True) -> LieAlgebraSpec:
    """Build a matrix Lie algebra from sparse ``n x n`` basis matrices.

    Structure constants come from commutators; the form is the trace form of
    the defining representation times ``form_scale``.
    """
    mats = [_sparse_mat(n, m) for m in mats]
    dim = len(mats)
    # coordinates are read off a set of pivot entries where the basis is invertible
    flat_rows = [[m.get((r, c), Fraction(0)) for r in range(n) for c in range(n)] for m in mats]
    red = RatMatrix(flat_rows, ncols=n * n)
    from .exact import rref
    _, piv = rref(red)
    if len(piv) != dim:
        raise LieAlgebraError("basis matrices are linearly dependent")
    positions = [divmod(p, n) for p in piv]
    B = RatMatrix([[m.get(pos, Fraction(0)) for m in mats] for pos in positions], ncols=dim)
    Binv = B.inverse()

    def coords(M: dict) -> dict[int, Fraction]:
        rhs = [M.get(pos, Fraction(0)) for pos in positions]
        vec = dict((k, v) for k, v in enumerate(Binv.apply(rhs)) if v)
        recon: dict = {}
        for k, v in vec.items():
            for key, a in mats[k].items():
                recon[key] = recon.get(key, 0) + v * a
        if {k: v for k, v in recon.items() if v} != M:
            raise LieAlgebraError("commutator left the span of the basis")
        return vec

    sc = {}
    for i in range(dim):
        for j in range(i + 1, dim):
            C = _sparse_commutator(mats[i], mats[j])
            if C:
                sc[(i, j)] = coords(C)
    s = Q(form_scale)
    gram = RatMatrix([[s * _sparse_trace_prod(mats[i], mats[j]) for j in range(dim)] for i in range(dim)],
                     ncols=dim)
    rep = [RatMatrix([[m.get((r, c), 0) for c in range(n)] for r in range(n)], ncols=n) for m in mats]
    return LieAlgebraSpec(labels, sc, gram, name=name, defining_rep=rep, validate=validate)


def build_gl(n: int) -> LieAlgebraSpec:
    if n < 1:
        raise LieAlgebraError("gl_n needs n >= 1")
    labels, mats = [], []
    for i in range(n):
        for j in range(n):
            labels.append(f"E{i + 1}{j + 1}" if n < 10 else f"E{i + 1}_{j + 1}")
            mats.append({(i, j): Fraction(1)})
    return matrix_algebra(labels, mats, n, name=f"gl{n}")


def build_sl(n: int) -> LieAlgebraSpec:
    """sl_n with basis: E_ij (i<j), H_i = E_ii - E_{i+1,i+1}, E_ji (i<j).

    For n = 2 this is the ordered basis (e, h, f).
    """
    if not isinstance(n, int) or n < 2:
        raise LieAlgebraError("sl_n needs an integer n >= 2")
    sep = "" if n < 10 else "_"
    pos = [(i, j) for i in range(n) for j in range(i + 1, n)]
    labels, mats = [], []
    for i, j in pos:
        labels.append(f"E{i + 1}{sep}{j + 1}")
        mats.append({(i, j): Fraction(1)})
    for i in range(n - 1):
        labels.append(f"H{i + 1}")
        mats.append({(i, i): Fraction(1), (i + 1, i + 1): Fraction(-1)})
    for i, j in pos:
        labels.append(f"E{j + 1}{sep}{i + 1}")
        mats.append({(j, i): Fraction(1)})
    if n == 2:
        labels = ["e", "h", "f"]
    return matrix_algebra(labels, mats, n, name=f"sl{n}")


def build_sp(n: int) -> LieAlgebraSpec:
    """sp_n (n even) as ``{A : A^T J + J A = 0}`` with ``J = [[0, I], [-I, 0]]``."""
    if not isinstance(n, int) or n < 2 or n % 2:
        raise LieAlgebraError("sp_n needs an even integer n >= 2")
    m = n // 2
    labels, mats = [], []
    for i in range(m):
        for j in range(m):
            labels.append(f"A{i + 1}_{j + 1}")
            mats.append({(i, j): Fraction(1), (m + j, m + i): Fraction(-1)})
    for i in range(m):
        for j in range(i, m):
            labels.append(f"B{i + 1}_{j + 1}")
            mats.append({(i, m + j): Fraction(1), (j, m + i): Fraction(1)} if i != j
                        else {(i, m + i): Fraction(1)})
    for i in range(m):
        for j in range(i, m):
            labels.append(f"C{i + 1}_{j + 1}")
            mats.append({(m + i, j): Fraction(1), (m + j, i): Fraction(1)} if i != j
                        else {(m + i, i): Fraction(1)})
    return matrix_algebra(labels, mats, n, name=f"sp{n}")


# ---------------------------------------------------------------- so_N blocks

Index = tuple  # (a, i, j), all 1-based


def normalize_partition(partition) -> list[tuple[int, int]]:
    """Accept ``[3, 2, 2]`` or ``[(3, 1), (2, 2)]``; return ``[(part, multiplicity), ...]``.

    Parts come out strictly decreasing.
    """
    items = list(partition)
    if not items:
        raise LieAlgebraError("empty partition")
    if all(isinstance(p, int) for p in items):
        if any(p <= 0 for p in items):
            raise LieAlgebraError(f"partition parts must be positive: {items}")
        counts: dict[int, int] = {}
        for p in items:
            counts[p] = counts.get(p, 0) + 1
        return sorted(counts.items(), reverse=True)
    try:
        pairs = [(int(p), int(r)) for p, r in items]
    except (TypeError, ValueError):
        raise LieAlgebraError(f"malformed partition {partition!r}") from None
    if any(p <= 0 or r <= 0 for p, r in pairs):
        raise LieAlgebraError(f"malformed partition {partition!r}")
    parts = [p for p, _ in pairs]
    if parts != sorted(set(parts), reverse=True):
        raise LieAlgebraError("parts must be strictly decreasing in (part, multiplicity) form")
    return pairs


def orthogonal_partitions(n: int) -> list[list[int]]:
    """Partitions of ``n`` in which every even part has even multiplicity (nilpotent orbits of so_n)."""
    out = []

    def rec(rest, largest, acc):
        if rest == 0:
            counts = {}
            for p in acc:
                counts[p] = counts.get(p, 0) + 1
            if all(r % 2 == 0 for p, r in counts.items() if p % 2 == 0):
                out.append(list(acc))
            return
        for p in range(min(rest, largest), 0, -1):
            rec(rest - p, p, acc + [p])

    rec(n, n, [])
    return out


def partition_parts(partition) -> list[int]:
    return [p for p, r in normalize_partition(partition) for _ in range(r)]


@dataclass(frozen=True)
class SoNIndexing:
    """Index set, involution and signs for so_N in the block basis."""

    partition: tuple  # ((p_a, r_a), ...)
    index: tuple  # I, lexicographic
    prime: dict = field(repr=False)
    eps: dict = field(repr=False)

    @property
    def N(self) -> int:
        return len(self.index)

    def position(self, alpha: Index) -> int:
        return self._pos[alpha]

    def __post_init__(self):
        object.__setattr__(self, "_pos", {a: k for k, a in enumerate(self.index)})

    @classmethod
    def from_partition(cls, partition) -> SoNIndexing:
        pr = tuple(normalize_partition(partition))
        odd = [p for p, r in pr if p % 2 == 0 and r % 2]
        if odd:
            raise LieAlgebraError(f"even parts {odd} of an orthogonal partition need even multiplicity")
        index = tuple((a + 1, i, j) for a, (p, r) in enumerate(pr)
                      for i in range(1, r + 1) for j in range(1, p + 1))
        prime, eps = {}, {}
        for a, i, j in index:
            p, r = pr[a - 1]
            prime[(a, i, j)] = (a, r + 1 - i, p + 1 - j)
            if i <= math.ceil(r / 2):
                eps[(a, i, j)] = (-1) ** ((i - 1) * p + j)
            else:
                eps[(a, i, j)] = -((-1) ** ((i - 1) * p + j + r))
        return cls(pr, index, prime, eps)

    def form_matrix(self) -> RatMatrix:
        """Gram matrix of ``<e_a|e_b> = -delta_{a,b'} eps_a``."""
        n = self.N
        rows = [[0] * n for _ in range(n)]
        for al in self.index:
            rows[self.position(al)][self.position(self.prime[al])] = -self.eps[al]
        return RatMatrix(rows, ncols=n)

    def elementary(self, alpha: Index, beta: Index) -> dict:
        return {(self.position(alpha), self.position(beta)): Fraction(1)}

    def F_matrix(self, alpha: Index, beta: Index) -> dict:
        """Sparse matrix of ``F_ab = E_ab - eps_a eps_b E_{b'a'}``."""
        out: dict = {}
        k1 = (self.position(alpha), self.position(beta))
        k2 = (self.position(self.prime[beta]), self.position(self.prime[alpha]))
        out[k1] = out.get(k1, 0) + 1
        out[k2] = out.get(k2, 0) - self.eps[alpha] * self.eps[beta]
        return {k: Fraction(v) for k, v in out.items() if v}

    def canonical_pairs(self) -> list[tuple[Index, Index]]:
        """One representative ``(a, b)`` per line ``F_ab ~ F_{b'a'}``, lexicographic."""
        reps = set()
        for al in self.index:
            for be in self.index:
                if be == self.prime[al]:
                    continue  # F_{a a'} = 0
                other = (self.prime[be], self.prime[al])
                reps.add(min((al, be), other))
        return sorted(reps)


def _idx_str(a: Index) -> str:
    return ",".join(str(x) for x in a)


def build_so_from_partition(partition, *, validate: bool = True) -> tuple[LieAlgebraSpec, SoNIndexing]:
    """so_N realized as ``{A : A^dagger = -A}`` for the form attached to a partition.

    The basis consists of the elements ``F_ab`` for the canonical pairs, and the
    invariant form is the trace form of the defining representation.
    """
    ix = SoNIndexing.from_partition(partition)
    if ix.N < 3:
        raise LieAlgebraError("so_N needs N >= 3")
    pairs = ix.canonical_pairs()
    labels = [f"F({_idx_str(a)}|{_idx_str(b)})" for a, b in pairs]
    mats = [ix.F_matrix(a, b) for a, b in pairs]
    alg = matrix_algebra(labels, mats, ix.N, name=f"so{ix.N}", validate=validate)
    return alg, ix


def F_element(alg: LieAlgebraSpec, ix: SoNIndexing, alpha: Index, beta: Index) -> LieElement:
    """``F_ab`` as an element (possibly zero or a multiple of a basis element)."""
    if beta == ix.prime[alpha]:
        return alg.zero()
    m = ix.F_matrix(alpha, beta)
    n = ix.N
    return alg.element_from_matrix(RatMatrix([[m.get((r, c), 0) for c in range(n)] for r in range(n)], ncols=n))


def F_bracket_formula(alg: LieAlgebraSpec, ix: SoNIndexing, a, b, c, e) -> LieElement:
    """``[F_ab, F_ce]`` expanded from the four-delta commutation relation."""
    eps, pr = ix.eps, ix.prime
    out = alg.zero()
    if c == b:
        out = out + F_element(alg, ix, a, e)
    if e == a:
        out = out - F_element(alg, ix, c, b)
    if pr[a] == c:
        out = out - F_element(alg, ix, pr[b], e) * (eps[a] * eps[b])
    if e == pr[b]:
        out = out + F_element(alg, ix, c, pr[a]) * (eps[a] * eps[b])
    return out


# --------------------------------------------------------------------- G2

G2_POSITIVE = [(1, 0), (0, 1), (1, 1), (1, 2), (1, 3), (2, 3)]  # coefficients on (alpha, beta)


def _g2_root_label(c: tuple[int, int]) -> str:
    a, b = c
    neg = a < 0 or b < 0
    a, b = abs(a), abs(b)
    parts = []
    if a:
        parts.append("a" if a == 1 else f"{a}a")
    if b:
        parts.append("b" if b == 1 else f"{b}b")
    return "-" + "-".join(parts) if neg else "+".join(parts)


def _split_g2_matrices() -> list[dict]:
    """Basis of the stabilizer in gl_7 of the split 3-form.

    Coordinates x0, x1, x2, x3, x-1, x-2, x-3 (indices 0..6); the form is
    x0^(x1^x-1 + x2^x-2 + x3^x-3) + x1^x2^x3 + x-1^x-2^x-3.
    """
    phi = {(0, 1, 4): 1, (0, 2, 5): 1, (0, 3, 6): 1, (1, 2, 3): 1, (4, 5, 6): 1}
    triples = list(itertools.combinations(range(7), 3))
    tpos = {t: k for k, t in enumerate(triples)}

    def sign(t):
        s = 1
        for x, y in itertools.combinations(t, 2):
            if x > y:
                s = -s
        return s

    cols = []
    for p in range(7):
        for q in range(7):
            col = [0] * len(triples)
            for t, c in phi.items():
                for slot in range(3):
                    if t[slot] != p:
                        continue
                    t2 = list(t)
                    t2[slot] = q
                    if len(set(t2)) < 3:
                        continue
                    col[tpos[tuple(sorted(t2))]] -= c * sign(t2)
            cols.append(col)
    ker = kernel_basis(RatMatrix.from_columns(cols, len(triples)))
    return [{divmod(k, 7): v for k, v in enumerate(vec) if v} for vec in ker]


def build_g2() -> LieAlgebraSpec:
    """Split G2 in a Chevalley basis, realized in its 7-dimensional representation.

    Positive root vectors are fixed by the pairs (a, b), (b, a+b), (b, a+2b),
    (a, a+3b): ``e_{g+d} = [e_g, e_d] / (r + 1)``, and negative ones by
    ``e_{-g-d} = -[e_{-g}, e_{-d}] / (r + 1)``.  Simple root vectors are scaled
    so their first nonzero matrix entry (row-major) is 1.  The invariant form
    is the Killing form divided by 8 (twice the dual Coxeter number), so
    long root vectors pair to 1 and short ones to 3.
    """
    mats = _split_g2_matrices()
    if len(mats) != 14:
        raise LieAlgebraError("3-form stabilizer is not 14-dimensional")
    # Cartan subalgebra: diagonal elements diag(0, t1, t2, -t1-t2, -t1, -t2, t1+t2)
    d1 = [0, 1, 0, -1, -1, 0, 1]
    d2 = [0, 0, 1, -1, 0, -1, 1]

    def weight(p, q):
        return (d1[p] - d1[q], d2[p] - d2[q])

    spaces: dict = {}
    for m in mats:
        comp: dict = {}
        for (p, q), v in m.items():
            comp.setdefault(weight(p, q), {})[(p, q)] = Fraction(v)
        for w, part in comp.items():
            if w != (0, 0):
                spaces.setdefault(w, []).append(part)
    roots = {}
    for w, parts in spaces.items():
        keys = sorted({k for p in parts for k in p})
        basis = row_space_basis([[p.get(k, 0) for k in keys] for p in parts], len(keys))
        if len(basis) != 1:
            raise LieAlgebraError("G2 root space is not one-dimensional")
        roots[w] = {k: v for k, v in zip(keys, basis[0]) if v}

    def as_rat(m):
        return RatMatrix([[m.get((r, c), 0) for c in range(7)] for r in range(7)], ncols=7)

    def comm(A, B):
        return _sparse_commutator(A, B)

    def scal(c, A):
        return {k: Q(c) * v for k, v in A.items()}

    def eval_weight(w, h):
        # root w evaluated on a diagonal element h (stored as sparse diag)
        t1 = h.get((1, 1), 0) - 0
        t2 = h.get((2, 2), 0)
        return w[0] * t1 + w[1] * t2

    # positivity by a regular functional; simple roots by indecomposability
    pos = [w for w in roots if 7 * w[0] + 3 * w[1] > 0]
    simple = [w for w in pos if not any((w[0] - v[0], w[1] - v[1]) in pos for v in pos)]
    if len(simple) != 2:
        raise LieAlgebraError("could not find two simple roots")

    def coroot(w):
        h = comm(roots[w], roots[(-w[0], -w[1])])
        return scal(Fraction(2) / eval_weight(w, h), h)

    def cartan_int(w, v):  # <w, v^vee>
        return eval_weight(w, coroot(v))

    s0, s1 = simple
    # alpha is long: <beta, alpha^vee> = -1 and <alpha, beta^vee> = -3
    alpha, beta = (s0, s1) if cartan_int(s0, s1) == -3 else (s1, s0)

    def root_of(c):
        return (c[0] * alpha[0] + c[1] * beta[0], c[0] * alpha[1] + c[1] * beta[1])

    def first_entry_one(m):
        k = min(m)
        return scal(1 / m[k], m)

    e: dict = {}
    e[(1, 0)] = first_entry_one(roots[alpha])
    e[(0, 1)] = first_entry_one(roots[beta])
    for c in ((1, 0), (0, 1)):
        w = root_of(c)
        h = coroot(w)
        raw = roots[(-w[0], -w[1])]
        prod = comm(e[c], raw)
        k = next(iter(h))
        e[(-c[0], -c[1])] = scal(h[k] / prod[k], raw)
    chain = [((1, 0), (0, 1), 0), ((0, 1), (1, 1), 1), ((0, 1), (1, 2), 2), ((1, 0), (1, 3), 0)]
    for g, d, r in chain:
        s = (g[0] + d[0], g[1] + d[1])
        e[s] = scal(Fraction(1, r + 1), comm(e[g], e[d]))
        e[(-s[0], -s[1])] = scal(Fraction(-1, r + 1), comm(e[(-g[0], -g[1])], e[(-d[0], -d[1])]))
    h_a, h_b = coroot(alpha), coroot(beta)
    order = G2_POSITIVE + [None, None] + [(-a, -b) for a, b in G2_POSITIVE]
    labels, basis = [], []
    for k, c in enumerate(order):
        if c is None:
            labels.append("h(a)" if k == 6 else "h(b)")
            basis.append(h_a if k == 6 else h_b)
        else:
            labels.append(f"e({_g2_root_label(c)})")
            basis.append(e[c])
    tmp = matrix_algebra(labels, basis, 7, name="g2", validate=False)
    gram = tmp.killing_gram().scale(Fraction(1, 8))
    sc = dict(tmp.structure_items())
    return LieAlgebraSpec(labels, sc, gram, name="g2", defining_rep=tmp.defining_rep)


def g2_root_element(alg: LieAlgebraSpec, coeffs: tuple[int, int]) -> LieElement:
    return alg[f"e({_g2_root_label(coeffs)})"]
