"""sl2-triples, Dynkin gradings, the skew form on g_{1/2}, and integrable triples."""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exact import Poly1, RatMatrix, fmt_q, kernel_basis, minimal_polynomial, row_space_basis, span_rank
from .liealg import (
    LieAlgebraError,
    LieAlgebraSpec,
    LieElement,
    SoNIndexing,
    F_element,
    ad_matrix,
    bracket,
    centralizer,
    elements_rank,
    is_nilpotent_elem,
    is_semisimple_elem,
    jordan_decomposition_elem,
    normalize_partition,
    span_basis,
)

HALF = Fraction(1, 2)


class TripleError(ValueError):
    pass


def half_int(x) -> Fraction:
    q = Fraction(x)
    if q.denominator not in (1, 2):
        raise TripleError(f"{x} is not a half-integer")
    return q


# ------------------------------------------------------------- sl2-triples


@dataclass(frozen=True)
class Sl2Triple:
    e: LieElement
    h: LieElement
    f: LieElement

    def __post_init__(self):
        ok = (bracket(self.e, self.f) == self.h and bracket(self.h, self.e) == self.e * 2
              and bracket(self.h, self.f) == self.f * -2)
        if not ok:
            raise TripleError("elements do not satisfy the sl2 relations")

    @property
    def parent(self) -> LieAlgebraSpec:
        return self.e.parent


def _block_index(partition) -> list[tuple[int, int, int]]:
    pr = normalize_partition(partition)
    return [(a + 1, i, j) for a, (p, r) in enumerate(pr) for i in range(1, r + 1) for j in range(1, p + 1)]


def _block_matrices(index, parts):
    """Sparse (f, h, e) matrices for the block index scheme."""
    pos = {al: k for k, al in enumerate(index)}
    f, h, e = {}, {}, {}
    for a, i, j in index:
        p = parts[a - 1]
        h[(pos[(a, i, j)], pos[(a, i, j)])] = Fraction(p + 1 - 2 * j)
        if j != p:
            f[(pos[(a, i, j + 1)], pos[(a, i, j)])] = Fraction(1)
            e[(pos[(a, i, j)], pos[(a, i, j + 1)])] = Fraction(j * (p - j))
    return f, h, e


def _dense(n, sparse) -> RatMatrix:
    return RatMatrix([[sparse.get((r, c), 0) for c in range(n)] for r in range(n)], ncols=n)


def sl2_from_partition(alg: LieAlgebraSpec, partition, ix: SoNIndexing | None = None) -> Sl2Triple:
    """The standard triple attached to a partition.

    ``f`` shifts each Jordan block down, ``h`` is diagonal with entries
    ``p_a + 1 - 2j`` and ``e = sum j (p_a - j) E_{(a,i,j),(a,i,j+1)}``.  For
    so_N pass the :class:`SoNIndexing` the algebra was built with; for sl_n
    the block indices are laid out in lexicographic order.
    """
    if alg.defining_rep is None:
        raise TripleError("sl2_from_partition needs a matrix algebra")
    pr = normalize_partition(partition)
    if ix is not None:
        if tuple(pr) != tuple(ix.partition):
            raise TripleError("partition does not match the so_N indexing")
        index = list(ix.index)
    else:
        index = _block_index(pr)
    n = alg.defining_rep[0].nrows
    if len(index) != n:
        raise TripleError(f"partition of {len(index)} does not fit a {n}-dimensional representation")
    parts = [p for p, _ in pr]
    fs, hs, es = _block_matrices(index, parts)
    try:
        f, h, e = (alg.element_from_matrix(_dense(n, m)) for m in (fs, hs, es))
    except LieAlgebraError as exc:
        raise TripleError(f"partition does not give elements of {alg!r}: {exc}") from None
    return Sl2Triple(e, h, f)


def sl2_from_root(alg: LieAlgebraSpec, positive_label: str, negative_label: str) -> Sl2Triple:
    """``(e_g, [e_g, e_-g], e_-g)`` for a pair of Chevalley basis vectors."""
    e, f = alg[positive_label], alg[negative_label]
    return Sl2Triple(e, bracket(e, f), f)


# ------------------------------------------------------------------ gradings


def _integer_roots(p) -> list[int]:
    """Integer roots of a monic polynomial with integer eigenvalues, or raise."""
    roots = []
    q = p
    bound = max((abs(c) for c in p.coeffs), default=1)
    bound = int(bound) + 1
    for k in range(-bound, bound + 1):
        while q.degree > 0 and q(k) == 0:
            roots.append(k)
            q = q // Poly1([-k, 1])
    if q.degree > 0:
        raise TripleError("ad(h) has an eigenvalue outside (1/2)Z; the triple is corrupted")
    return sorted(set(roots))


class DynkinGrading:
    """Eigenspace decomposition of ``ad(h/2)`` with its half-integer degrees."""

    def __init__(self, triple: Sl2Triple):
        self.triple = triple
        alg = triple.parent
        self.alg = alg
        H = ad_matrix(triple.h)
        n = alg.dim
        if all(H[i, j] == 0 for i in range(n) for j in range(n) if i != j):
            diag = {H[i, i] for i in range(n)}
            if any(x.denominator != 1 for x in diag):
                raise TripleError("ad(h) has an eigenvalue outside (1/2)Z; the triple is corrupted")
            eig = sorted(int(x) for x in diag)
        else:
            eig = _integer_roots(minimal_polynomial(H))
        pieces: dict[Fraction, list[LieElement]] = {}
        for lam in eig:
            shifted = H - RatMatrix.identity(alg.dim).scale(lam)
            vecs = kernel_basis(shifted)
            if vecs:
                pieces[Fraction(lam, 2)] = [alg.element(v) for v in row_space_basis(vecs, alg.dim)]
        total = sum(len(v) for v in pieces.values())
        if total != alg.dim:
            raise TripleError("ad(h) is not diagonalizable")
        self.pieces = dict(sorted(pieces.items()))
        self.depth = max(self.pieces)
        # change of basis to graded coordinates
        self._order = [(k, b) for k, bs in self.pieces.items() for b in bs]
        P = RatMatrix.from_columns([b.coords for _, b in self._order], alg.dim)
        self._to_graded = P.inverse()

    @property
    def f(self) -> LieElement:
        return self.triple.f

    def dim(self, k) -> int:
        return len(self.pieces.get(Fraction(k), []))

    def piece(self, k) -> list[LieElement]:
        return list(self.pieces.get(Fraction(k), []))

    def degrees(self) -> list[Fraction]:
        return list(self.pieces)

    def ge(self, k) -> list[LieElement]:
        return [b for deg, bs in self.pieces.items() if deg >= k for b in bs]

    def gt(self, k) -> list[LieElement]:
        return [b for deg, bs in self.pieces.items() if deg > k for b in bs]

    def le(self, k) -> list[LieElement]:
        return [b for deg, bs in self.pieces.items() if deg <= k for b in bs]

    def components(self, x: LieElement) -> dict[Fraction, LieElement]:
        c = self._to_graded.apply(x.coords)
        out: dict = {}
        for (deg, b), a in zip(self._order, c):
            if a:
                out[deg] = out[deg] + b * a if deg in out else b * a
        return out

    def degree_of(self, x: LieElement) -> Fraction | None:
        """Degree of a nonzero homogeneous element, ``None`` otherwise."""
        comps = self.components(x)
        return next(iter(comps)) if len(comps) == 1 else None

    def graded_coords(self, x: LieElement) -> tuple:
        return self._to_graded.apply(x.coords)

    def to_dict(self) -> dict:
        return {
            "algebra": self.alg.name,
            "depth": fmt_q(self.depth),
            "triple": {k: [fmt_q(c) for c in getattr(self.triple, k).coords] for k in ("e", "h", "f")},
            "pieces": {fmt_q(k): [[fmt_q(c) for c in b.coords] for b in bs] for k, bs in self.pieces.items()},
        }

    def __repr__(self):
        dims = ", ".join(f"{fmt_q(k)}:{len(v)}" for k, v in self.pieces.items())
        return f"DynkinGrading(depth={fmt_q(self.depth)}, dims={{{dims}}})"


def grading_from(triple: Sl2Triple) -> DynkinGrading:
    return DynkinGrading(triple)


# ----------------------------------------------------------- the skew form


def omega_form(grading: DynkinGrading) -> RatMatrix:
    """Gram matrix of ``omega(a, b) = (f | [a, b])`` on the stored basis of g_{1/2}."""
    alg, f = grading.alg, grading.f
    basis = grading.piece(HALF)
    rows = [[alg.form(f, bracket(a, b)) for b in basis] for a in basis]
    W = RatMatrix(rows, ncols=len(basis))
    if W.rank() != len(basis):
        raise TripleError("omega is degenerate on g_1/2; grading and form are inconsistent")
    return W


def _check_in_half(subspace, grading):
    half = grading.piece(HALF)
    n = len(half)
    for s in subspace:
        if not s.is_zero() and grading.degree_of(s) != HALF:
            raise TripleError(f"{s!r} does not lie in g_1/2")
    return half, n


def omega_orthocomplement(subspace: Sequence[LieElement], grading: DynkinGrading) -> list[LieElement]:
    """Echelon basis of ``{a in g_1/2 : omega(a, s) = 0 for all s in subspace}``."""
    half, n = _check_in_half(subspace, grading)
    if not half:
        return []
    alg, f = grading.alg, grading.f
    subspace = [s for s in subspace if not s.is_zero()]
    if not subspace:
        return span_basis(half)
    rows = [[alg.form(f, bracket(a, s)) for a in half] for s in subspace]
    ker = kernel_basis(RatMatrix(rows, ncols=n))
    vecs = []
    for c in ker:
        v = alg.zero()
        for a, b in zip(c, half):
            if a:
                v = v + b * a
        vecs.append(v)
    return span_basis(vecs)


def is_isotropic(subspace: Sequence[LieElement], grading: DynkinGrading) -> bool:
    _check_in_half(subspace, grading)
    alg, f = grading.alg, grading.f
    return all(alg.form(f, bracket(a, b)) == 0 for a in subspace for b in subspace)


def is_coisotropic(subspace: Sequence[LieElement], grading: DynkinGrading) -> bool:
    """True iff the omega-orthocomplement of ``subspace`` is contained in it."""
    perp = omega_orthocomplement(subspace, grading)
    if not perp:
        return True
    dim = grading.alg.dim
    base = [s.coords for s in subspace if not s.is_zero()]
    r = span_rank(base, dim)
    return span_rank(base + [p.coords for p in perp], dim) == r


# ----------------------------------------------------- cyclic elements


@dataclass(frozen=True)
class PerturbationClass:
    kind: str  # cyclic | quasicyclic | invalid
    element_type: str  # semisimple | nilpotent | mixed
    degree: Fraction | None = None


def element_type(x: LieElement) -> str:
    xs, xn = jordan_decomposition_elem(x)
    if xn.is_zero():
        return "semisimple"
    if xs.is_zero():
        return "nilpotent"
    return "mixed"


def e_centralizer_coisotropic(E: LieElement, grading: DynkinGrading) -> bool:
    return is_coisotropic(centralizer(E, grading.piece(HALF)), grading)


def classify_perturbation(f: LieElement, E: LieElement, grading: DynkinGrading,
                          *, with_type: bool = True) -> PerturbationClass:
    deg = None if E.is_zero() else grading.degree_of(E)
    if not E.is_zero() and deg is None:
        raise TripleError("E is not homogeneous")
    d = grading.depth
    if deg == d:
        kind = "cyclic"
    elif deg is not None and deg == d - HALF and e_centralizer_coisotropic(E, grading):
        kind = "quasicyclic"
    else:
        kind = "invalid"
    etype = element_type(f + E) if with_type else ""
    return PerturbationClass(kind, etype, deg)


def nilpotent_type_test(grading: DynkinGrading) -> bool:
    """Nilpotent type iff the depth is not an integer."""
    return grading.depth.denominator != 1


@dataclass(frozen=True)
class ProbeVerdict:
    nilpotent_type: bool  # True: every sampled cyclic element was nilpotent
    trials: int
    witness: LieElement | None = None

    @property
    def message(self) -> str:
        if self.nilpotent_type:
            return "all sampled cyclic elements nilpotent"
        return "not nilpotent type"


def random_element(basis: Sequence[LieElement], rng: random.Random, bound: int = 5) -> LieElement:
    values = [v for v in range(-bound, bound + 1) if v]
    out = basis[0].parent.zero()
    for b in basis:
        out = out + b * rng.choice(values)
    return out


def nilpotent_type_probe(f: LieElement, grading: DynkinGrading, trials: int = 10, seed: int = 0,
                         bound: int = 5) -> ProbeVerdict:
    """Sample random ``E`` in g_d and stop at the first non-nilpotent ``f + E``."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = random.Random(seed)
    top = grading.piece(grading.depth)
    for t in range(1, trials + 1):
        E = random_element(top, rng, bound)
        if not is_nilpotent_elem(f + E):
            return ProbeVerdict(False, t, E)
    return ProbeVerdict(True, trials)


# ---------------------------------------------------------- reduction data


@dataclass(frozen=True)
class ReductionData:
    l: tuple
    l_perp: tuple
    m: tuple
    n: tuple
    p: tuple

    def to_dict(self) -> dict:
        return {k: [[fmt_q(c) for c in x.coords] for x in getattr(self, k)] for k in ("l", "l_perp", "m", "n", "p")}


def _complete(base: list[LieElement], pool: list[LieElement]) -> list[LieElement]:
    """Greedily add elements of ``pool`` (in order) until ``base`` spans span(base + pool)."""
    added = []
    cur = [b.coords for b in base]
    dim = pool[0].parent.dim if pool else 0
    r = span_rank(cur, dim)
    for x in pool:
        if span_rank(cur + [x.coords], dim) > r:
            cur.append(x.coords)
            added.append(x)
            r += 1
    return added


def reduction_data(grading: DynkinGrading, l: Sequence[LieElement]) -> ReductionData:
    """Assemble ``m = l + g_>=1``, ``n = l_perp + g_>=1`` and the complement ``p``.

    ``p = g_<=0 + p_1/2`` where ``p_1/2`` is obtained by completing a basis of
    ``l`` with the stored basis vectors of g_1/2, in order.
    """
    l = span_basis([x for x in l if not x.is_zero()])
    if not is_isotropic(l, grading):
        raise TripleError("l is not isotropic for omega")
    l_perp = omega_orthocomplement(l, grading)
    g_ge1 = grading.ge(1)
    m = tuple(l) + tuple(g_ge1)
    n = tuple(l_perp) + tuple(g_ge1)
    p_half = _complete(list(l), grading.piece(HALF))
    p = tuple(grading.le(0)) + tuple(p_half)
    if elements_rank(list(m) + list(p)) != grading.alg.dim:
        raise TripleError("m and p are not complementary")
    return ReductionData(tuple(l), tuple(l_perp), m, n, p)


def isotropic_for(E: LieElement, grading: DynkinGrading) -> list[LieElement]:
    """``l`` with ``l_perp`` equal to the centralizer of ``E`` in g_1/2."""
    z = centralizer(E, grading.piece(HALF))
    return omega_orthocomplement(z, grading)


# -------------------------------------------------------- integrable triples


@dataclass(frozen=True)
class IntegrableTriple:
    f1: LieElement
    f2: LieElement
    E: LieElement
    grading: DynkinGrading
    reduction: ReductionData

    @property
    def f(self) -> LieElement:
        return self.f1 + self.f2

    @property
    def alg(self) -> LieAlgebraSpec:
        return self.E.parent

    @property
    def E_degree(self) -> Fraction:
        return self.grading.degree_of(self.E)

    def to_dict(self) -> dict:
        return {
            "algebra": self.alg.name,
            "labels": list(self.alg.labels),
            "f1": [fmt_q(c) for c in self.f1.coords],
            "f2": [fmt_q(c) for c in self.f2.coords],
            "E": [fmt_q(c) for c in self.E.coords],
            "E_degree": fmt_q(self.E_degree),
            "grading": self.grading.to_dict(),
            "reduction": self.reduction.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def make_integrable_triple(f1: LieElement, f2: LieElement, E: LieElement, grading: DynkinGrading,
                           l: Sequence[LieElement] | None = None) -> IntegrableTriple:
    """Bundle a candidate triple with its reduction data (no validation)."""
    if l is None:
        l = isotropic_for(E, grading)
    return IntegrableTriple(f1, f2, E, grading, reduction_data(grading, l))


@dataclass
class CheckReport:
    """Per-condition outcome; ``ok`` is the conjunction of the conditions (i)-(iii)."""

    conditions: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)
    messages: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(self.conditions.values())

    def failed(self) -> list[str]:
        return [k for k, v in self.conditions.items() if not v]

    def __str__(self):
        lines = [f"{k}: {'pass' if v else 'FAIL'}" for k, v in {**self.conditions, **self.extras}.items()]
        return "\n".join(lines + self.messages)


def integrable_triple_check(t: IntegrableTriple) -> CheckReport:
    g = t.grading
    rep = CheckReport()
    f = g.f
    f1, f2, E = t.f1, t.f2, t.E
    in_m1 = all(x.is_zero() or g.degree_of(x) == -1 for x in (f1, f2))
    comm12 = bracket(f1, f2).is_zero()
    rep.conditions["(i)"] = bool(f1 + f2 == f and in_m1 and comm12)
    if not rep.conditions["(i)"]:
        rep.messages.append("(i): need f = f1 + f2 with f1, f2 in g_-1 and [f1, f2] = 0")

    deg = None if E.is_zero() else g.degree_of(E)
    homogeneous = deg is not None and deg >= HALF
    kills_ge1 = all(bracket(E, y).is_zero() for y in g.ge(1))
    cois = homogeneous and e_centralizer_coisotropic(E, g)
    rep.conditions["(ii)"] = bool(homogeneous and kills_ge1 and cois)
    if not homogeneous:
        rep.messages.append("(ii): E must be a nonzero homogeneous element of positive degree")

    ss = is_semisimple_elem(f1 + E)
    comm2E = bracket(f2, E).is_zero()
    rep.conditions["(iii)"] = bool(ss and comm2E)

    rep.extras["E degree in {d, d-1/2}"] = deg in (g.depth, g.depth - HALF)
    rep.extras["f+E non-nilpotent"] = not is_nilpotent_elem(f + E)
    rep.extras["E central in n"] = all(bracket(E, y).is_zero() for y in t.reduction.n)
    rep.extras["l_perp = centralizer of E in g_1/2"] = (
        homogeneous and _same_span(list(t.reduction.l_perp), centralizer(E, g.piece(HALF))))
    return rep


def _same_span(a: list[LieElement], b: list[LieElement]) -> bool:
    return [x.coords for x in span_basis(a)] == [x.coords for x in span_basis(b)]


# -------------------------------------------------------- so_N construction


def so_nilpotent_type_pattern(partition) -> bool:
    pr = normalize_partition(partition)
    if len(pr) < 2:
        return False
    (p1, r1), (p2, r2) = pr[0], pr[1]
    return p1 % 2 == 1 and r1 == 1 and p2 == p1 - 1 and r2 % 2 == 0


def so_integrable_triple(partition, *, alg=None, ix=None) -> IntegrableTriple:
    """Integrable triple for a nilpotent-type partition ``(p+1, p^r2, ...)`` of so_N.

    ``f1`` is the lowering operator of the first block, ``f2 = f - f1``,
    ``E = F_{(1,1,1),(1,1,p)}`` and ``l`` is spanned by ``F_{(1,1,1),(2,i,1)}``.
    """
    if not so_nilpotent_type_pattern(partition):
        raise TripleError(f"partition {partition!r} is not of the form (p+1, p^even, ...) with p even")
    if alg is None:
        from .liealg import build_so_from_partition
        alg, ix = build_so_from_partition(partition)
    triple = sl2_from_partition(alg, partition, ix)
    g = grading_from(triple)
    (p, r2) = ix.partition[1]
    n = ix.N
    f1m = {(ix.position((1, 1, j + 1)), ix.position((1, 1, j))): Fraction(1) for j in range(1, p + 1)}
    f1 = alg.element_from_matrix(_dense(n, f1m))
    f2 = triple.f - f1
    E = F_element(alg, ix, (1, 1, 1), (1, 1, p))
    l = [F_element(alg, ix, (1, 1, 1), (2, i, 1)) for i in range(1, r2 + 1)]
    return IntegrableTriple(f1, f2, E, g, reduction_data(g, l))


def so_centralizer_span(alg, ix) -> list[LieElement]:
    """Spanning set of the centralizer of E in g_1/2 for the so_N construction.

    ``F_{(1,1,j),(2,i,j)}`` for ``j < p`` plus the part of g_1/2 inside blocks >= 2.
    """
    (p, r2) = ix.partition[1]
    out = [F_element(alg, ix, (1, 1, j), (2, i, j)) for i in range(1, r2 + 1) for j in range(1, p)]
    parts = {a + 1: pa for a, (pa, _) in enumerate(ix.partition)}
    for al, be in ix.canonical_pairs():
        a, b = al[0], be[0]
        if a >= 2 and b >= 2 and Fraction(parts[a] - parts[b], 2) - al[2] + be[2] == HALF:
            out.append(F_element(alg, ix, al, be))
    return out


# ---------------------------------------------------------- element search


def _candidates(basis: list[LieElement], rng: random.Random, random_samples: int, bound: int):
    for b in basis:
        yield b
    n = len(basis)
    for k in (1, 2):
        for idx in itertools.combinations(range(n), k):
            for signs in itertools.product((1, -1), repeat=k):
                if k == 1 and signs[0] == 1:
                    continue  # already tried as a basis element
                x = basis[0].parent.zero()
                for i, s in zip(idx, signs):
                    x = x + basis[i] * s
                yield x
    for _ in range(random_samples):
        yield random_element(basis, rng, bound)


def find_integrable_element(f: LieElement, grading: DynkinGrading, degree_choice: str = "d", *,
                            seed: int = 0, random_samples: int = 200, bound: int = 5,
                            strategy: str = "default") -> LieElement | None:
    """First ``E`` (deterministic search order) giving an integrable triple, else ``None``.

    ``degree_choice`` is ``"d"`` or ``"d-1/2"``.  Candidates are the basis of
    the chosen piece, then 0/+-1 combinations with at most two nonzero
    coordinates, then random samples.  ``None`` is not a nonexistence proof.
    """
    if strategy != "default":
        raise ValueError(f"unknown search strategy {strategy!r}")
    k = grading.depth if degree_choice == "d" else grading.depth - HALF
    if degree_choice not in ("d", "d-1/2"):
        raise ValueError("degree_choice must be 'd' or 'd-1/2'")
    basis = grading.piece(k)
    if not basis:
        raise TripleError(f"g_{fmt_q(k)} is zero")
    rng = random.Random(seed)
    seen = set()
    for E in _candidates(basis, rng, random_samples, bound):
        if E.coords in seen:
            continue
        seen.add(E.coords)
        if classify_perturbation(f, E, grading, with_type=False).kind == "invalid":
            continue
        s, nil = jordan_decomposition_elem(f + E)
        if not (nil.is_zero() or grading.degree_of(nil) == -1):
            continue
        t = make_integrable_triple(f - nil, nil, E, grading)
        if integrable_triple_check(t).ok:
            return E
    return None


def find_quasicyclic(f: LieElement, grading: DynkinGrading, *, seed: int = 0, random_samples: int = 200,
                     bound: int = 5) -> LieElement | None:
    """First ``E`` in g_{d-1/2} (same search order) whose g_1/2-centralizer is coisotropic."""
    basis = grading.piece(grading.depth - HALF)
    if not basis:
        return None
    rng = random.Random(seed)
    for E in _candidates(basis, rng, random_samples, bound):
        if classify_perturbation(f, E, grading, with_type=False).kind == "quasicyclic":
            return E
    return None
