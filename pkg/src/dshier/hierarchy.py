"""Gauge normalization of ``d + f + zE + q`` and the conserved densities it produces.

Loop elements ``x (x) z^m`` are stored on the graded basis of g as a dict
``{(b, m): DiffPoly}``; the degree of a key is ``deg(x_b) + m * zdeg`` with
``zdeg = -k - 1`` and ``k`` the degree of ``E``.  ``d`` acts on coefficients.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Mapping, Sequence

from .diffpoly import DiffPoly, dsum, format_diffpoly
from .exact import RatMatrix, fmt_q, kernel_basis, row_space_basis, span_rank
from .grading import HALF, IntegrableTriple, integrable_triple_check
from .liealg import LieElement, bracket
from .pva import LocalFunctional, functional_eq, functional_is_zero, random_diffpoly


class HierarchyError(ValueError):
    pass


class WindowTooSmall(HierarchyError):
    pass


Series = dict  # {(b, m): DiffPoly}


def _add_into(acc: Series, key, p: DiffPoly):
    s = acc.get(key)
    s = p if s is None else s + p
    if s.is_zero():
        acc.pop(key, None)
    else:
        acc[key] = s


def series_add(*xs: Series) -> Series:
    out: Series = {}
    for x in xs:
        for k, v in x.items():
            _add_into(out, k, v)
    return out


def series_scale(x: Series, a) -> Series:
    a = Fraction(a)
    return {} if not a else {k: v.scale(a) for k, v in x.items()}


def series_d(x: Series) -> Series:
    out = {}
    for k, v in x.items():
        dv = v.d()
        if not dv.is_zero():
            out[k] = dv
    return out


# ----------------------------------------------------------------- grading


class ZGrading:
    """The grading of ``g[z, z^-1]`` with ``deg z = -k - 1``."""

    def __init__(self, triple: IntegrableTriple):
        g = triple.grading
        self.triple = triple
        self.grading = g
        self.alg = g.alg
        self.k = triple.E_degree
        if self.k is None or self.k < HALF:
            raise HierarchyError("E must be homogeneous of positive degree")
        self.zdeg = -self.k - 1
        self.basis = [b for _, b in g._order]
        self.bdeg = [deg for deg, _ in g._order]
        self.dim = len(self.basis)
        # structure constants on the graded basis
        self.sc: dict = {}
        for i, x in enumerate(self.basis):
            for j, y in enumerate(self.basis):
                c = g.graded_coords(bracket(x, y))
                entries = tuple((r, a) for r, a in enumerate(c) if a)
                if entries:
                    self.sc[(i, j)] = entries
        gram = [[self.alg.form(x, y) for y in self.basis] for x in self.basis]
        self.gram = {(i, j): a for i, row in enumerate(gram) for j, a in enumerate(row) if a}

    def degree(self, key) -> Fraction:
        b, m = key
        return self.bdeg[b] + m * self.zdeg

    def keys_of_degree(self, i) -> list[tuple[int, int]]:
        """Basis ``(b, m)`` of the degree-``i`` component, ordered by ``(m, b)``."""
        i = Fraction(i)
        out = []
        for b, s in enumerate(self.bdeg):
            q = (i - s) / self.zdeg
            if q.denominator == 1:
                out.append((b, int(q)))
        return sorted(out, key=lambda t: (t[1], t[0]))

    def constant(self, x: LieElement, m: int = 0) -> Series:
        """``x (x) z^m`` with rational coefficients."""
        c = self.grading.graded_coords(x)
        return {(b, m): DiffPoly.const(a) for b, a in enumerate(c) if a}

    def bracket(self, X: Series, Y: Series, top=None) -> Series:
        """Loop bracket, dropping keys of degree > ``top``."""
        out: Series = {}
        ydeg = {k: self.degree(k) for k in Y}
        for (b1, m1), p1 in X.items():
            d1 = self.degree((b1, m1))
            for (b2, m2), p2 in Y.items():
                if top is not None and d1 + ydeg[(b2, m2)] > top:
                    continue
                sc = self.sc.get((b1, b2))
                if not sc:
                    continue
                prod = p1 * p2
                if prod.is_zero():
                    continue
                for r, a in sc:
                    _add_into(out, (r, m1 + m2), prod.scale(a))
        return out

    def pairing(self, X: Series, Y: Series) -> dict[int, DiffPoly]:
        """``(X | Y)`` as ``{z-power: DiffPoly}``."""
        out: dict = {}
        for (b1, m1), p1 in X.items():
            for (b2, m2), p2 in Y.items():
                a = self.gram.get((b1, b2))
                if a:
                    s = out.get(m1 + m2, DiffPoly()) + (p1 * p2).scale(a)
                    out[m1 + m2] = s
        return {m: v for m, v in out.items() if not v.is_zero()}

    def truncate(self, X: Series, top) -> Series:
        return {k: v for k, v in X.items() if self.degree(k) <= top}

    def component(self, X: Series, i) -> Series:
        return {k: v for k, v in X.items() if self.degree(k) == i}

    def to_vector(self, X: Series, keys) -> list[DiffPoly]:
        return [X.get(k, DiffPoly()) for k in keys]


def exp_ad(zg: ZGrading, U: Series, X: Series, top) -> Series:
    """``e^{ad U}(d + X) - d`` through degree ``top``; ``U`` must have positive degrees."""
    if any(zg.degree(k) <= 0 for k in U):
        raise HierarchyError("gauge elements must have positive degree")
    acc = zg.truncate(X, top)
    term = acc
    n = 1
    while term:
        term = series_scale(zg.bracket(U, term, top), Fraction(1, n))
        acc = series_add(acc, term)
        n += 1
    # -sum_{n>=1} (ad U)^{n-1} U' / n!
    t = zg.truncate(series_d(U), top)
    n = 1
    while t:
        acc = series_add(acc, series_scale(t, Fraction(-1, factorial(n))))
        t = zg.bracket(U, t, top)
        n += 1
    return acc


# ------------------------------------------------------------------ splits


def _apply(M: RatMatrix, vec: Sequence[DiffPoly]) -> list[DiffPoly]:
    out = []
    for r in range(M.nrows):
        row = M.rows[r]
        out.append(dsum(vec[c].scale(a) for c, a in enumerate(row) if a and not vec[c].is_zero()))
    return out


@dataclass
class DegreeSplit:
    degree: Fraction
    keys: list
    h_basis: list  # coordinate vectors in ``keys``
    perp_basis: list
    proj_h: RatMatrix  # W_i -> W_i
    solve_U: RatMatrix  # W_i -> W_{i+1}


class HSplit:
    """``h = ker ad(f1 + zE)`` and ``h_perp = im ad(f1 + zE)``, degree by degree."""

    def __init__(self, zg: ZGrading):
        self.zg = zg
        t = zg.triple
        self.lam1 = series_add(zg.constant(t.f1), zg.constant(t.E, 1))
        self.lam = series_add(zg.constant(t.f), zg.constant(t.E, 1))
        self._cache: dict = {}

    def _ad_matrix(self, L: Series, src, dst) -> RatMatrix:
        """Matrix of ``ad L`` from span(src keys) to span(dst keys)."""
        pos = {k: r for r, k in enumerate(dst)}
        cols = []
        for k in src:
            img = self.zg.bracket(L, {k: DiffPoly.const(1)})
            col = [Fraction(0)] * len(dst)
            for kk, v in img.items():
                if kk not in pos:
                    raise HierarchyError("ad does not lower degree by one")
                col[pos[kk]] = v.terms.get((), Fraction(0))
            cols.append(col)
        return RatMatrix.from_columns(cols, len(dst)) if src else RatMatrix.zero(len(dst), 0)

    def spaces(self, i):
        """(keys, h basis, h_perp basis) at degree ``i``."""
        i = Fraction(i)
        keys = self.zg.keys_of_degree(i)
        n = len(keys)
        if n == 0:
            return keys, [], []
        down = self._ad_matrix(self.lam1, keys, self.zg.keys_of_degree(i - 1))
        h = row_space_basis(kernel_basis(down), n) if down.ncols else []
        up_keys = self.zg.keys_of_degree(i + 1)
        if up_keys:
            up = self._ad_matrix(self.lam1, up_keys, keys)
            perp = row_space_basis(up.columns(), n)
        else:
            perp = []
        if len(h) + len(perp) != n or span_rank(h + perp, n) != n:
            raise HierarchyError(f"kernel and image of ad(f1+zE) do not split degree {fmt_q(i)}; "
                                 "f1 + zE is not semisimple")
        return keys, h, perp

    def split(self, i) -> DegreeSplit:
        i = Fraction(i)
        if i in self._cache:
            return self._cache[i]
        keys, h, perp = self.spaces(i)
        n = len(keys)
        up_keys, _, perp_up = self.spaces(i + 1)
        if n == 0:
            ds = DegreeSplit(i, keys, [], [], RatMatrix.zero(0, 0), RatMatrix.zero(len(up_keys), 0))
            self._cache[i] = ds
            return ds
        B = RatMatrix.from_columns(h + perp, n)
        Binv = B.inverse()
        nh = len(h)
        Hcols = RatMatrix.from_columns(h, n) if h else RatMatrix.zero(n, 0)
        proj_h = Hcols @ RatMatrix(Binv.rows[:nh], ncols=n) if h else RatMatrix.zero(n)
        if perp:
            # ad(lam): h_perp_{i+1} -> h_perp_i, in the chosen bases
            Aup = self._ad_matrix(self.lam, up_keys, keys)
            imgs = [Aup.apply(v) for v in perp_up]
            coords = [Binv.apply(w) for w in imgs]
            if any(any(c[:nh]) for c in coords):
                raise HierarchyError("ad(f + zE) does not preserve the image part")
            M = RatMatrix.from_columns([c[nh:] for c in coords], len(perp))
            try:
                Minv = M.inverse()
            except ZeroDivisionError:
                raise HierarchyError(f"ad(f + zE) is not invertible on h_perp at degree {fmt_q(i)}") from None
            P = RatMatrix.from_columns(perp_up, len(up_keys))
            solve_U = P @ Minv @ RatMatrix(Binv.rows[nh:], ncols=n)
        else:
            solve_U = RatMatrix.zero(len(up_keys), n)
        ds = DegreeSplit(i, keys, h, perp, proj_h, solve_U)
        self._cache[i] = ds
        return ds


def h_split(triple: IntegrableTriple, zg: ZGrading | None, i) -> tuple[list, list]:
    """Bases of the kernel and image parts at degree ``i`` as series."""
    zg = zg or ZGrading(triple)
    keys, h, perp = HSplit(zg).spaces(i)
    as_series = lambda vs: [{k: DiffPoly.const(a) for k, a in zip(keys, v) if a} for v in vs]  # noqa: E731
    return as_series(h), as_series(perp)


def solve_hk(A: Series, split: HSplit, i) -> tuple[Series, Series]:
    """Unique ``(h_i, U_{i+1})`` with ``h_i + [f + zE, U_{i+1}] = A``."""
    zg = split.zg
    i = Fraction(i)
    if any(zg.degree(k) != i for k in A):
        raise HierarchyError("A is not homogeneous of the stated degree")
    ds = split.split(i)
    if not ds.keys:
        return {}, {}
    vec = zg.to_vector(A, ds.keys)
    hv = _apply(ds.proj_h, vec)
    uv = _apply(ds.solve_U, vec)
    up_keys = zg.keys_of_degree(i + 1)
    h = {k: v for k, v in zip(ds.keys, hv) if not v.is_zero()}
    U = {k: v for k, v in zip(up_keys, uv) if not v.is_zero()}
    return h, U


# --------------------------------------------------------------- variables


def q_element(triple: IntegrableTriple, zg: ZGrading | None = None, prefix: str = "q"
              ) -> tuple[Series, list[str], list[LieElement]]:
    """``q = sum_i u_i (x) q^i`` with ``(q^j | q_i) = delta_ij`` and ``q^i`` in m-perp.

    Returns the series, the variable names and the dual basis.
    """
    zg = zg or ZGrading(triple)
    alg = zg.alg
    p = list(triple.reduction.p)
    m = list(triple.reduction.m)
    rows = [[alg.form(x, b) for b in alg.basis()] for x in m]
    mperp = [alg.element(v) for v in kernel_basis(RatMatrix(rows, ncols=alg.dim))] if m else alg.basis()
    if len(mperp) != len(p):
        raise HierarchyError("m-perp and p have different dimensions")
    G = RatMatrix([[alg.form(w, qi) for qi in p] for w in mperp], ncols=len(p))
    try:
        C = G.inverse().transpose()
    except ZeroDivisionError:
        raise HierarchyError("the pairing between p and m-perp is degenerate") from None
    dual = []
    for i in range(len(p)):
        x = alg.zero()
        for j, w in enumerate(mperp):
            if C[i, j]:
                x = x + w * C[i, j]
        dual.append(x)
    names = [f"{prefix}{i + 1}" for i in range(len(p))]
    q: Series = {}
    for name, x in zip(names, dual):
        for key, c in zg.constant(x).items():
            _add_into(q, key, DiffPoly.var(name) * c)
    return q, names, dual


# ------------------------------------------------------------------ results


@dataclass
class HierarchyResult:
    triple: IntegrableTriple
    zg: ZGrading
    split: HSplit
    max_degree: Fraction
    variables: list
    variable_labels: list
    q: Series
    U: Series  # degrees 1/2 .. max_degree + 1
    h: Series  # degrees -1/2 .. max_degree
    gauge: list = field(default_factory=list)  # S_1, S_2, ... applied after U
    seeds: list = field(default_factory=list)

    @property
    def chain(self) -> list[Series]:
        return [self.U] + list(self.gauge)

    def h_component(self, i) -> Series:
        return self.zg.component(self.h, Fraction(i))

    def degrees(self, X: Series) -> list[Fraction]:
        return sorted({self.zg.degree(k) for k in X})

    def to_dict(self, densities: Sequence | None = None) -> dict:
        zg = self.zg

        def ser(X):
            return [{"basis": b, "z": m, "degree": fmt_q(zg.degree((b, m))), "coeff": format_diffpoly(v)}
                    for (b, m), v in sorted(X.items(), key=lambda kv: (zg.degree(kv[0]), kv[0][1], kv[0][0]))]

        out = {
            "algebra": zg.alg.name,
            "triple": self.triple.to_dict(),
            "E_degree": fmt_q(zg.k),
            "z_degree": fmt_q(zg.zdeg),
            "max_degree": fmt_q(self.max_degree),
            "graded_basis": [{"degree": fmt_q(d), "coords": [fmt_q(c) for c in b.coords]}
                             for d, b in zip(zg.bdeg, zg.basis)],
            "variables": [{"name": n, "p_element": [fmt_q(c) for c in x.coords]}
                          for n, x in zip(self.variables, self.variable_labels)],
            "U": ser(self.U),
            "h": ser(self.h),
            "gauge_steps": len(self.gauge),
            "seeds": list(self.seeds),
        }
        if densities is not None:
            out["densities"] = [{"n": n, "z_power": zp, "density": format_diffpoly(F.density)}
                                for n, (zp, F) in enumerate(densities)]
        return out

    def to_json(self, densities=None) -> str:
        return json.dumps(self.to_dict(densities), indent=1, sort_keys=True)


def _lam_series(zg: ZGrading) -> Series:
    t = zg.triple
    return series_add(zg.constant(t.f), zg.constant(t.E, 1))


def solve_recursion(triple: IntegrableTriple, max_degree=4, *, check: bool = True) -> HierarchyResult:
    """Solve ``e^{ad U}(d + f + zE + q) = d + f + zE + h`` degree by degree through ``max_degree``."""
    max_degree = Fraction(max_degree)
    if max_degree < HALF or (2 * max_degree).denominator != 1:
        raise HierarchyError("max_degree must be a half-integer >= 1/2")
    if check:
        rep = integrable_triple_check(triple)
        if not rep.ok:
            raise HierarchyError(f"not an integrable triple: failed {rep.failed()}")
    zg = ZGrading(triple)
    split = HSplit(zg)
    q, names, _ = q_element(triple, zg)
    lam = _lam_series(zg)
    base = series_add(lam, q)
    U: Series = {}
    h: Series = {}
    i = -HALF
    while i <= max_degree:
        if zg.keys_of_degree(i):
            A = zg.component(exp_ad(zg, U, base, i), i)
            hi, Ui = solve_hk(A, split, i)
            h.update(hi)
            U.update(Ui)
        i += HALF
    return HierarchyResult(triple, zg, split, max_degree, names, list(triple.reduction.p), q, U, h)


def _apply_chain(result: HierarchyResult, X: Series, top) -> Series:
    """``X`` after the gauge chain (``d`` implicit)."""
    for G in result.chain:
        X = exp_ad(result.zg, G, X, top)
    return X


def residual(result: HierarchyResult, top=None) -> Series:
    """``e^{ad S_k}...e^{ad U}(d + f + zE + q) - (d + f + zE + h)`` through ``top``."""
    zg = result.zg
    top = result.max_degree if top is None else Fraction(top)
    lhs = _apply_chain(result, series_add(_lam_series(zg), result.q), top)
    rhs = series_add(_lam_series(zg), zg.truncate(result.h, top))
    return series_add(lhs, series_scale(rhs, -1))


def check_grading_bookkeeping(result: HierarchyResult) -> bool:
    zg = result.zg
    return (all(zg.degree(k) > -1 for k in result.h) and all(zg.degree(k) > 0 for k in result.U)
            and all(_in_h(result, zg.component(result.h, d)) for d in result.degrees(result.h)))


def _in_h(result: HierarchyResult, X: Series) -> bool:
    zg = result.zg
    for d in sorted({zg.degree(k) for k in X}):
        comp = zg.component(X, d)
        ds = result.split.split(d)
        vec = zg.to_vector(comp, ds.keys)
        if _apply(ds.proj_h, vec) != vec:
            return False
    return True


def check_h_closed(split: HSplit, degrees: Sequence) -> bool:
    """``[h_i, h_j]`` lies in ``h_{i+j}`` for basis elements over the given degrees."""
    zg = split.zg
    bases = {}
    for d in degrees:
        keys, hb, _ = split.spaces(d)
        bases[Fraction(d)] = [{k: DiffPoly.const(a) for k, a in zip(keys, v) if a} for v in hb]
    for i, Xi in bases.items():
        for j, Xj in bases.items():
            for x in Xi:
                for y in Xj:
                    br = zg.bracket(x, y)
                    if not br:
                        continue
                    ds = split.split(i + j)
                    vec = zg.to_vector(br, ds.keys)
                    if _apply(ds.proj_h, vec) != vec:
                        return False
    return True


# --------------------------------------------------------------- densities


def default_a(result: HierarchyResult) -> Series:
    t = result.triple
    zg = result.zg
    return series_add(zg.constant(t.f1), zg.constant(t.E, 1))


def center_check(a: Series, result: HierarchyResult, window=None) -> bool:
    """``[a, x] = 0`` for the h-basis over degrees up to ``window`` and ``[a, f2] = 0``."""
    zg = result.zg
    if any(v.variables() for v in a.values()):
        raise HierarchyError("a must have constant coefficients")
    window = result.max_degree if window is None else Fraction(window)
    if zg.bracket(a, zg.constant(result.triple.f2)):
        return False
    d = -Fraction(1)
    while d <= window:
        keys, hb, _ = result.split.spaces(d)
        for v in hb:
            x = {k: DiffPoly.const(c) for k, c in zip(keys, v) if c}
            if zg.bracket(a, x):
                return False
        d += HALF
    return True


def _a_degrees(zg: ZGrading, a: Series) -> list[Fraction]:
    return sorted({zg.degree(k) for k in a})


def density_top(result: HierarchyResult, a: Series) -> int:
    """Largest z-power ``N`` whose coefficient in ``(a | h)`` is a nonzero functional."""
    coeffs = _density_coeffs(result, a, None)
    nz = [m for m, F in coeffs.items() if not functional_is_zero(F)]
    if not nz:
        raise HierarchyError("all densities in the window vanish")
    return max(nz)


def _density_coeffs(result: HierarchyResult, a: Series, want) -> dict[int, DiffPoly]:
    """z-power -> density, for the z-powers fully determined by the window."""
    zg = result.zg
    degs = _a_degrees(zg, a)
    out = {}
    pair = zg.pairing(a, result.h)
    # the z^M coefficient needs h in degrees M*zdeg - alpha for every degree alpha of a
    M = int((1 - min(degs)) / -zg.zdeg) + 2
    while True:
        need = [M * zg.zdeg - al for al in degs]
        if max(need) > result.max_degree:
            break
        if want is None or M in want:
            out[M] = pair.get(M, DiffPoly())
        M -= 1
    return out


def densities(result: HierarchyResult, a: Series | None = None, count: int | None = None
              ) -> list[tuple[int, LocalFunctional]]:
    """``[(z-power, int g_{a,n})]`` for ``n = 0, 1, ...``: coefficients of ``z^{N-n}`` in ``int (a | h)``."""
    a = default_a(result) if a is None else a
    if not center_check(a, result):
        raise HierarchyError("a is not in the center of h (within the window)")
    coeffs = _density_coeffs(result, a, None)
    nz = [m for m, F in coeffs.items() if not functional_is_zero(F)]
    if not nz:
        raise HierarchyError("all densities in the window vanish")
    N = max(nz)
    avail = sorted((m for m in coeffs if m <= N), reverse=True)
    if count is None:
        count = len(avail)
    if count > len(avail):
        raise WindowTooSmall(f"{count} densities requested but the window through degree "
                             f"{fmt_q(result.max_degree)} determines only {len(avail)}")
    return [(m, LocalFunctional(coeffs[m])) for m in avail[:count]]


def required_max_degree(result_or_triple, count: int) -> Fraction:
    """Smallest window giving ``count`` densities for ``a = f1 + zE`` with the top power ``z^0``."""
    zg = result_or_triple.zg if isinstance(result_or_triple, HierarchyResult) else ZGrading(result_or_triple)
    return 1 + (count - 1) * (-zg.zdeg)


def slice_evaluate(F: LocalFunctional, keep: Mapping[str, str] | Sequence[str], variables: Sequence[str] | None = None
                   ) -> LocalFunctional:
    """Set every variable not in ``keep`` to zero; ``keep`` may map old names to new ones."""
    rho = F.density
    keep = dict(keep) if isinstance(keep, Mapping) else {v: v for v in keep}
    known = set(variables) if variables is not None else rho.variables() | set(keep)
    unknown = set(keep) - known
    if unknown:
        raise HierarchyError(f"unknown variables {sorted(unknown)}")
    mapping = {v: (DiffPoly.var(keep[v]) if v in keep else DiffPoly()) for v in known | rho.variables()}
    return LocalFunctional(rho.substitute(mapping))


def principal_sl2_slice(result: HierarchyResult, new_name: str = "u") -> dict[str, str]:
    """Keep the coordinate dual to ``f`` (the ``e`` direction of q), kill the rest."""
    f = result.triple.f
    for name, x in zip(result.variables, result.variable_labels):
        if x == f:
            return {name: new_name}
    raise HierarchyError("no p-coordinate along f")


# ------------------------------------------------------------------ gauge


def random_h_element(result: HierarchyResult, seed: int, *, top=None, terms: int = 2) -> Series:
    """Random h-valued element of positive degree with small DiffPoly coefficients."""
    rng = random.Random(seed)
    top = result.max_degree + 1 if top is None else Fraction(top)
    S: Series = {}
    d = HALF
    while d <= top:
        keys, hb, _ = result.split.spaces(d)
        for v in hb:
            coeff = random_diffpoly(rng, result.variables, terms=terms, max_order=1, max_degree=2,
                                    coeff_bound=3)
            if coeff.is_zero():
                continue
            for k, a in zip(keys, v):
                if a:
                    _add_into(S, k, coeff.scale(a))
        d += HALF
    return S


def gauge_perturb(result: HierarchyResult, S: Series, seed=None) -> HierarchyResult:
    """Compose the stored gauge with ``e^{ad S}``, ``S`` valued in h of positive degree."""
    zg = result.zg
    if any(zg.degree(k) <= 0 for k in S):
        raise HierarchyError("S must have positive degree")
    if not _in_h(result, S):
        raise HierarchyError("S is not h-valued")
    if not S:
        return result
    top = result.max_degree
    lam = _lam_series(zg)
    new = exp_ad(zg, S, series_add(lam, result.h), top)
    h_new = series_add(new, series_scale(lam, -1))
    seeds = list(result.seeds) + ([seed] if seed is not None else [])
    return HierarchyResult(result.triple, zg, result.split, result.max_degree, result.variables,
                           result.variable_labels, result.q, result.U, h_new,
                           list(result.gauge) + [S], seeds)


# ---------------------------------------------------------------- flatness


@dataclass
class FlatnessReport:
    degrees_checked: list
    nonzero: dict  # degree -> number of nonzero coefficients

    @property
    def ok(self) -> bool:
        return not self.nonzero

    @property
    def max_nonzero(self) -> int:
        return max(self.nonzero.values(), default=0)


def _exp_ad_plain(zg: ZGrading, U: Series, X: Series, top, sign=1) -> Series:
    """``e^{sign ad U} X`` for an element (no ``d`` part)."""
    acc = zg.truncate(X, top)
    term = acc
    n = 1
    while term:
        term = series_scale(zg.bracket(U, term, top), Fraction(sign, n))
        acc = series_add(acc, term)
        n += 1
    return acc


def flatness_check(result: HierarchyResult, a: Series | None = None, window=None) -> FlatnessReport:
    """``[d + f + zE + q, G^{-1}(a)]`` (with ``[d, Y] = Y'``) through ``window`` (default ``max_degree - 1``)."""
    zg = result.zg
    a = default_a(result) if a is None else a
    window = result.max_degree - 1 if window is None else Fraction(window)
    top = window + 1
    Y = zg.truncate(a, top)
    for G in reversed(result.chain):
        Y = _exp_ad_plain(zg, G, Y, top, -1)
    L = series_add(_lam_series(zg), result.q)
    comm = series_add(series_d(Y), zg.bracket(L, Y, window))
    comm = zg.truncate(comm, window)
    nonzero: dict = {}
    for k in comm:
        d = zg.degree(k)
        nonzero[d] = nonzero.get(d, 0) + 1
    degs = []
    d = min(_a_degrees(zg, a)) - 1
    while d <= window:
        degs.append(d)
        d += HALF
    return FlatnessReport(degs, nonzero)


def gauge_invariant(r1: HierarchyResult, r2: HierarchyResult, a: Series | None = None) -> bool:
    """Densities of two solutions agree coefficient by coefficient as functionals."""
    a1 = default_a(r1) if a is None else a
    c1 = _density_coeffs(r1, a1, None)
    c2 = _density_coeffs(r2, a1, None)
    return c1.keys() == c2.keys() and all(functional_eq(c1[m], c2[m]) for m in c1)
