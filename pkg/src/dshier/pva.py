"""Lambda-brackets on differential polynomials, local functionals and the Lenard-Magri scheme."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Mapping, Sequence

from .diffpoly import (
    DiffPoly,
    LambdaPoly,
    dsum,
    format_diffpoly,
    format_lambdapoly,
    parse_lambdapoly,
    shift_apply_diff,
)
from .exact import RatMatrix, fmt_q, solve_linear
from .liealg import LieAlgebraSpec, LieElement, bracket as lie_bracket


class PVAError(ValueError):
    pass


class LenardError(PVAError):
    """A Lenard-Magri step with no differential-polynomial solution."""

    def __init__(self, message, partial):
        super().__init__(message)
        self.partial = partial


# ------------------------------------------------------------------ tables


class GenBracketTable:
    """``{u_i lambda u_j}`` for every ordered pair of generators.

    Missing pairs are zero.  ``labels`` optionally records what each
    variable stands for (e.g. a Lie algebra basis label).
    """

    def __init__(self, variables: Sequence[str], entries: Mapping[tuple, LambdaPoly], *,
                 labels: Sequence[str] | None = None, name: str = ""):
        self.variables = tuple(variables)
        if len(set(self.variables)) != len(self.variables):
            raise PVAError("duplicate generator names")
        self._pos = {v: i for i, v in enumerate(self.variables)}
        self.entries = {}
        for (a, b), lp in entries.items():
            if a not in self._pos or b not in self._pos:
                raise PVAError(f"entry ({a}, {b}) uses an unknown generator")
            lp = lp if isinstance(lp, LambdaPoly) else LambdaPoly([lp])
            if not lp.is_zero():
                self.entries[(a, b)] = lp
        self.labels = tuple(labels) if labels is not None else self.variables
        self.name = name

    def get(self, a: str, b: str) -> LambdaPoly:
        return self.entries.get((a, b), LambdaPoly())

    def __add__(self, other: GenBracketTable) -> GenBracketTable:
        self._same(other)
        keys = set(self.entries) | set(other.entries)
        return GenBracketTable(self.variables, {k: self.get(*k) + other.get(*k) for k in keys},
                               labels=self.labels, name=f"{self.name}+{other.name}")

    def scaled(self, a) -> GenBracketTable:
        return GenBracketTable(self.variables, {k: v * DiffPoly.const(a) for k, v in self.entries.items()},
                               labels=self.labels, name=f"{fmt_q(Fraction(a))}*{self.name}")

    def _same(self, other):
        if self.variables != other.variables:
            raise PVAError("tables are over different generators")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "variables": list(self.variables),
            "labels": list(self.labels),
            "entries": {f"{a},{b}": format_lambdapoly(v) for (a, b), v in sorted(self.entries.items())},
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> GenBracketTable:
        entries = {}
        for k, text in d["entries"].items():
            a, b = k.split(",")
            entries[(a.strip(), b.strip())] = parse_lambdapoly(text)
        return cls(d["variables"], entries, labels=d.get("labels"), name=d.get("name", ""))


def virasoro_table(var: str = "u", central=None) -> GenBracketTable:
    """``{u lambda u} = u' + 2 u lambda + c lambda^3``; ``central`` replaces the symbol ``c``."""
    u = DiffPoly.var(var)
    c = DiffPoly.symbol("c") if central is None else DiffPoly.const(central)
    return GenBracketTable([var], {(var, var): LambdaPoly([u.d(), u * 2, 0, c])}, name="virasoro")


def gardner_table(var: str = "u") -> GenBracketTable:
    """``{u lambda u} = lambda``, the Poisson structure ``H = d``."""
    return GenBracketTable([var], {(var, var): LambdaPoly.lam()}, name="d")


def affine_bracket(alg: LieAlgebraSpec, E: LieElement | None = None, *, prefix: str = "u"
                   ) -> tuple[GenBracketTable, GenBracketTable]:
    """The pencil ``{a lambda b} = [a,b] + (a|b) lambda + z (E|[a,b])`` as ``(T0, Tinf)``."""
    names = [f"{prefix}{i + 1}" for i in range(alg.dim)]
    basis = alg.basis()
    e0, einf = {}, {}
    for i, a in enumerate(basis):
        for j, b in enumerate(basis):
            br = lie_bracket(a, b)
            lin = dsum(DiffPoly.var(names[k]).scale(c) for k, c in br.items())
            e0[(names[i], names[j])] = LambdaPoly([lin, DiffPoly.const(alg.form(a, b))])
            if E is not None:
                einf[(names[i], names[j])] = LambdaPoly([DiffPoly.const(alg.form(E, br))])
    t0 = GenBracketTable(names, e0, labels=alg.labels, name=f"affine-{alg.name}")
    tinf = GenBracketTable(names, einf, labels=alg.labels, name=f"affine-{alg.name}-E")
    return t0, tinf


# ------------------------------------------------------------ the bracket


def _partials(f: DiffPoly, variables) -> dict:
    out = {}
    for v in variables:
        for n in range(f.max_order(v) + 1):
            p = f.partial(v, n)
            if not p.is_zero():
                out[(v, n)] = p
    return out


def _check_vars(f: DiffPoly, T: GenBracketTable):
    extra = f.variables() - set(T.variables)
    if extra:
        raise PVAError(f"variables {sorted(extra)} are not generators of the table")


def lambda_bracket(f: DiffPoly, g: DiffPoly, T: GenBracketTable) -> LambdaPoly:
    """``{f lambda g}`` from the generator table by the master formula."""
    f, g = DiffPoly.coerce(f), DiffPoly.coerce(g)
    _check_vars(f, T)
    _check_vars(g, T)
    F = _partials(f, T.variables)
    G = _partials(g, T.variables)
    if not F or not G:
        return LambdaPoly()
    # X_i = sum_m (-lambda - d)^m df/du_i^(m)
    X: dict[str, LambdaPoly] = {}
    for (v, m), p in F.items():
        X[v] = X.get(v, LambdaPoly()) + shift_apply_diff(m, p, -1)
    # C_j = sum_i {u_i lambda+d u_j}_-> X_i
    gvars = {v for v, _ in G}
    C: dict[str, LambdaPoly] = {}
    for j in gvars:
        acc = LambdaPoly()
        for i, Xi in X.items():
            P = T.get(i, j)
            for k, Pk in enumerate(P.coeffs):
                if not Pk.is_zero():
                    acc = acc + Xi.shift_apply(k) * Pk
        C[j] = acc
    out = LambdaPoly()
    for (j, n), Gjn in G.items():
        if not C[j].is_zero():
            out = out + C[j].shift_apply(n) * Gjn
    return out


def _apply_at_zero(H: LambdaPoly, x: DiffPoly) -> DiffPoly:
    """``sum_k P_k d^k x`` for ``H = sum_k P_k lambda^k``."""
    return dsum(Pk * x.d(k) for k, Pk in enumerate(H.coeffs) if not Pk.is_zero())


def variational_derivative(f: DiffPoly, name: str) -> DiffPoly:
    """``sum_n (-d)^n df/du^(n)``."""
    f = DiffPoly.coerce(f)
    out = DiffPoly()
    for n in range(f.max_order(name) + 1):
        p = f.partial(name, n)
        if not p.is_zero():
            out = out + p.d(n).scale((-1) ** n)
    return out


def variational_gradient(f: DiffPoly, variables: Sequence[str]) -> tuple[DiffPoly, ...]:
    return tuple(variational_derivative(f, v) for v in variables)


# ------------------------------------------------------------ functionals


@dataclass(frozen=True, eq=False)
class LocalFunctional:
    """``int f``: the class of a density modulo total derivatives."""

    density: DiffPoly

    def __add__(self, other):
        return LocalFunctional(self.density + other.density)

    def __sub__(self, other):
        return LocalFunctional(self.density - other.density)

    def scale(self, a) -> LocalFunctional:
        return LocalFunctional(self.density.scale(a))

    def __eq__(self, other):
        if not isinstance(other, LocalFunctional):
            return NotImplemented
        return functional_eq(self, other)

    __hash__ = None

    def is_zero(self) -> bool:
        return functional_is_zero(self.density)

    def __str__(self):
        return f"int({format_diffpoly(self.density)})"

    __repr__ = __str__


def _as_density(F) -> DiffPoly:
    return F.density if isinstance(F, LocalFunctional) else DiffPoly.coerce(F)


def functional_is_zero(f: DiffPoly) -> bool:
    f = DiffPoly.coerce(f)
    if not f.constant_part().is_zero():
        return False
    return all(variational_derivative(f, v).is_zero() for v in f.variables())


def functional_eq(F, G) -> bool:
    """``int F == int G``: all variational derivatives and the constant term of F - G vanish."""
    return functional_is_zero(_as_density(F) - _as_density(G))


def functional_bracket(F, G, T: GenBracketTable) -> LocalFunctional:
    """``int {f lambda g}|_{lambda=0}``, computed as ``int sum_ij dg/du_j H_ji df/du_i``."""
    f, g = _as_density(F), _as_density(G)
    _check_vars(f, T)
    _check_vars(g, T)
    df = {v: variational_derivative(f, v) for v in T.variables}
    dg = {v: variational_derivative(g, v) for v in T.variables}
    out = DiffPoly()
    for (i, j), P in T.entries.items():
        if df[i].is_zero() or dg[j].is_zero():
            continue
        out = out + dg[j] * _apply_at_zero(P, df[i])
    return LocalFunctional(out)


def ham_flow(H, v: DiffPoly, T: GenBracketTable) -> DiffPoly:
    """``{h lambda v}|_{lambda=0}``: the evolution of ``v`` under the Hamiltonian ``int h``."""
    h = _as_density(H)
    v = DiffPoly.coerce(v)
    _check_vars(h, T)
    _check_vars(v, T)
    dh = {i: variational_derivative(h, i) for i in T.variables}
    flows = {}
    for j in T.variables:
        flows[j] = dsum(_apply_at_zero(T.get(i, j), dh[i]) for i in T.variables if not dh[i].is_zero())
    out = DiffPoly()
    for (j, n), Gjn in _partials(v, T.variables).items():
        out = out + Gjn * flows[j].d(n)
    return out


def evolution(H, T: GenBracketTable) -> dict[str, DiffPoly]:
    """``du_j/dt = {h lambda u_j}|_{lambda=0}`` for every generator."""
    return {j: ham_flow(H, DiffPoly.var(j), T) for j in T.variables}


def flow_derivative(P: DiffPoly, flow: Mapping[str, DiffPoly]) -> DiffPoly:
    """Evolutionary derivative of ``P`` along ``du_j/dt = flow[j]``."""
    out = DiffPoly()
    for (j, n), p in _partials(P, list(flow)).items():
        out = out + p * flow[j].d(n)
    return out


# -------------------------------------------------------- Poisson structures


@dataclass(frozen=True)
class MatrixDiffOperator:
    """``H[i][j] = sum_k H[i][j][k] d^k`` with coefficients on the left."""

    variables: tuple
    entries: tuple  # rows of LambdaPoly, lambda read as d

    def __getitem__(self, ij) -> LambdaPoly:
        i, j = ij
        return self.entries[i][j]

    def apply(self, xi: Sequence[DiffPoly]) -> tuple[DiffPoly, ...]:
        return tuple(dsum(_apply_at_zero(self.entries[i][j], DiffPoly.coerce(xi[j]))
                          for j in range(len(xi))) for i in range(len(self.entries)))

    def entry_text(self, i: int, j: int) -> str:
        return format_operator(self.entries[i][j])

    def __str__(self):
        return "\n".join("[" + ", ".join(format_operator(e) for e in row) + "]" for row in self.entries)


def format_operator(P: LambdaPoly) -> str:
    """Print ``sum P_k d^k`` with ``D`` for the derivation."""
    if P.is_zero():
        return "0"
    parts = []
    for k, c in enumerate(P.coeffs):
        if c.is_zero():
            continue
        s = format_diffpoly(c)
        if k == 0:
            parts.append(s)
            continue
        D = "D" if k == 1 else f"D^{k}"
        if s == "1":
            parts.append(D)
        elif s == "-1":
            parts.append(f"-{D}")
        elif len(c.terms) == 1:
            parts.append(f"{s}*{D}")
        else:
            parts.append(f"({s})*{D}")
    return " + ".join(parts).replace("+ -", "- ")


def poisson_structure_matrix(T: GenBracketTable) -> MatrixDiffOperator:
    """``H_ij = {u_j d u_i}_->``."""
    vs = T.variables
    return MatrixDiffOperator(vs, tuple(tuple(T.get(vj, vi) for vj in vs) for vi in vs))


# ------------------------------------------------------------------ axioms


@dataclass
class AxiomReport:
    skew_violations: list = field(default_factory=list)  # (i, j)
    jacobi_violations: list = field(default_factory=list)  # (i, j, k)
    checked_pairs: int = 0
    checked_triples: int = 0

    @property
    def ok(self) -> bool:
        return not self.skew_violations and not self.jacobi_violations

    def __str__(self):
        if self.ok:
            return f"pass ({self.checked_pairs} pairs, {self.checked_triples} triples)"
        lines = [f"skew-symmetry fails on {p}" for p in self.skew_violations]
        lines += [f"Jacobi fails on {t}" for t in self.jacobi_violations]
        return "\n".join(lines)


def skew_adjoint(P: LambdaPoly) -> LambdaPoly:
    """``-{b_{-lambda-d} a}`` given ``P = {b lambda a}``: ``-sum_k (-lambda-d)^k P_k``."""
    out = LambdaPoly()
    for k, Pk in enumerate(P.coeffs):
        if not Pk.is_zero():
            out = out + shift_apply_diff(k, Pk, -1)
    return -out


# two-variable polynomials in (lambda, mu): {(a, b): DiffPoly}


def _lm_add(acc: dict, key, p: DiffPoly):
    s = acc.get(key, DiffPoly()) + p
    if s.is_zero():
        acc.pop(key, None)
    else:
        acc[key] = s


def jacobi_defect(T: GenBracketTable, i: str, j: str, k: str) -> dict:
    """``{u_i L {u_j M u_k}} - {u_j M {u_i L u_k}} - {{u_i L u_j} L+M u_k}`` as a (L, M) polynomial."""
    out: dict = {}
    for b, Qb in enumerate(T.get(j, k).coeffs):
        for a, c in enumerate(lambda_bracket(DiffPoly.var(i), Qb, T).coeffs):
            _lm_add(out, (a, b), c)
    for a, Ra in enumerate(T.get(i, k).coeffs):
        for b, c in enumerate(lambda_bracket(DiffPoly.var(j), Ra, T).coeffs):
            _lm_add(out, (a, b), -c)
    for a, Pa in enumerate(T.get(i, j).coeffs):
        for cexp, r in enumerate(lambda_bracket(Pa, DiffPoly.var(k), T).coeffs):
            # lambda^a (lambda + mu)^cexp r
            for s in range(cexp + 1):
                _lm_add(out, (a + s, cexp - s), r.scale(-comb(cexp, s)))
    return out


def check_axioms(T: GenBracketTable, *, jacobi: bool = True) -> AxiomReport:
    rep = AxiomReport()
    vs = T.variables
    for i, j in itertools.product(vs, vs):
        rep.checked_pairs += 1
        if T.get(j, i) != skew_adjoint(T.get(i, j)):
            rep.skew_violations.append((i, j))
    if jacobi:
        for i, j, k in itertools.product(vs, vs, vs):
            rep.checked_triples += 1
            if jacobi_defect(T, i, j, k):
                rep.jacobi_violations.append((i, j, k))
    return rep


def random_diffpoly(rng: random.Random, variables: Sequence[str], *, terms: int = 3, max_order: int = 2,
                    max_degree: int = 3, coeff_bound: int = 3, constants: Sequence[str] = ()) -> DiffPoly:
    """Random differential polynomial, for property checks."""
    out = DiffPoly()
    for _ in range(terms):
        t = DiffPoly.const(rng.choice([x for x in range(-coeff_bound, coeff_bound + 1) if x]))
        for _ in range(rng.randint(0, max_degree)):
            t = t * DiffPoly.var(rng.choice(list(variables)), rng.randint(0, max_order))
        for cname in constants:
            if rng.random() < 0.3:
                t = t * DiffPoly.symbol(cname)
        out = out + t
    return out


# ----------------------------------------------------------- Lenard-Magri


def antiderivative(rho: DiffPoly) -> DiffPoly | None:
    """``sigma`` with ``d sigma = rho`` (integration constant 0), or ``None`` if none exists.

    Homotopy formula: the degree-m part of ``rho`` contributes
    ``(1/m) sum_i sum_k sum_{j<k} u_i^(j) (-d)^(k-1-j) d rho/d u_i^(k)``.
    """
    rho = DiffPoly.coerce(rho)
    if rho.is_zero():
        return DiffPoly()
    if not rho.constant_part().is_zero():
        return None
    sigma = DiffPoly()
    for m, part in rho.homogeneous_parts().items():
        acc = DiffPoly()
        for v in part.variables():
            for k in range(1, part.max_order(v) + 1):
                pk = part.partial(v, k)
                if pk.is_zero():
                    continue
                for j in range(k):
                    acc = acc + DiffPoly.var(v, j) * pk.d(k - 1 - j).scale((-1) ** (k - 1 - j))
        sigma = sigma + acc.scale(Fraction(1, m))
    return sigma if sigma.d() == rho else None


def functional_from_gradient(xi: Mapping[str, DiffPoly]) -> DiffPoly | None:
    """Density ``h`` with ``delta h / delta u_i = xi_i``, or ``None`` if ``xi`` is not exact.

    ``h = int_0^1 sum_i u_i xi_i(t u) dt``: a degree-m monomial of ``xi`` gains ``1/(m+1)``.
    """
    h = DiffPoly()
    for v, x in xi.items():
        h = h + DiffPoly.var(v) * x.scale_by_degree(lambda m: Fraction(1, m + 1))
    vs = set(xi) | h.variables()
    for v in vs:
        if variational_derivative(h, v) != xi.get(v, DiffPoly()):
            return None
    return h


def _monomials(variables, max_order, max_degree, const_monos):
    atoms = [(v, n) for v in variables for n in range(max_order + 1)]
    out = []
    for deg in range(max_degree + 1):
        for combo in itertools.combinations_with_replacement(atoms, deg):
            base = DiffPoly.const(1)
            for v, n in combo:
                base = base * DiffPoly.var(v, n)
            for cm in const_monos:
                out.append(base * cm)
    return out


def solve_operator(T: GenBracketTable, rho: Sequence[DiffPoly], *, order_bound: int | None = None
                   ) -> tuple[DiffPoly, ...] | None:
    """Solve ``H(d) xi = rho`` for the Poisson structure of ``T``.

    ``H = d`` on one generator uses the antiderivative; otherwise a finite
    ansatz over monomials with derivative order <= ``order(rho) + 3`` (or
    ``order_bound``) and degree <= ``deg(rho)`` is solved exactly.
    """
    vs = T.variables
    rho = [DiffPoly.coerce(r) for r in rho]
    if len(vs) == 1 and T.get(vs[0], vs[0]) == LambdaPoly.lam():
        s = antiderivative(rho[0])
        return None if s is None else (s,)
    H = poisson_structure_matrix(T)
    ordr = max((r.max_order() for r in rho), default=-1)
    bound = order_bound if order_bound is not None else max(ordr, 0) + 3
    deg = max((r.degree() for r in rho), default=0)
    consts = sorted(set().union(*(r.constants() for r in rho)))
    const_monos = [DiffPoly.const(1)]
    for cname in consts:
        top = max(e for r in rho for m in r.terms for (nm, n), e in m if nm == cname)
        const_monos = [cm * DiffPoly.symbol(cname) ** e for cm in const_monos for e in range(top + 1)]
    monos = _monomials(vs, bound, deg, const_monos)
    unknowns = [(i, mono) for i in range(len(vs)) for mono in monos]
    images = []
    for i, mono in unknowns:
        vec = [DiffPoly()] * len(vs)
        vec[i] = mono
        images.append(H.apply(vec))
    keys = sorted({(r, m) for img in images for r, comp in enumerate(img) for m in comp.terms}
                  | {(r, m) for r, comp in enumerate(rho) for m in comp.terms}, key=repr)
    row = {k: n for n, k in enumerate(keys)}
    A = [[Fraction(0)] * len(unknowns) for _ in keys]
    for col, img in enumerate(images):
        for r, comp in enumerate(img):
            for m, a in comp.terms.items():
                A[row[(r, m)]][col] = a
    b = [Fraction(0)] * len(keys)
    for r, comp in enumerate(rho):
        for m, a in comp.terms.items():
            b[row[(r, m)]] = a
    sol = solve_linear(RatMatrix(A, ncols=len(unknowns)), b)
    if sol is None:
        return None
    xi = [DiffPoly()] * len(vs)
    for (i, mono), a in zip(unknowns, sol):
        if a:
            xi[i] = xi[i] + mono.scale(a)
    return tuple(xi)


def lenard_run(T0: GenBracketTable, Tinf: GenBracketTable, seed, steps: int) -> list[LocalFunctional]:
    """``[int h_0, ..., int h_{steps-1}]`` with ``{int h_n, u}_0 = {int h_{n+1}, u}_inf``.

    Raises :class:`LenardError` (carrying the partial list) when a step has no
    differential-polynomial solution.
    """
    T0._same(Tinf)
    if steps < 1:
        raise ValueError("steps must be >= 1")
    vs = T0.variables
    H0 = poisson_structure_matrix(T0)
    out = [LocalFunctional(_as_density(seed))]
    while len(out) < steps:
        grad = variational_gradient(out[-1].density, vs)
        rho = H0.apply(grad)
        xi = solve_operator(Tinf, rho)
        if xi is None:
            raise LenardError(f"step {len(out)}: H_inf xi = H_0 grad h has no solution", out)
        h = functional_from_gradient(dict(zip(vs, xi)))
        if h is None:
            raise LenardError(f"step {len(out)}: the solution xi is not a variational derivative", out)
        out.append(LocalFunctional(h))
    return out


def involution_matrix(functionals: Sequence, T: GenBracketTable) -> list[list[bool]]:
    """``[[{F_m, F_n} == 0]]`` for all pairs."""
    return [[functional_bracket(F, G, T).is_zero() for G in functionals] for F in functionals]


def functionals_independent(functionals: Sequence) -> bool:
    """Linear independence in ``V / (dV + constants)`` via variational gradients."""
    fs = [_as_density(F) for F in functionals]
    vs = sorted(set().union(*(f.variables() for f in fs))) if fs else []
    grads = [variational_gradient(f, vs) for f in fs]
    keys = sorted({(i, m) for g in grads for i, comp in enumerate(g) for m in comp.terms}, key=repr)
    rows = [[g[i].coefficient(m) for (i, m) in keys] for g in grads]
    if not rows:
        return True
    return RatMatrix(rows, ncols=len(keys)).rank() == len(rows)
