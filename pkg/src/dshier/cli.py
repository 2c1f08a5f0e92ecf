"""Command-line front end.

Exit codes: 0 ok, 2 invalid configuration, 3 internal inconsistency,
4 triple construction failure, 5 truncation window too small.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import re
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .diffpoly import ParseError, parse_diffpoly
from .exact import fmt_q
from .grading import (
    HALF,
    TripleError,
    classify_perturbation,
    find_integrable_element,
    find_quasicyclic,
    grading_from,
    integrable_triple_check,
    make_integrable_triple,
    nilpotent_type_probe,
    nilpotent_type_test,
    omega_form,
    sl2_from_partition,
    sl2_from_root,
    so_integrable_triple,
    so_nilpotent_type_pattern,
)
from .hierarchy import (
    HierarchyError,
    WindowTooSmall,
    densities,
    flatness_check,
    gauge_invariant,
    gauge_perturb,
    principal_sl2_slice,
    random_h_element,
    residual,
    slice_evaluate,
    solve_recursion,
)
from .liealg import (
    LieAlgebraError,
    LieAlgebraSpec,
    build_g2,
    build_gl,
    build_sl,
    build_so_from_partition,
    build_sp,
    jordan_decomposition_elem,
    normalize_partition,
)
from .pva import (
    affine_bracket,
    check_axioms,
    functional_bracket,
    gardner_table,
    lenard_run,
    LenardError,
    virasoro_table,
)
from .table1 import table1_lookup, table1_rows, table1_version

EXIT_CONFIG, EXIT_INCONSISTENT, EXIT_TRIPLE, EXIT_WINDOW = 2, 3, 4, 5

G2_NILPOTENTS = {"~A1": ("e(a+2b)", "e(-a-2b)"), "A1": ("e(2a+3b)", "e(-2a-3b)")}


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


# ------------------------------------------------------------------ config


CONFIG_KEYS = ("algebra", "partition", "nilpotent_label", "max_degree", "densities", "seed", "out",
               "format", "table", "steps", "seed_density", "triple", "gauge_seeds")


def _config(args) -> dict:
    cfg: dict = {}
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.is_file():
            raise CliError(EXIT_CONFIG, f"config file {path} does not exist")
        try:
            cfg.update(json.loads(path.read_text()))
        except json.JSONDecodeError as exc:
            raise CliError(EXIT_CONFIG, f"config file is not JSON: {exc}") from None
    for key in CONFIG_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            cfg[key] = v
    cfg["command"] = args.command_name
    return cfg


def config_hash(cfg: dict) -> str:
    canon = {k: v for k, v in cfg.items() if k not in ("out", "format")}
    return hashlib.sha256(json.dumps(canon, sort_keys=True).encode()).hexdigest()[:16]


def _parse_partition(text):
    if text is None:
        return None
    if isinstance(text, list):
        parts = text
    else:
        try:
            parts = [int(x) for x in str(text).replace(" ", "").split(",") if x]
        except ValueError:
            raise CliError(EXIT_CONFIG, f"bad partition {text!r}") from None
    try:
        normalize_partition(parts)
    except LieAlgebraError as exc:
        raise CliError(EXIT_CONFIG, str(exc)) from None
    return sorted(parts, reverse=True)


def build_algebra(cfg: dict):
    """``(alg, so_indexing_or_None, kind, n)`` from the config."""
    spec = cfg.get("algebra")
    if not spec:
        raise CliError(EXIT_CONFIG, "--algebra is required")
    path = Path(spec)
    if spec.endswith(".json"):
        if not path.is_file():
            raise CliError(EXIT_CONFIG, f"algebra file {spec} does not exist")
        try:
            return LieAlgebraSpec.from_json(path.read_text(), name=path.stem), None, "json", None
        except (LieAlgebraError, ValueError, KeyError) as exc:
            raise CliError(EXIT_CONFIG, f"invalid algebra file: {exc}") from None
    m = re.fullmatch(r"(sl|so|sp|gl)\(?(\d+)\)?|(g2|G2)", spec.strip())
    if not m:
        raise CliError(EXIT_CONFIG, f"unknown algebra {spec!r}")
    if m.group(3):
        return build_g2(), None, "g2", 7
    kind, n = m.group(1), int(m.group(2))
    try:
        if kind == "sl":
            if n < 2:
                raise CliError(EXIT_CONFIG, "sl_n needs n >= 2")
            return build_sl(n), None, kind, n
        if kind == "gl":
            return build_gl(n), None, kind, n
        if kind == "sp":
            if n % 2:
                raise CliError(EXIT_CONFIG, "sp_n needs n even")
            return build_sp(n), None, kind, n
        part = _parse_partition(cfg.get("partition")) or [1] * n
        if sum(part) != n:
            raise CliError(EXIT_CONFIG, f"partition {part} is not a partition of {n}")
        alg, ix = build_so_from_partition(part)
        return alg, ix, kind, n
    except LieAlgebraError as exc:
        raise CliError(EXIT_CONFIG, str(exc)) from None


def build_sl2(cfg: dict, alg, ix, kind, n):
    try:
        if kind == "g2":
            label = cfg.get("nilpotent_label") or "~A1"
            if label not in G2_NILPOTENTS:
                raise CliError(EXIT_CONFIG, f"G2 nilpotent label must be one of {sorted(G2_NILPOTENTS)}")
            return sl2_from_root(alg, *G2_NILPOTENTS[label])
        if kind in ("sl", "so"):
            part = _parse_partition(cfg.get("partition"))
            if part is None and kind == "sl":
                part = [n]  # principal nilpotent
            if part is None:
                raise CliError(EXIT_CONFIG, "--partition is required")
            if sum(part) != n:
                raise CliError(EXIT_CONFIG, f"partition {part} is not a partition of {n}")
            return sl2_from_partition(alg, part, ix)
    except TripleError as exc:
        raise CliError(EXIT_CONFIG, str(exc)) from None
    raise CliError(EXIT_CONFIG, f"no nilpotent constructor for algebra kind {kind!r}")


def build_triple(cfg: dict):
    alg, ix, kind, n = build_algebra(cfg)
    part = _parse_partition(cfg.get("partition"))
    if kind == "so" and part and so_nilpotent_type_pattern(part):
        try:
            return so_integrable_triple(part, alg=alg, ix=ix)
        except TripleError as exc:
            raise CliError(EXIT_TRIPLE, str(exc)) from None
    s = build_sl2(cfg, alg, ix, kind, n)
    g = grading_from(s)
    seed = int(cfg.get("seed", 0))
    for choice in ("d", "d-1/2"):
        if not g.piece(g.depth if choice == "d" else g.depth - HALF):
            continue
        E = find_integrable_element(s.f, g, choice, seed=seed)
        if E is not None:
            _, nil = jordan_decomposition_elem(s.f + E)
            return make_integrable_triple(s.f - nil, nil, E, g)
    raise CliError(EXIT_TRIPLE, "no integrable triple found within the search budget")


# ---------------------------------------------------------------- commands


def cmd_algebra_build(cfg):
    alg, ix, kind, n = build_algebra(cfg)
    return {"algebra": json.loads(alg.to_json()), "dim": alg.dim, "name": alg.name}


def cmd_classify(cfg):
    alg, ix, kind, n = build_algebra(cfg)
    s = build_sl2(cfg, alg, ix, kind, n)
    g = grading_from(s)
    seed = int(cfg.get("seed", 0))
    test = nilpotent_type_test(g)
    probe = nilpotent_type_probe(s.f, g, trials=10, seed=seed)
    if test and not probe.nilpotent_type:
        raise CliError(EXIT_INCONSISTENT, "non-integer depth but a non-nilpotent cyclic element was sampled")
    W = omega_form(g)
    qc = find_quasicyclic(s.f, g, seed=seed)
    out = {
        "algebra": alg.name,
        "depth": fmt_q(g.depth),
        "dims": {fmt_q(k): len(v) for k, v in g.pieces.items()},
        "nilpotent_type": test,
        "probe": probe.message,
        "omega_rank": W.rank(),
        "quasicyclic_exists": qc is not None,
    }
    if qc is not None:
        cls = classify_perturbation(s.f, qc, g)
        out["quasicyclic_example"] = {"E": [fmt_q(c) for c in qc.coords], "element_type": cls.element_type}
        # the first hit may be nilpotent; look for an integrable one separately
        E = find_integrable_element(s.f, g, "d-1/2", seed=seed)
        out["integrable_quasicyclic"] = None if E is None else {
            "E": [fmt_q(c) for c in E.coords],
            "element_type": classify_perturbation(s.f, E, g).element_type}
    if kind == "g2" and (cfg.get("nilpotent_label") or "~A1") == "~A1":
        out["table1"] = table1_lookup("G2", "~A1").to_dict()
    return out


def cmd_triple_build(cfg):
    t = build_triple(cfg)
    rep = integrable_triple_check(t)
    if not rep.ok:
        raise CliError(EXIT_INCONSISTENT, f"constructed triple fails {rep.failed()}")
    return {"triple": t.to_dict(), "check": {**rep.conditions, **rep.extras}}


def cmd_triple_check(cfg):
    t = build_triple(cfg)
    if cfg.get("triple"):
        path = Path(cfg["triple"])
        if not path.is_file():
            raise CliError(EXIT_CONFIG, f"triple file {path} does not exist")
        data = json.loads(path.read_text())
        data = data.get("triple", data)
        alg = t.alg
        try:
            f1, f2, E = (alg.element([Fraction(x) for x in data[k]]) for k in ("f1", "f2", "E"))
            t = make_integrable_triple(f1, f2, E, t.grading)
        except (KeyError, ValueError, TripleError, LieAlgebraError) as exc:
            raise CliError(EXIT_CONFIG, f"invalid triple file: {exc}") from None
    rep = integrable_triple_check(t)
    return {"ok": rep.ok, "conditions": rep.conditions, "extras": rep.extras, "messages": rep.messages}


def cmd_hierarchy_run(cfg):
    max_degree = Fraction(str(cfg.get("max_degree", 4)))
    count = int(cfg.get("densities", 1))
    if count < 1 or max_degree < HALF:
        raise CliError(EXIT_CONFIG, "need densities >= 1 and max_degree >= 1/2")
    t = build_triple(cfg)
    try:
        r = solve_recursion(t, max_degree)
    except HierarchyError as exc:
        raise CliError(EXIT_TRIPLE, str(exc)) from None
    try:
        dens = densities(r, count=count)
    except WindowTooSmall as exc:
        raise CliError(EXIT_WINDOW, str(exc)) from None
    res = residual(r)
    flat = flatness_check(r)
    seeds = cfg.get("gauge_seeds") or [int(cfg.get("seed", 0))]
    gauge_ok = all(gauge_invariant(r, gauge_perturb(r, random_h_element(r, sd), sd)) for sd in seeds)
    if res or not flat.ok or not gauge_ok:
        raise CliError(EXIT_INCONSISTENT, "verification failed")
    artifacts = {}
    if cfg.get("out"):
        stem = Path(cfg["out"])
        listing = "".join(f"{n}\tz^{zp}\t{F.density}\n" for n, (zp, F) in enumerate(dens))
        artifacts = {stem.with_suffix(".hierarchy.json"): r.to_json(dens) + "\n",
                     stem.with_suffix(".densities.txt"): listing}
    out = {"result": r.to_dict(dens),
           "verification": {"residual_zero": not res, "flatness_residual": flat.max_nonzero,
                            "gauge_invariant": gauge_ok, "gauge_seeds": seeds}}
    if cfg.get("algebra") in ("sl2", "sl(2)"):
        sl = principal_sl2_slice(r)
        sliced = [slice_evaluate(F, sl, r.variables) for _, F in dens]
        T0, T1 = virasoro_table(central=Fraction(-1, 2)), gardner_table()
        involution = all(functional_bracket(a, b, T).is_zero() for a in sliced for b in sliced for T in (T0, T1))
        out["sl2_slice"] = {"densities": [str(F.density) for F in sliced], "involution": involution}
        out["verification"]["involution"] = involution
    for path, text in artifacts.items():
        path.write_text(text)
    if artifacts:
        out["artifacts"] = sorted(p.name for p in artifacts)
    return out


def cmd_pva_check(cfg):
    table = cfg.get("table", "virasoro")
    if table == "virasoro":
        tabs = {"virasoro": virasoro_table()}
    elif table == "affine":
        alg, ix, kind, n = build_algebra(cfg)
        E = None
        if kind in ("sl", "so", "g2") and (cfg.get("partition") or kind == "g2"):
            s = build_sl2(cfg, alg, ix, kind, n)
            E = s.e
        T0, Tinf = affine_bracket(alg, E)
        tabs = {"T0": T0, "Tinf": Tinf, "T0+Tinf": T0 + Tinf}
    else:
        raise CliError(EXIT_CONFIG, f"unknown table {table!r}")
    out = {}
    for name, T in tabs.items():
        rep = check_axioms(T)
        out[name] = {"ok": rep.ok, "skew_violations": [list(p) for p in rep.skew_violations],
                     "jacobi_violations": [list(p) for p in rep.jacobi_violations]}
    return out


def cmd_lenard_run(cfg):
    steps = int(cfg.get("steps", 4))
    text = cfg.get("seed_density", "1/2*u^2")
    try:
        seed = parse_diffpoly(text)
    except ParseError as exc:
        raise CliError(EXIT_CONFIG, str(exc)) from None
    T0, Tinf = virasoro_table(), gardner_table()
    try:
        hs = lenard_run(T0, Tinf, seed, steps)
    except LenardError as exc:
        raise CliError(EXIT_INCONSISTENT, str(exc)) from None
    inv = all(functional_bracket(a, b, T).is_zero() for a in hs for b in hs for T in (T0, Tinf))
    return {"pair": "virasoro / d", "functionals": [str(h.density) for h in hs], "involution": inv}


def cmd_table1_show(cfg):
    alg, lab = cfg.get("algebra"), cfg.get("nilpotent_label")
    if alg and lab:
        try:
            rows = [table1_lookup(alg, lab)]
        except KeyError as exc:
            raise CliError(EXIT_CONFIG, str(exc)) from None
    else:
        rows = [r for r in table1_rows() if not alg or r.algebra == alg]
        if not rows:
            raise CliError(EXIT_CONFIG, f"no table rows for algebra {alg!r}")
    return {"table_version": table1_version(), "rows": [r.to_dict() for r in rows]}


COMMANDS = {
    "algebra build": cmd_algebra_build,
    "classify": cmd_classify,
    "triple build": cmd_triple_build,
    "triple check": cmd_triple_check,
    "hierarchy run": cmd_hierarchy_run,
    "pva check": cmd_pva_check,
    "lenard run": cmd_lenard_run,
    "table1 show": cmd_table1_show,
}


# ------------------------------------------------------------------ output


def _text(obj, indent=0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, list) and v and not any(isinstance(x, (dict, list)) for x in v):
                lines.append(f"{pad}{k}: [{', '.join(str(x) for x in v)}]")
            elif isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.extend(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {v}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)):
                lines.append(f"{pad}-")
                lines.extend(_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {v}")
    else:
        lines.append(f"{pad}{obj}")
    return lines


def render(payload: dict, fmt: str) -> str:
    if fmt == "text":
        return "\n".join(_text(payload)) + "\n"
    return json.dumps(payload, indent=1, sort_keys=True) + "\n"


def _add_common(p, *names):
    p.add_argument("--config", help="JSON config file; flags override its entries")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "text"))
    for name in names:
        if name == "algebra":
            p.add_argument("--algebra", help="sl<n>, so<n>, sp<n>, gl<n>, g2, or a LieAlgebraSpec JSON path")
        elif name == "partition":
            p.add_argument("--partition", help="comma-separated parts, e.g. 3,2,2")
        elif name == "nilpotent_label":
            p.add_argument("--nilpotent-label", dest="nilpotent_label")
        elif name == "seed":
            p.add_argument("--seed", type=int)
        elif name == "max_degree":
            p.add_argument("--max-degree", dest="max_degree")
        elif name == "densities":
            p.add_argument("--densities", type=int)


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dshier", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="group", required=True)

    alg = sub.add_parser("algebra").add_subparsers(dest="action", required=True)
    _add_common(alg.add_parser("build"), "algebra", "partition")

    _add_common(sub.add_parser("classify"), "algebra", "partition", "nilpotent_label", "seed")

    tr = sub.add_parser("triple").add_subparsers(dest="action", required=True)
    _add_common(tr.add_parser("build"), "algebra", "partition", "nilpotent_label", "seed")
    chk = tr.add_parser("check")
    _add_common(chk, "algebra", "partition", "nilpotent_label", "seed")
    chk.add_argument("--triple", help="JSON file with f1, f2, E coordinates")

    hi = sub.add_parser("hierarchy").add_subparsers(dest="action", required=True)
    run = hi.add_parser("run")
    _add_common(run, "algebra", "partition", "nilpotent_label", "seed", "max_degree", "densities")

    pv = sub.add_parser("pva").add_subparsers(dest="action", required=True)
    pc = pv.add_parser("check")
    _add_common(pc, "algebra", "partition", "nilpotent_label")
    pc.add_argument("--table", choices=("virasoro", "affine"))

    le = sub.add_parser("lenard").add_subparsers(dest="action", required=True)
    lr = le.add_parser("run")
    _add_common(lr)
    lr.add_argument("--steps", type=int)
    lr.add_argument("--seed-density", dest="seed_density")

    tb = sub.add_parser("table1").add_subparsers(dest="action", required=True)
    ts = tb.add_parser("show")
    _add_common(ts, "algebra", "nilpotent_label")
    return ap


def main(argv=None) -> int:
    ap = make_parser()
    args = ap.parse_args(argv)
    args.command_name = f"{args.group} {args.action}" if getattr(args, "action", None) else args.group
    try:
        cfg = _config(args)
        fmt = cfg.get("format", "json")
        payload = COMMANDS[args.command_name](cfg)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (LieAlgebraError, TripleError) as exc:
        print(f"error: inconsistency: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    report = {"version": __version__, "config_hash": config_hash(cfg), "command": args.command_name,
              "report": payload}
    text = render(report, fmt)
    if cfg.get("out"):
        Path(cfg["out"]).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    run()
