"""Command-line front end.

Every subcommand resolves a flat config dict, runs one operation and writes a
single JSON report echoing that config. Exit status: 0 on success (axiom
outcomes and probe failure counts are data), 1 when a checked implication
is violated, 2 on usage errors. ``summarize`` flattens reports into CSV.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from datetime import datetime, timezone
from typing import Any, Callable

import numpy as np

from . import __version__, kernels
from .algebra import AlgebraElement, AlgebraModel, ModelKind, direct_inverse, load_element_csv
from .convergence import (
    DEFAULT_P_MAX,
    alternating,
    constant,
    default_horizon,
    from_csv,
    fuzzy_cauchy,
    fuzzy_converges,
    limit_formulation_check,
    partial_sums,
    perturbation,
    powers,
    product_convergence_check,
    product_suite,
)
from .divisors import find_tdz_witness, replay_tdz_witness, verify_tdz_subset_singular
from .errors import Diverged, DomainError, IFBAError, NonInvertible, StructuralError
from .ifnorm import BallSpec, IFNormModel, check_ifna_axioms
from .inversion import (
    DEFAULT_MAX_TERMS,
    inverse_via_neumann,
    invertible_ball_probe,
    inversion_continuity_probe,
    neumann_inverse,
    resolvent_inverse,
)
from .report import TIMESTAMP_KEY, dumps, write_atomic
from .triangular import Table, TriangularConorm, TriangularNorm, check_triangular_axioms, is_idempotent

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2

COMMANDS = (
    "check-tnorm",
    "check-axioms",
    "converge",
    "cauchy",
    "product-limit",
    "neumann",
    "inverse",
    "resolvent",
    "probe-open",
    "probe-continuity",
    "tdz",
    "tdz-population",
)

#: every key a run config may carry
CONFIG_KEYS = frozenset(
    {
        "command", "model", "seed", "samples", "tol", "r", "t", "epsilon", "lambda",
        "horizon", "p_max", "max_terms", "x", "y", "x0", "z", "limit", "sequence",
        "seq_x", "seq_y", "input", "output", "tnorm", "tconorm", "table", "grid", "side",
        "ball_r", "ball_t",
    }
)


class UsageError(Exception):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


# ---------------------------------------------------------------------------
# literals
# ---------------------------------------------------------------------------


def parse_element(alg: AlgebraModel, text: str, field: str = "x") -> AlgebraElement:
    """Element literal: ``e``, ``theta``, a scalar ``c`` (meaning ``c e``),
    ``;``-separated rows of ``,``-separated entries, or a CSV path."""
    if text is None:
        raise UsageError(field, "is required")
    s = text.strip()
    try:
        if os.path.isfile(s):
            return load_element_csv(alg, s)
        if s == "theta":
            return alg.zero()
        if s == "e":
            return alg.unit()
        rows = [[float(c) for c in row.split(",")] for row in s.split(";")]
    except ValueError as exc:
        raise UsageError(field, f"cannot parse element {text!r} ({exc})") from None
    except IFBAError as exc:
        raise UsageError(field, str(exc)) from None
    try:
        if len(rows) == 1 and len(rows[0]) == 1 and alg.kind is not ModelKind.SCALAR:
            c = rows[0][0]
            return c * alg.unit() if alg.unital else c * alg.element(np.ones(alg.shape))
        if alg.kind is ModelKind.SCALAR:
            return alg.element(rows[0][0]) if len(rows) == 1 and len(rows[0]) == 1 else _bad(field, text, alg)
        if alg.kind is ModelKind.MATRIX:
            if len(rows) != alg.dim or any(len(r) != alg.dim for r in rows):
                _bad(field, text, alg)
            return alg.element(rows)
        if len(rows) != 1 or len(rows[0]) != alg.size:
            _bad(field, text, alg)
        return alg.element(rows[0])
    except (IFBAError, ValueError) as exc:
        raise UsageError(field, str(exc)) from None


def _bad(field, text, alg):
    raise UsageError(field, f"element {text!r} does not fit {alg.tag} (shape {alg.shape})")


SEQUENCE_RULES = ("constant", "perturbation", "powers", "partial_sums", "alternating", "alternating_decay", "csv")


def parse_sequence(alg: AlgebraModel, text: str, horizon: int, field: str = "sequence"):
    """``rule:elem[:elem]`` or a CSV path. Returns ``(sequence, natural_limit)``."""
    if text is None:
        raise UsageError(field, "is required")
    if os.path.isfile(text):
        try:
            return from_csv(alg, text), None
        except IFBAError as exc:
            raise UsageError(field, str(exc)) from None
    rule, *args = text.split(":")
    if rule not in SEQUENCE_RULES:
        raise UsageError(field, f"unknown rule {rule!r}; expected one of {SEQUENCE_RULES} or a CSV path")
    if rule == "csv":
        return parse_sequence(alg, ":".join(args), horizon, field)
    want = 2 if rule == "perturbation" else 1
    if len(args) != want:
        raise UsageError(field, f"rule {rule!r} takes {want} element argument(s)")
    elems = [parse_element(alg, a, field) for a in args]
    x = elems[0]
    if rule == "constant":
        return constant(x, horizon), x
    if rule == "perturbation":
        return perturbation(x, elems[1], horizon), x
    if rule == "powers":
        return powers(x, horizon), alg.zero()
    if rule == "partial_sums":
        try:
            lim = x * direct_inverse(alg.unit() - x)
        except (NonInvertible, IFBAError):
            lim = None
        return partial_sums(x, horizon), lim
    return alternating(x, horizon, decay=rule == "alternating_decay"), alg.zero()


def _model(cfg) -> IFNormModel:
    try:
        alg = AlgebraModel.parse(cfg["model"])
    except (IFBAError, ValueError) as exc:
        raise UsageError("model", str(exc)) from None
    return IFNormModel(alg, _tnorm(cfg), _tconorm(cfg))


def _table(cfg):
    try:
        return Table.from_csv(cfg["table"])
    except (OSError, IFBAError, ValueError) as exc:
        raise UsageError("table", str(exc)) from None


def _tnorm(cfg) -> TriangularNorm:
    name = cfg.get("tnorm") or "minimum"
    if name == "tabulated":
        return TriangularNorm.tabulated(_table(cfg))
    try:
        return TriangularNorm(name)
    except (ValueError, IFBAError) as exc:
        raise UsageError("tnorm", str(exc)) from None


def _tconorm(cfg) -> TriangularConorm:
    name = cfg.get("tconorm") or "maximum"
    if name == "tabulated":
        return TriangularConorm.tabulated(_table(cfg))
    try:
        return TriangularConorm(name)
    except (ValueError, IFBAError) as exc:
        raise UsageError("tconorm", str(exc)) from None


def _positive(cfg, key):
    v = cfg.get(key)
    if v is None or not v > 0:
        raise UsageError(key, f"must be positive, got {v!r}")
    return v


def _horizon(cfg, alg):
    h = cfg.get("horizon")
    return default_horizon(alg) if h is None else int(_positive(cfg, "horizon"))


# ---------------------------------------------------------------------------
# commands: each returns (result dict, exit status)
# ---------------------------------------------------------------------------


def _cmd_check_tnorm(cfg):
    grid = int(cfg.get("grid") or 11)
    if cfg.get("tconorm") and not cfg.get("tnorm"):
        op = _tconorm(cfg)
    else:
        op = _tnorm(cfg)
    rep = check_triangular_axioms(op, grid)
    idem = is_idempotent(op, grid)
    return {
        "operation": op.describe(),
        "grid_resolution": grid,
        "axioms": [rec.to_dict() for rec in rep.axioms],
        "all_passed": rep.all_passed,
        "idempotent": idem.idempotent,
        "idempotency_witness": None if idem.idempotent else {"a": idem.witness, "value": idem.value},
    }, EXIT_OK


def _cmd_check_axioms(cfg):
    rep = check_ifna_axioms(_model(cfg), int(_positive(cfg, "samples")), cfg["seed"])
    out = rep.to_dict()
    out["failing"] = [rec.axiom_id for rec in rep.axioms if not rec.passed]
    return out, EXIT_OK


def _seq_and_limit(cfg, model, horizon, key="sequence", limit_key="limit"):
    seq, natural = parse_sequence(model.algebra, cfg.get(key) or cfg.get("input"), horizon, key)
    if cfg.get(limit_key) is not None:
        return seq, parse_element(model.algebra, cfg[limit_key], limit_key)
    if natural is None:
        raise UsageError(limit_key, f"is required for sequence {cfg.get(key)!r}")
    return seq, natural


def _cmd_converge(cfg):
    model = _model(cfg)
    seq, lim = _seq_and_limit(cfg, model, _horizon(cfg, model.algebra))
    verdict = fuzzy_converges(model, seq, lim, cfg["r"], cfg["t"])
    check = limit_formulation_check(model, seq, lim, [cfg["t"]])
    return {
        "sequence": seq.to_dict(),
        "limit": lim.tolist(),
        "verdict": verdict.to_dict(),
        "limit_check": check.to_dict(),
    }, EXIT_OK


def _cmd_cauchy(cfg):
    model = _model(cfg)
    seq, _ = parse_sequence(model.algebra, cfg.get("sequence") or cfg.get("input"), _horizon(cfg, model.algebra))
    p_max = int(cfg.get("p_max") or DEFAULT_P_MAX)
    verdict = fuzzy_cauchy(model, seq, cfg["r"], cfg["t"], p_max)
    return {"sequence": seq.to_dict(), "verdict": verdict.to_dict()}, EXIT_OK


def _cmd_product_limit(cfg):
    model = _model(cfg)
    if cfg.get("seq_x") is None and cfg.get("seq_y") is None:
        rows = product_suite(model, cfg["seed"], cfg["r"], cfg["t"], cfg.get("horizon"))
        pairs = [
            {"x_family": fx, "y_family": fy, "both_converged": rep.both_converged,
             "product_converged": rep.product_verdict.converged, "violation": rep.violation}
            for fx, fy, rep in rows
        ]
        violations = sum(p["violation"] for p in pairs)
        return {"mode": "suite", "pairs": pairs, "violation_count": violations}, (
            EXIT_VIOLATION if violations else EXIT_OK
        )
    h = _horizon(cfg, model.algebra)
    sx, lx = _seq_and_limit(cfg, model, h, "seq_x", "x")
    sy, ly = _seq_and_limit(cfg, model, h, "seq_y", "y")
    rep = product_convergence_check(model, sx, lx, sy, ly, cfg["r"], cfg["t"])
    out = {"mode": "single", **rep.to_dict(), "violation_count": int(rep.violation)}
    return out, EXIT_VIOLATION if rep.violation else EXIT_OK


def _ball(cfg, model):
    if cfg.get("ball_r") is None:
        return None
    t = cfg.get("ball_t") if cfg.get("ball_t") is not None else cfg["t"]
    return BallSpec(model.algebra.zero(), cfg["ball_r"], t)


def _series_cmd(cfg, func: Callable, *extra):
    model = _model(cfg)
    x = parse_element(model.algebra, cfg.get("x"), "x")
    max_terms = int(cfg.get("max_terms") or DEFAULT_MAX_TERMS)
    res = func(model, x, *extra, cfg["tol"], max_terms, _ball(cfg, model))
    return res.to_dict(), EXIT_OK


def _cmd_neumann(cfg):
    return _series_cmd(cfg, neumann_inverse)


def _cmd_inverse(cfg):
    return _series_cmd(cfg, inverse_via_neumann)


def _cmd_resolvent(cfg):
    lam = cfg.get("lambda")
    if lam is None:
        raise UsageError("lambda", "is required")
    return _series_cmd(cfg, resolvent_inverse, lam)


def _cmd_probe_open(cfg):
    model = _model(cfg)
    x0 = parse_element(model.algebra, cfg.get("x0") or "e", "x0")
    rep = invertible_ball_probe(model, x0, cfg["t"], int(_positive(cfg, "samples")), cfg["seed"], cfg.get("r_override"))
    out = rep.to_dict()
    # failures inside the certified radius contradict openness; above it they are expected
    bad = rep.fail_count > 0 and not rep.exceeds_bound
    return out, EXIT_VIOLATION if bad else EXIT_OK


def _cmd_probe_continuity(cfg):
    model = _model(cfg)
    x0 = parse_element(model.algebra, cfg.get("x0") or "e", "x0")
    rep = inversion_continuity_probe(model, x0, cfg["epsilon"], int(_positive(cfg, "samples")), cfg["seed"])
    return rep.to_dict(), EXIT_OK if rep.identity_case["holds"] else EXIT_VIOLATION


def _cmd_tdz(cfg):
    model = _model(cfg)
    z = parse_element(model.algebra, cfg.get("z"), "z")
    horizon = int(cfg.get("horizon") or 10)
    found = find_tdz_witness(model, z, cfg["r"], cfg["t"], horizon, cfg.get("side") or "left")
    out = found.to_dict()
    if not found:
        return out, EXIT_OK
    replay = replay_tdz_witness(model, found)
    noninv = True
    try:
        direct_inverse(z)
        noninv = False
    except NonInvertible:
        pass
    out["replay"] = replay
    out["oracle_noninvertible"] = noninv
    return out, EXIT_OK if (noninv and replay["valid"]) else EXIT_VIOLATION


def _cmd_tdz_population(cfg):
    model = _model(cfg)
    horizon = int(cfg.get("horizon") or 10)
    rep = verify_tdz_subset_singular(model, int(_positive(cfg, "samples")), cfg["seed"], cfg["r"], cfg["t"], horizon)
    return rep, EXIT_OK if rep["holds"] else EXIT_VIOLATION


HANDLERS = {
    "check-tnorm": _cmd_check_tnorm,
    "check-axioms": _cmd_check_axioms,
    "converge": _cmd_converge,
    "cauchy": _cmd_cauchy,
    "product-limit": _cmd_product_limit,
    "neumann": _cmd_neumann,
    "inverse": _cmd_inverse,
    "resolvent": _cmd_resolvent,
    "probe-open": _cmd_probe_open,
    "probe-continuity": _cmd_probe_continuity,
    "tdz": _cmd_tdz,
    "tdz-population": _cmd_tdz_population,
}

# per-command defaults; keys absent here and in the user config stay out of the echo
DEFAULTS: dict[str, dict[str, Any]] = {
    "check-tnorm": {"grid": 11},
    "check-axioms": {"model": "matrix:n=2", "samples": 10_000},
    "converge": {"model": "scalar", "r": 0.1, "t": 1.0},
    "cauchy": {"model": "scalar", "r": 0.1, "t": 1.0, "p_max": DEFAULT_P_MAX},
    "product-limit": {"model": "scalar", "r": 0.1, "t": 1.0},
    "neumann": {"model": "scalar", "tol": 1e-10, "max_terms": DEFAULT_MAX_TERMS},
    "inverse": {"model": "scalar", "tol": 1e-10, "max_terms": DEFAULT_MAX_TERMS},
    "resolvent": {"model": "scalar", "tol": 1e-10, "max_terms": DEFAULT_MAX_TERMS},
    "probe-open": {"model": "matrix:n=2", "t": 1.0, "samples": 1000, "x0": "e"},
    "probe-continuity": {"model": "matrix:n=2", "epsilon": 1.0, "samples": 1000, "x0": "e"},
    "tdz": {"model": "matrix:n=2", "r": 0.4, "t": 1.0, "horizon": 10, "side": "left"},
    "tdz-population": {"model": "matrix:n=2", "r": 0.4, "t": 1.0, "samples": 1000, "horizon": 10},
}

SEEDED = {"check-axioms", "product-limit", "probe-open", "probe-continuity", "tdz-population"}


def resolve_config(config: dict[str, Any], environ=os.environ) -> dict[str, Any]:
    """Validate keys and fill defaults; the result is what reports echo."""
    unknown = sorted(set(config) - CONFIG_KEYS)
    if unknown:
        raise UsageError(unknown[0], "unknown config key")
    command = config.get("command")
    if command not in HANDLERS:
        raise UsageError("command", f"must be one of {COMMANDS}, got {command!r}")
    cfg = dict(DEFAULTS[command])
    cfg.update({k: v for k, v in config.items() if v is not None})
    if command in SEEDED:
        if config.get("seed") is None:
            env = environ.get("IFBA_SEED")
            try:
                cfg["seed"] = int(env) if env is not None else 0
            except ValueError:
                raise UsageError("seed", f"IFBA_SEED={env!r} is not an integer") from None
    for key in ("tol", "t", "epsilon"):
        if key in cfg and key in DEFAULTS[command] and not cfg[key] > 0:
            raise UsageError(key, f"must be positive, got {cfg[key]!r}")
    return dict(sorted(cfg.items()))


def run(config: dict[str, Any]) -> tuple[dict[str, Any], int]:
    """Resolve ``config``, dispatch, and build the report. Raises on usage errors."""
    cfg = resolve_config(config)
    handler = HANDLERS[cfg["command"]]
    # probe-open takes an explicit r only as an override of the derived radius
    call_cfg = dict(cfg)
    if cfg["command"] == "probe-open":
        call_cfg["r_override"] = cfg.get("r")
    result, status = handler(call_cfg)
    report = {
        "command": cfg["command"],
        "version": __version__,
        "backend": kernels.BACKEND,
        "config": {k: v for k, v in cfg.items() if k != "output"},
        TIMESTAMP_KEY: datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "exit_status": status,
        "result": result,
    }
    return report, status


# ---------------------------------------------------------------------------
# CSV summary
# ---------------------------------------------------------------------------

SUMMARY_COLUMNS: dict[str, tuple[str, ...]] = {
    "check-tnorm": ("operation", "all_passed", "idempotent"),
    "check-axioms": ("model", "seed", "samples", "failing"),
    "converge": ("model", "status", "n0", "r", "t", "horizon"),
    "cauchy": ("model", "status", "n0", "r", "t", "p_max"),
    "product-limit": ("model", "mode", "violation_count"),
    "neumann": ("model", "norm_x", "terms_used", "residual"),
    "inverse": ("model", "norm_x", "terms_used", "residual"),
    "resolvent": ("model", "norm_x", "terms_used", "residual"),
    "probe-open": ("model", "r_star", "r", "crisp_radius", "pass_count", "fail_count"),
    "probe-continuity": ("model", "samples", "holds_count", "fails_count", "satisfaction_rate"),
    "tdz": ("model", "found", "side", "annihilation_norm"),
    "tdz-population": ("model", "samples", "witness_count", "constructed_singular_count", "violation_count"),
}


def _headline(report: dict[str, Any], column: str):
    res = report["result"]
    if column == "model":
        return report["config"].get("model", "")
    if column == "operation":
        return res["operation"]["kind"]
    if column == "failing":
        return " ".join(res["failing"])
    if column in ("norm_x",):
        return res["crisp_certificate"]["norm_x"]
    if column in ("status", "n0", "r", "t", "horizon", "p_max") and "verdict" in res:
        return res["verdict"].get(column)
    return res.get(column)


def _cell(v):
    if isinstance(v, float):
        return format(v, ".17g")
    return "" if v is None else v


def emit_csv_summary(reports: list[str], out: str | None, kind: str | None = None) -> str:
    """One row per report; all reports must share a command.

    ``kind`` fixes the columns up front, which also gives an empty report
    list a meaningful header (otherwise the header is just ``model``).
    """
    loaded = []
    for path in reports:
        try:
            with open(path, encoding="utf-8") as fh:
                loaded.append(json.load(fh))
        except (OSError, ValueError) as exc:
            raise UsageError("input", f"{path}: {exc}") from None
    kinds = {r.get("command") for r in loaded}
    if kind is not None:
        kinds.add(kind)
    if len(kinds) > 1:
        raise UsageError("input", f"reports mix commands {sorted(map(str, kinds))}")
    kind = kinds.pop() if kinds else None
    if kind is not None and kind not in SUMMARY_COLUMNS:
        raise UsageError("input", f"unknown report command {kind!r}")
    columns = SUMMARY_COLUMNS[kind] if kind else ("model",)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for rep in loaded:
        writer.writerow([_cell(_headline(rep, c)) for c in columns])
    text = buf.getvalue()
    if out:
        write_atomic(out, text)
    return text


# ---------------------------------------------------------------------------
# argparse
# ---------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", help='e.g. "scalar", "matrix:n=4", "series:d=8", "nullprod:m=4"')
    p.add_argument("--seed", type=int, help="falls back to $IFBA_SEED, then 0")
    p.add_argument("--samples", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--r", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--lambda", dest="lambda_", type=float)
    p.add_argument("--horizon", type=int)
    p.add_argument("--p-max", type=int)
    p.add_argument("--max-terms", type=int)
    p.add_argument("--x")
    p.add_argument("--y")
    p.add_argument("--x0")
    p.add_argument("--z")
    p.add_argument("--limit")
    p.add_argument("--sequence", help="rule:elem[:elem] or a CSV path")
    p.add_argument("--seq-x")
    p.add_argument("--seq-y")
    p.add_argument("--input", help="CSV sequence, used when --sequence is absent")
    p.add_argument("--output", help="report path (stdout when omitted)")
    p.add_argument("--tnorm")
    p.add_argument("--tconorm")
    p.add_argument("--table")
    p.add_argument("--grid", type=int)
    p.add_argument("--side", choices=("left", "right"))
    p.add_argument("--ball-r", type=float, help="fuzzy certificate ball radius (series commands)")
    p.add_argument("--ball-t", type=float)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits 2 as well; keep its text but our prefix
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: usage error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ifba", description="intuitionistic fuzzy Banach algebra checks")
    parser.add_argument("--version", action="version", version=f"ifba {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        _common(sub.add_parser(name))
    summ = sub.add_parser("summarize", help="flatten reports of one command into CSV")
    summ.add_argument("reports", nargs="*")
    summ.add_argument("--output")
    summ.add_argument("--kind", choices=COMMANDS, help="expected command of the reports")
    return parser


def _args_to_config(ns: argparse.Namespace) -> dict[str, Any]:
    cfg = {k: v for k, v in vars(ns).items() if v is not None}
    if "lambda_" in cfg:
        cfg["lambda"] = cfg.pop("lambda_")
    return cfg


def main(argv: list[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        if ns.command == "summarize":
            text = emit_csv_summary(ns.reports, ns.output, ns.kind)
            if not ns.output:
                sys.stdout.write(text)
            return EXIT_OK
        cfg = _args_to_config(ns)
        report, status = run(cfg)
    except UsageError as exc:
        print(f"ifba: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"ifba: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Diverged as exc:
        print(f"ifba: diverged: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except (StructuralError, IFBAError) as exc:
        print(f"ifba: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"ifba: usage error: input: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = dumps(report)
    if ns.output:
        write_atomic(ns.output, text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
