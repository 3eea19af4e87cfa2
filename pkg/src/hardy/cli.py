"""Command-line front end: ``hardy <constants|verify|sweep> [flags]``.

Exit codes: 0 all checks pass, 1 a check failed beyond its tolerance,
2 bad arguments, 3 an engine ran out of budget.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, field, replace
from typing import Sequence

import numpy as np

from .bodies import IntervalSet, parse_body
from .convex import ConvexAlphaError, verify_convex, verify_interval
from .forms import EngineConfig
from .halfspace import _gamma, extremal_sweep, verify_halfspace
from .quadrature import DivergenceError, QuadratureError
from .report import DegenerateInputError
from .specfun import (
    DomainError,
    HardyParams,
    a_const,
    angular_factor,
    gamma_ab_quad,
    kappa,
    kappa_bd,
)
from .testfunctions import random_battery, random_battery_2d

__all__ = ["RunConfig", "main", "run", "SCHEMA_VERSION", "BATTERIES"]

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_ENGINE = 0, 1, 2, 3

# battery name -> number of functions
BATTERIES = {"smoke": 3, "default": 10, "full": 50}
DEFAULT_ALPHA_GRID = tuple(round(0.1 * k, 10) for k in range(1, 20) if k != 10)
DEFAULT_P_GRID = (1.25, 1.5, 2.0, 3.0, 5.0)
DEFAULT_N = (4, 16, 64, 256)


class UsageError(ValueError):
    """Bad command-line input (exit code 2)."""


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines a report; embedded verbatim in JSON output."""

    command: str
    target: str | None = None
    d: int | None = None
    p: tuple[float, ...] = ()
    alpha: tuple[float, ...] = ()
    beta: float | None = None
    n: tuple[int, ...] = ()
    battery: str = "default"
    body: str | None = None
    output: str = "plain"
    engine: EngineConfig = field(default_factory=EngineConfig)

    def as_dict(self) -> dict:
        out = asdict(self)
        out["p"], out["alpha"], out["n"] = list(self.p), list(self.alpha), list(self.n)
        out["engine"] = self.engine.as_dict()
        return out


def _num(value: float, error: float = 0.0) -> dict:
    return {"value": float(value), "error": float(error)}


def _floats(text: str | None, name: str) -> tuple[float, ...]:
    if text is None:
        return ()
    try:
        vals = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise UsageError(f"--{name}: expected comma-separated numbers, got {text!r}") from exc
    if not vals:
        raise UsageError(f"--{name}: empty list")
    return vals


def _single(vals: tuple[float, ...], name: str) -> float:
    if len(vals) != 1:
        raise UsageError(f"--{name} is required and takes one value")
    return vals[0]


# ---------------------------------------------------------------------------
# commands


def cmd_constants(cfg: RunConfig) -> tuple[dict, bool]:
    d = cfg.d if cfg.d is not None else 1
    p, alpha = _single(cfg.p, "p"), _single(cfg.alpha, "alpha")
    params = HardyParams(d, p, alpha)
    k = kappa(d, p, alpha)
    k_conj = kappa(d, params.p_conj, alpha)
    # independent estimate of γ(α, (α-1)/p) by direct quadrature
    g = _gamma(alpha, params.beta)
    g_quad = gamma_ab_quad(alpha, params.beta, tol=1e-11)
    g_err = abs(g - g_quad.value) + g_quad.error
    A = angular_factor(d, alpha)
    result = {
        "kappa": _num(k, A * g_err),
        "kappa_conj": _num(k_conj, A * g_err),
        "symmetry_gap": _num(abs(k - k_conj), 0.0),
        "gamma": _num(g, g_err),
        "beta": _num(params.beta),
        "a_const": _num(a_const(d, alpha)),
        "angular_factor": _num(A),
        "kappa_bd": _num(kappa_bd(d, alpha)),
    }
    if cfg.beta is not None:
        gb = gamma_ab_quad(alpha, cfg.beta, tol=1e-11)
        result["gamma_at_beta"] = _num(gb.value, gb.error)
    ok = abs(k - k_conj) <= 1e-12 * (1.0 + abs(k))
    return {"constants": result}, ok


def _battery_size(name: str) -> int:
    if name in BATTERIES:
        return BATTERIES[name]
    kind, _, count = name.partition(":")
    if kind == "random" and count.isdigit() and int(count) > 0:
        return int(count)
    raise UsageError(f"unknown battery {name!r}; use one of {sorted(BATTERIES)} or random:N")


def _interval_set(text: str) -> IntervalSet:
    kind, _, rest = text.partition("@")
    if kind.strip().lower() != "interval":
        raise UsageError("verify interval needs --body interval@a,b[;c,d...]")
    try:
        pieces = [tuple(float(v) for v in part.split(",")) for part in rest.split(";") if part.strip()]
        if not pieces or any(len(pc) != 2 for pc in pieces):
            raise ValueError
        return IntervalSet(pieces)
    except ValueError as exc:
        raise UsageError(f"cannot parse interval union {text!r}") from exc


def _shrink(a: float, b: float, frac: float = 0.02) -> tuple[float, float]:
    h = frac * (b - a)
    return a + h, b - h


def cmd_verify(cfg: RunConfig) -> tuple[dict, bool]:
    p, alpha = _single(cfg.p, "p"), _single(cfg.alpha, "alpha")
    size = _battery_size(cfg.battery)
    seed = cfg.engine.seed
    reports = []
    if cfg.target == "halfspace":
        d = cfg.d if cfg.d is not None else 1
        params = HardyParams(d, p, alpha)
        if d == 1:
            battery = random_battery(size, seed, (0.05, 3.0))
        elif d == 2:
            battery = random_battery_2d(size, seed, ([-1.0, 0.05], [1.0, 2.0]))
        else:
            raise UsageError("verify halfspace supports --d 1 or 2")
        for i, u in enumerate(battery):
            reports.append(verify_halfspace(u, params, replace(cfg.engine, seed=seed + i)))
    elif cfg.target == "interval":
        HardyParams(1, p, alpha)
        J = _interval_set(cfg.body or "interval@0,1")
        per = -(-size // len(J.intervals))
        for j, (a, b) in enumerate(J.intervals):
            for u in random_battery(per, seed + 1000 * j, _shrink(a, b)):
                reports.append(verify_interval(u, J, p, alpha, cfg.engine))
    elif cfg.target == "convex":
        body = parse_body(cfg.body or "ball@0,0,1")
        HardyParams(body.d, p, alpha)
        if alpha <= 1.0:
            raise ConvexAlphaError(
                f"alpha = {alpha:g} <= 1: on a bounded convex domain the Hardy inequality "
                "cannot hold with a positive constant"
            )
        if body.d == 1:
            battery = random_battery(size, seed, _shrink(*(float(v[0]) for v in body.bounding_box())))
        elif body.d == 2:
            lo, hi = body.bounding_box()
            battery = random_battery_2d(size, seed, (lo, hi), inside=body.contains)
        else:
            raise UsageError("verify convex supports bodies in d = 1 or 2")
        for i, u in enumerate(battery):
            reports.append(verify_convex(u, body, p, alpha, True, replace(cfg.engine, seed=seed + i)))
    else:
        raise UsageError(f"unknown verify target {cfg.target!r}")
    rows = [r.as_dict() for r in reports]
    return {"results": rows}, all(r.passed for r in reports)


def cmd_sweep(cfg: RunConfig) -> tuple[dict, bool]:
    rows: list[dict] = []
    ok = True
    if cfg.target == "extremal":
        p, alpha = _single(cfg.p, "p"), _single(cfg.alpha, "alpha")
        d = cfg.d if cfg.d is not None else 1
        n_list = cfg.n or DEFAULT_N
        sweep = extremal_sweep(p, alpha, d, n_list, cfg.engine)
        rows = [r.as_dict() for r in sweep]
        # the gap to κ must stay positive and must not grow along the sweep
        ok = all(r.gap >= -r.ratio_error for r in sweep) and all(
            b.gap <= a.gap + a.ratio_error + b.ratio_error for a, b in zip(sweep, sweep[1:])
        )
    elif cfg.target == "alpha-grid":
        d = cfg.d if cfg.d is not None else 1
        p = _single(cfg.p, "p") if cfg.p else 2.0
        for alpha in cfg.alpha or DEFAULT_ALPHA_GRID:
            params = HardyParams(d, p, alpha)
            k = kappa(d, p, alpha)
            gq = gamma_ab_quad(alpha, params.beta, tol=1e-11)
            err = angular_factor(d, alpha) * (abs(_gamma(alpha, params.beta) - gq.value) + gq.error)
            rows.append(
                {
                    "alpha": alpha,
                    "kappa": _num(k, err),
                    "kappa_conj": _num(kappa(d, params.p_conj, alpha), err),
                    "kappa_bd": _num(kappa_bd(d, alpha)),
                }
            )
    elif cfg.target == "p-grid":
        d = cfg.d if cfg.d is not None else 1
        alpha = _single(cfg.alpha, "alpha")
        for p in cfg.p or DEFAULT_P_GRID:
            params = HardyParams(d, p, alpha)
            gq = gamma_ab_quad(alpha, params.beta, tol=1e-11)
            err = angular_factor(d, alpha) * (abs(_gamma(alpha, params.beta) - gq.value) + gq.error)
            rows.append(
                {
                    "p": p,
                    "kappa": _num(kappa(d, p, alpha), err),
                    "kappa_conj": _num(kappa(d, params.p_conj, alpha), err),
                    "gamma": _num(_gamma(alpha, params.beta), err / angular_factor(d, alpha)),
                }
            )
    else:
        raise UsageError(f"unknown sweep kind {cfg.target!r}")
    return {"rows": rows}, ok


COMMANDS = {"constants": cmd_constants, "verify": cmd_verify, "sweep": cmd_sweep}


# ---------------------------------------------------------------------------
# output


def _flatten(row: dict, prefix: str = "") -> dict:
    out = {}
    for key, val in row.items():
        name = f"{prefix}{key}"
        if isinstance(val, dict) and set(val) == {"value", "error"}:
            out[name] = val["value"]
            out[f"{name}_error"] = val["error"]
        elif isinstance(val, dict):
            out.update(_flatten(val, f"{name}."))
        elif isinstance(val, list):
            out[name] = json.dumps(val)
        else:
            out[name] = val
    return out


def _fmt(v) -> str:
    if isinstance(v, bool) or v is None:
        return str(v)
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _table(payload: dict) -> list[dict]:
    if "rows" in payload:
        return [_flatten(r) for r in payload["rows"]]
    if "results" in payload:
        return [_flatten(r) for r in payload["results"]]
    return [_flatten(payload["constants"])]


def render(cfg: RunConfig, payload: dict, ok: bool) -> str:
    if cfg.output == "json":
        doc = {"schema_version": SCHEMA_VERSION, "config": cfg.as_dict(), "passed": ok, **payload}
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"
    table = _table(payload)
    if cfg.output == "csv":
        cols: list[str] = []
        for row in table:
            cols += [c for c in row if c not in cols]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for row in table:
            w.writerow([_fmt(row.get(c, "")) for c in cols])
        return buf.getvalue()
    lines = []
    for row in table:
        lines.append("  ".join(f"{k}={_fmt(v)}" for k, v in row.items()))
    lines.append("PASS" if ok else "FAIL")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hardy", description="Sharp fractional Hardy constants and checks.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--d", type=int)
    common.add_argument("--p", help="exponent p > 1 (comma list for grids)")
    common.add_argument("--alpha", help="kernel order in (0, 2) (comma list for grids)")
    common.add_argument("--beta", type=float)
    common.add_argument("--n", help="comma list of extremal indices")
    common.add_argument("--tol", type=float, default=EngineConfig.tol)
    common.add_argument("--samples", type=int, default=EngineConfig.samples)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--battery", default="default")
    common.add_argument("--body", help="interval@a,b | box@x0,y0,x1,y1 | ball@cx,cy,R | polytope@nx,ny,c;...")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="output", action="store_const", const="json")
    fmt.add_argument("--csv", dest="output", action="store_const", const="csv")
    common.add_argument("--out", help="write the report here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("constants", parents=[common], help="sharp constants and cross-checks")
    pv = sub.add_parser("verify", parents=[common], help="check an inequality on a test-function battery")
    pv.add_argument("target", choices=["halfspace", "interval", "convex"])
    ps = sub.add_parser("sweep", parents=[common], help="tables over n, alpha or p")
    ps.add_argument("target", choices=["extremal", "alpha-grid", "p-grid"])
    return parser


def _config(ns: argparse.Namespace) -> RunConfig:
    n: tuple[int, ...] = ()
    if ns.n is not None:
        try:
            n = tuple(int(v) for v in ns.n.split(",") if v.strip())
        except ValueError as exc:
            raise UsageError(f"--n: expected comma-separated integers, got {ns.n!r}") from exc
        if not n:
            raise UsageError("--n: empty list")
        if any(v < 2 for v in n):
            raise UsageError("--n: indices must be >= 2")
    if ns.samples <= 0 or not ns.tol > 0:
        raise UsageError("--samples and --tol must be positive")
    if ns.command == "constants" and (ns.p is None or ns.alpha is None):
        raise UsageError("constants needs --p and --alpha")
    engine = replace(EngineConfig(), tol=ns.tol, samples=ns.samples, seed=ns.seed)
    return RunConfig(
        command=ns.command,
        target=getattr(ns, "target", None),
        d=ns.d,
        p=_floats(ns.p, "p"),
        alpha=_floats(ns.alpha, "alpha"),
        beta=ns.beta,
        n=n,
        battery=ns.battery,
        body=ns.body,
        output=ns.output or "plain",
        engine=engine,
    )


def run(cfg: RunConfig) -> tuple[str, int]:
    """Execute ``cfg``; returns the rendered report and the exit code."""
    payload, ok = COMMANDS[cfg.command](cfg)
    return render(cfg, payload, ok), EXIT_OK if ok else EXIT_FAIL


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _config(ns)
        text, code = run(cfg)
    except ConvexAlphaError as exc:
        print(f"hardy: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, DomainError, DegenerateInputError, ValueError) as exc:
        parser.print_usage(sys.stderr)
        print(f"hardy: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QuadratureError, DivergenceError, ArithmeticError) as exc:
        print(f"hardy: engine failure: {exc}", file=sys.stderr)
        return EXIT_ENGINE
    if ns.out:
        with open(ns.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
