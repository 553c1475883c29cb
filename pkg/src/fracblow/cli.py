"""Command-line front end: kernel-constant sweeps, critical exponents,
regime classification, blow-up solves, and nonexistence audits.

Output conventions: CSV for per-node or per-cell tables, JSON for
structured reports.  JSON reports carry a ``timestamp`` field unless
``--no-timestamp`` is given; with it, identical invocations produce
byte-identical outputs.  A JSON config file (``--config``) may set any
parameter; explicit flags override the file.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 regime guard.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone

from .analysis import audit_nonexistence
from .errors import (
    AuditFail,
    BadConfig,
    BracketFailure,
    FracblowError,
    MonotoneViolation,
    NewtonStall,
    NoAdmissiblePair,
    NoConvergence,
    NonIntegrable,
    OutOfDomain,
    RegimeError,
    SingularSystem,
    TooFewPoints,
)
from .mesh import build_graded, distance_D
from .solver import ProblemSpec, default_sub_super, solve_blowup
from .specfun import (
    C_tau,
    T_alpha,
    c_second_derivative,
    c_tau,
    classify,
    critical_exponents,
)

__all__ = ["main"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_REGIME = 4

_NUMERICAL_ERRORS = (
    NonIntegrable,
    NoConvergence,
    BracketFailure,
    SingularSystem,
    NoAdmissiblePair,
    NewtonStall,
    MonotoneViolation,
    AuditFail,
    TooFewPoints,
)

_CONFIG_ERRORS = (BadConfig, OutOfDomain)


# ---------------------------------------------------------------------------
# Parameter plumbing.


def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            config = json.load(fh)
    except OSError as exc:
        raise BadConfig(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise BadConfig(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(config, dict):
        raise BadConfig(f"config file {path} must hold a JSON object")
    return config


_KNOWN_KEYS = {
    "alpha", "p", "tau", "n_per_side", "grading", "delta", "tol",
    "schedule", "out", "no_timestamp", "step",
}


def _resolve(ns, config, name, default=None, required=False):
    """Flag value if given, else config-file value, else default."""
    unknown = set(config) - _KNOWN_KEYS
    if unknown:
        raise BadConfig(f"unknown config keys: {sorted(unknown)}")
    value = getattr(ns, name, None)
    if value is None:
        value = config.get(name, default)
    if required and value is None:
        raise BadConfig(f"missing required parameter --{name.replace('_', '-')}")
    return value


def _parse_range(text, what):
    """Either a single float or an inclusive 'lo:hi' range token."""
    text = str(text)
    if ":" in text:
        lo_s, hi_s = text.split(":", 1)
        try:
            lo, hi = float(lo_s), float(hi_s)
        except ValueError as exc:
            raise BadConfig(f"bad {what} range {text!r}") from exc
        if not lo <= hi:
            raise BadConfig(f"{what} range must be increasing, got {text!r}")
        return lo, hi
    try:
        value = float(text)
    except ValueError as exc:
        raise BadConfig(f"bad {what} value {text!r}") from exc
    return value, value


def _range_values(lo, hi, step):
    if not step > 0.0:
        raise BadConfig(f"step must be positive, got {step}")
    count = int(round((hi - lo) / step))
    values = [lo + k * step for k in range(count + 1)]
    return [v for v in values if v <= hi + 1e-12]


def _parse_schedule(text):
    try:
        start_s, end_s = str(text).split(":", 1)
        start, end = int(start_s), int(end_s)
    except ValueError as exc:
        raise BadConfig(f"schedule must look like START:END, got {text!r}") from exc
    return start, end


def _timestamp_field(payload, no_timestamp):
    if not no_timestamp:
        payload["timestamp"] = datetime.now(timezone.utc).isoformat()
    return payload


def _write_text(text, out_path):
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _json_text(payload):
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# Subcommands.


def cmd_specfun(ns, config):
    """CSV sweep of the kernel constants: alpha,tau,c,C,T,c2.

    The c2 cell is left empty at tau=0 (the curvature integral is defined
    for tau<0 only).  Per-cell failures are reported on stderr and leave
    the cell empty; the run continues and exits nonzero at the end.
    """
    alpha_lo, alpha_hi = _parse_range(
        _resolve(ns, config, "alpha", default="0.1:0.9"), "alpha")
    tau_lo, tau_hi = _parse_range(
        _resolve(ns, config, "tau", default="-0.9:0.0"), "tau")
    step = float(_resolve(ns, config, "step", default=0.1))
    tol = float(_resolve(ns, config, "tol", default=1e-10))
    out = _resolve(ns, config, "out")

    alphas = _range_values(alpha_lo, alpha_hi, step)
    taus = _range_values(tau_lo, tau_hi, step)
    for a in alphas:
        if not 0.0 < a < 1.0:
            raise BadConfig(f"alpha sweep value {a} outside (0,1)")
    for t in taus:
        if not -1.0 < t <= 1e-12:
            raise BadConfig(f"tau sweep value {t} outside (-1,0]")
    taus = [0.0 if abs(t) <= 1e-12 else t for t in taus]

    failures = []

    def cell(task):
        a, t = task
        row = {"alpha": a, "tau": t, "c": "", "C": "", "c2": ""}
        for key, fn in (("c", c_tau), ("C", C_tau)):
            try:
                row[key] = fn(a, t, rel_tol=tol)
            except FracblowError as exc:
                failures.append(f"{key}(alpha={a}, tau={t}): {exc}")
        if t < 0.0:
            try:
                row["c2"] = c_second_derivative(a, t, rel_tol=tol)
            except FracblowError as exc:
                failures.append(f"c2(alpha={a}, tau={t}): {exc}")
        return row

    t_column = {}
    for a in alphas:
        try:
            t_column[a] = T_alpha(a, rel_tol=tol)
        except FracblowError as exc:
            t_column[a] = ""
            failures.append(f"T(alpha={a}): {exc}")

    tasks = [(a, t) for a in alphas for t in taus]
    with ThreadPoolExecutor(max_workers=min(8, max(1, len(tasks)))) as pool:
        rows = list(pool.map(cell, tasks))

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["alpha", "tau", "c", "C", "T", "c2"])
    for row in rows:
        writer.writerow([row["alpha"], row["tau"], row["c"], row["C"],
                         t_column[row["alpha"]], row["c2"]])
    _write_text(buffer.getvalue(), out)

    for message in sorted(failures):
        print(f"specfun cell failed: {message}", file=sys.stderr)
    return EXIT_NUMERICAL if failures else EXIT_OK


def cmd_critical(ns, config):
    """JSON report of the critical order and per-alpha critical rates."""
    alpha_arg = _resolve(ns, config, "alpha", required=True)
    tol = float(_resolve(ns, config, "tol", default=1e-8))
    out = _resolve(ns, config, "out")
    no_timestamp = bool(getattr(ns, "no_timestamp", None)
                        or config.get("no_timestamp", False))

    try:
        alphas = [float(tok) for tok in str(alpha_arg).split(",") if tok.strip()]
    except ValueError as exc:
        raise BadConfig(f"bad alpha list {alpha_arg!r}") from exc
    if not alphas:
        raise BadConfig("alpha list is empty")

    per_alpha = {}
    alpha0 = None
    for a in alphas:
        ce = critical_exponents(a, tol)
        alpha0 = ce.alpha0
        entry = {"tau0": ce.tau0}
        if ce.tau1 is not None:
            entry["tau1"] = ce.tau1
        per_alpha[repr(float(a))] = entry

    payload = _timestamp_field(
        {"alpha0": alpha0, "tol": tol, "per_alpha": per_alpha}, no_timestamp)
    _write_text(_json_text(payload), out)
    return EXIT_OK


def cmd_classify(ns, config):
    """Regime line and predicted blow-up rate for (alpha, p[, tau])."""
    alpha = float(_resolve(ns, config, "alpha", required=True))
    p = float(_resolve(ns, config, "p", required=True))
    tau = _resolve(ns, config, "tau")
    tau = None if tau is None else float(tau)
    out = _resolve(ns, config, "out")

    regime = classify(alpha, p, tau)
    rate = "none" if regime.predicted_rate is None else repr(regime.predicted_rate)
    _write_text(f"regime: {regime.kind.value}\npredicted_rate: {rate}\n", out)
    return EXIT_OK


def _grid_from(ns, config):
    n_per_side = int(_resolve(ns, config, "n_per_side", default=512))
    grading = float(_resolve(ns, config, "grading", default=2.4))
    delta = float(_resolve(ns, config, "delta", default=0.25))
    return build_graded(n_per_side, grading, delta)


def cmd_solve(ns, config):
    """Exhaustion solve: report JSON plus per-node profile CSV.

    With ``--out PREFIX`` the report goes to PREFIX.report.json and the
    profile to PREFIX.profile.csv; without it the report is printed and
    the profile skipped.
    """
    alpha = float(_resolve(ns, config, "alpha", required=True))
    p = float(_resolve(ns, config, "p", required=True))
    schedule = _parse_schedule(_resolve(ns, config, "schedule", default="8:65536"))
    out = _resolve(ns, config, "out")
    no_timestamp = bool(getattr(ns, "no_timestamp", None)
                        or config.get("no_timestamp", False))

    grid = _grid_from(ns, config)
    sub, sup = default_sub_super(alpha, p, grid)
    spec = ProblemSpec(alpha=alpha, p=p, grid=grid, sub=sub, super=sup)
    report = solve_blowup(spec, schedule[0], schedule[1])

    payload = {
        "alpha": alpha,
        "p": p,
        "tau": spec.tau,
        "n_per_side": grid.n_per_side,
        "grading": grid.grading_exponent,
        "delta": grid.delta,
        "schedule": list(schedule),
        "report": report.as_dict(),
    }
    _timestamp_field(payload, no_timestamp)

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["x", "D", "u", "sub", "super"])
    D = distance_D(grid.nodes)
    for i, x in enumerate(grid.nodes):
        writer.writerow([x, D[i], report.final.values[i],
                         sub.values[i], sup.values[i]])

    if out is None:
        _write_text(_json_text(payload), None)
    else:
        _write_text(_json_text(payload), f"{out}.report.json")
        _write_text(buffer.getvalue(), f"{out}.profile.csv")
    return EXIT_OK


def cmd_audit(ns, config):
    """Nonexistence-zone residual audit, emitted as JSON."""
    alpha = float(_resolve(ns, config, "alpha", required=True))
    p = float(_resolve(ns, config, "p", required=True))
    tau = float(_resolve(ns, config, "tau", required=True))
    out = _resolve(ns, config, "out")
    no_timestamp = bool(getattr(ns, "no_timestamp", None)
                        or config.get("no_timestamp", False))

    grid = _grid_from(ns, config)
    audit = audit_nonexistence(alpha, p, tau, grid)
    payload = {
        "n_per_side": grid.n_per_side,
        "grading": grid.grading_exponent,
        "delta": grid.delta,
        "audit": audit.as_dict(),
    }
    _timestamp_field(payload, no_timestamp)
    _write_text(_json_text(payload), out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser and dispatch.


def _add_common(sub):
    sub.add_argument("--alpha", help="order parameter (or lo:hi range for specfun)")
    sub.add_argument("--tau", help="blow-up rate (or lo:hi range for specfun; "
                                   "write --tau=-0.9:0 for negative ranges)")
    sub.add_argument("--p", help="absorption exponent")
    sub.add_argument("--n-per-side", dest="n_per_side", type=int)
    sub.add_argument("--grading", type=float)
    sub.add_argument("--delta", type=float)
    sub.add_argument("--tol", type=float)
    sub.add_argument("--schedule", help="exhaustion schedule START:END")
    sub.add_argument("--out", help="output path (prefix for solve)")
    sub.add_argument("--no-timestamp", dest="no_timestamp",
                     action="store_const", const=True, default=None,
                     help="omit the timestamp field for reproducible bytes")
    sub.add_argument("--config", help="JSON file with default parameter values")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="fracblow",
        description="Interior blow-up toolkit for the 1-D fractional "
                    "absorption equation.")
    commands = parser.add_subparsers(dest="command", required=True)

    sp = commands.add_parser(
        "specfun", help="CSV sweep of kernel constants c, C, T, c2")
    _add_common(sp)
    sp.add_argument("--step", type=float, help="sweep step (default 0.1)")
    sp.set_defaults(func=cmd_specfun)

    cr = commands.add_parser(
        "critical", help="JSON report of alpha0 and per-alpha tau0/tau1")
    _add_common(cr)
    cr.set_defaults(func=cmd_critical)

    cl = commands.add_parser(
        "classify", help="existence regime and predicted rate")
    _add_common(cl)
    cl.set_defaults(func=cmd_classify)

    so = commands.add_parser(
        "solve", help="exhaustion solve: report JSON + profile CSV")
    _add_common(so)
    so.set_defaults(func=cmd_solve)

    au = commands.add_parser(
        "audit", help="nonexistence-zone residual audit JSON")
    _add_common(au)
    au.set_defaults(func=cmd_audit)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        if code is None or code == 0:
            return EXIT_OK
        return EXIT_CONFIG
    try:
        config = _load_config(getattr(ns, "config", None))
        return ns.func(ns, config)
    except RegimeError as exc:
        print(f"regime guard: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except _CONFIG_ERRORS as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except FracblowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
