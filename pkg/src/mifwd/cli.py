"""Command-line front end.

Subcommands: tables, order, scan, select, classify, mbr. Every option can also
be set through an environment variable ``MIFWD_<OPTION>`` (dashes become
underscores); an explicit flag wins over the environment, which wins over the
built-in default. Errors go to stderr as one JSON object ``{code, message,
context}`` and the exit status is nonzero.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from . import __version__
from .bayes_risk import mbr2, mbr_discrete, mbr_x
from .errors import InvalidConfig, MifwdError, UnknownSubcommand
from .gaussian_setting import (CLASS, FEATURES, Feature, SettingParams, cmi_pair_given_class,
                               entropy_of, k_for_kprime, mi_class, mi_pair, order_features,
                               scan_kprime)
from .info_theory import JointPmf
from .numerics import QuadratureConfig
from .pmf_io import ingest_csv, parse_pmf_file
from .selection import (PUBLISHED_METHODS, MethodKind, MethodSpec, classify_feature,
                        forward_select, target_of, target_of_prime)

ENV_PREFIX = "MIFWD_"
SUBCOMMANDS = ("tables", "order", "scan", "select", "classify", "mbr")


@dataclass(frozen=True)
class Option:
    flags: tuple[str, ...]
    type: Callable[[str], Any]
    default: Any
    help: str
    choices: tuple | None = None

    @property
    def dest(self) -> str:
        return self.flags[0].lstrip("-").replace("-", "_")


def _bool(text: str) -> bool:
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off", ""):
        return False
    raise ValueError(f"not a boolean: {text!r}")


COMMON = [
    Option(("--format",), str, "csv", "output format", ("csv", "json")),
    Option(("--output", "-o"), str, None, "write to this file instead of stdout"),
    Option(("--paper-rounding",), _bool, False, "round numbers to 3 decimals"),
    Option(("--seed",), int, 0, "seed for Monte Carlo checks"),
]
QUAD = [
    Option(("--abs-tol",), float, 1e-12, "quadrature absolute tolerance"),
    Option(("--rel-tol",), float, 1e-12, "quadrature relative tolerance"),
    Option(("--max-subdivisions",), int, 4000, "quadrature bisection budget"),
    Option(("--tail-halfwidth",), float, 12.0, "truncation of infinite ranges, in sd units"),
]
SETTING = [
    Option(("--k",), float, None, "class slope k (default: the X-first value for k')"),
    Option(("--kprime",), float, 0.01, "feature slope k'"),
]
METHOD = [
    Option(("--method",), str, "all", "method name or 'all'"),
    Option(("--beta",), float, 1.0, "MIFS beta"),
]
DATA = [
    Option(("--pmf",), str, None, "PMF document (JSON lines)"),
    Option(("--csv",), str, None, "categorical CSV dataset"),
    Option(("--class",), str, None, "class variable (default: last variable)"),
]
PER_COMMAND = {
    "tables": SETTING + QUAD,
    "order": SETTING + METHOD + QUAD,
    "scan": METHOD + QUAD + [
        Option(("--kprime-start",), float, 0.01, "first grid value"),
        Option(("--kprime-end",), float, 3.0, "last grid value"),
        Option(("--step",), float, 0.01, "grid step"),
        Option(("--workers",), int, 1, "worker processes"),
        Option(("--boundaries-output",), str, None, "CSV file for detected boundaries"),
    ],
    "select": DATA + METHOD + [
        Option(("--steps",), int, None, "number of steps (default: all candidates)"),
        Option(("--tie-tolerance",), float, 1e-9, "argmax tie tolerance"),
        Option(("--stop-when-fully-relevant",), _bool, False, "stop after a fully relevant pick"),
    ],
    "classify": DATA + [
        Option(("--selected",), str, "", "comma-separated selected features"),
    ],
    "mbr": DATA + SETTING + QUAD + [
        Option(("--selected",), str, "", "comma-separated selected features (discrete mode)"),
        Option(("--mc-samples",), int, 0, "Monte Carlo check of the sign rule (0 = off)"),
    ],
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InvalidConfig(message)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mifwd", description="Exact MI feature selection toolkit")
    parser.add_argument("--version", action="version", version=f"mifwd {__version__}")
    sub = parser.add_subparsers(dest="command")
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        for opt in COMMON + PER_COMMAND[name]:
            p.add_argument(*opt.flags, dest=opt.dest, default=None, type=str,
                           help=f"{opt.help} (default: {opt.default})")
    return parser


def resolve_options(command: str, given: dict[str, str | None],
                    environ: dict[str, str] | None = None) -> dict[str, Any]:
    """Merge flag, environment and default values for one subcommand."""
    environ = os.environ if environ is None else environ
    out = {}
    for opt in COMMON + PER_COMMAND[command]:
        raw = given.get(opt.dest)
        source = "flag"
        if raw is None:
            raw = environ.get(ENV_PREFIX + opt.dest.upper())
            source = "env"
        if raw is None:
            out[opt.dest] = opt.default
            continue
        try:
            value = opt.type(raw)
        except (TypeError, ValueError):
            raise InvalidConfig(f"invalid value {raw!r} for {opt.flags[0]} ({source})",
                                option=opt.flags[0], value=raw) from None
        if opt.choices and value not in opt.choices:
            raise InvalidConfig(f"{opt.flags[0]} must be one of {list(opt.choices)}",
                                option=opt.flags[0], value=value)
        out[opt.dest] = value
    return out


# ---------------------------------------------------------------- formatting

def _fmt(value: Any, rounded: bool) -> Any:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if value is None:
        return value
    if isinstance(value, (float, np.floating)):
        value = float(value) + 0.0
        if not math.isfinite(value):
            return str(value)
        if rounded:
            return f"{value:.3f}"
        return f"{value:.6g}"
    return value


def _json_value(value: Any, rounded: bool) -> Any:
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if rounded:
            value = round(value, 3)
        return value + 0.0  # normalizes -0.0
    return value


@dataclass
class Table:
    command: str
    columns: list[str]
    rows: list[dict[str, Any]]
    meta: dict[str, Any]

    def render(self, fmt: str, rounded: bool) -> str:
        if fmt == "json":
            doc = {
                "command": self.command,
                "columns": self.columns,
                "rows": [{c: _json_value(r.get(c), rounded) for c in self.columns}
                         for r in self.rows],
                "meta": self.meta,
            }
            return json.dumps(doc, indent=2, sort_keys=False) + "\n"
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for r in self.rows:
            writer.writerow(["" if r.get(c) is None else _fmt(r.get(c), rounded)
                             for c in self.columns])
        return buf.getvalue()


def _quad(opts) -> QuadratureConfig:
    try:
        return QuadratureConfig(opts["abs_tol"], opts["rel_tol"], opts["max_subdivisions"],
                                opts["tail_halfwidth"])
    except ValueError as exc:
        raise InvalidConfig(str(exc)) from None


def _params(opts) -> SettingParams:
    kp = opts["kprime"]
    if not kp > 0:
        raise InvalidConfig("--kprime must be positive", kprime=kp)
    k = opts["k"] if opts["k"] is not None else k_for_kprime(kp)
    return SettingParams(k, kp, _quad(opts))


def _methods(opts, allow_targets: bool = False) -> list[MethodSpec]:
    text = opts["method"]
    if text.lower() == "all":
        kinds = list(PUBLISHED_METHODS)
        if allow_targets:
            kinds += [MethodKind.TARGET_OF, MethodKind.TARGET_OF_PRIME]
        return [MethodSpec(k, opts["beta"]) for k in kinds]
    return [MethodSpec.parse(m.strip(), opts["beta"]) for m in text.split(",") if m.strip()]


def _setting_meta(params: SettingParams) -> dict:
    return {"k": params.k, "kprime": params.kprime}


# ---------------------------------------------------------------- commands

def cmd_tables(opts) -> Table:
    p = _params(opts)
    rows = []

    def add(table, quantity, a, b, value, formula):
        rows.append({"table": table, "quantity": quantity, "a": a, "b": b,
                     "value": value, "formula": formula})

    add("entropy", "H", "C", "", entropy_of(CLASS, p), "ln 2")
    formulas = {Feature.X: "1/2 ln(2 pi e)", Feature.XMINUS: "1/2 ln(2 pi e (1+k'^2))",
                Feature.Z: "ln 2", Feature.XDISC: "ln 2"}
    for f in FEATURES:
        add("entropy", "H", f.value, "", entropy_of(f, p), formulas[f])
    formulas = {Feature.X: "h(X) - mean_j h(SN(0,1,+-1/k))",
                Feature.XMINUS: "h(X-k'Y) - mean_j h(SN(0,sqrt(1+k'^2),+-(1-kk')/(k+k')))",
                Feature.Z: "0",
                Feature.XDISC: "2ln2 + a ln(a/2) + (1-a) ln((1-a)/2), a = arctan(k)/pi"}
    for f in FEATURES:
        add("mi_class", "MI", "C", f.value, mi_class(f, p), formulas[f])
    pair_formulas = {
        ("mi_pair", frozenset((Feature.X, Feature.XMINUS))): "1/2 ln(1 + 1/k'^2)",
        ("mi_pair", frozenset((Feature.X, Feature.XDISC))): "ln 2",
        ("mi_pair", frozenset((Feature.XMINUS, Feature.XDISC))): "MI(C_k', X)",
        ("cmi_pair", frozenset((Feature.X, Feature.XMINUS))):
            "h(X|C) + h(X-k'Y|C) - (1 + ln pi + ln k')",
        ("cmi_pair", frozenset((Feature.X, Feature.XDISC))): "H_b(arctan(k)/pi)",
        ("cmi_pair", frozenset((Feature.XMINUS, Feature.XDISC))):
            "h(X-k'Y|C) - h(X-k'Y|Xdisc,C)",
    }
    for table, fn, q in (("mi_pair", mi_pair, "MI"), ("cmi_pair", cmi_pair_given_class, "MI|C")):
        for i, a in enumerate(FEATURES):
            for b in FEATURES[i + 1:]:
                formula = pair_formulas.get((table, frozenset((a, b))), "0")
                add(table, q, a.value, b.value, fn(a, b, p), formula)
    return Table("tables", ["table", "quantity", "a", "b", "value", "formula"], rows,
                 _setting_meta(p))


def ordering_positions(order) -> list[str]:
    """One label per position; a trailing tie block is shown in rotated form."""
    steps = order.steps
    n = len(steps)
    out = []
    for i, step in enumerate(steps):
        if len(step.ties) > 1 and len(step.ties) == n - i:
            ties = [t.value for t in step.ties]
            out.extend("/".join(ties[j:] + ties[:j]) for j in range(len(ties)))
            break
        out.append("/".join(t.value for t in step.ties))
    return out


def cmd_order(opts) -> Table:
    p = _params(opts)
    rows = []
    for m in _methods(opts, allow_targets=True):
        order = order_features(m, p)
        pos = ordering_positions(order)
        rows.append({"method": m.label, "first": pos[0], "second": pos[1], "third": pos[2],
                     "fourth": pos[3], "mbr2": order.mbr2})
    return Table("order", ["method", "first", "second", "third", "fourth", "mbr2"], rows,
                 _setting_meta(p))


def cmd_scan(opts) -> Table:
    quad = _quad(opts)
    rows = []
    boundaries = []
    for m in _methods(opts, allow_targets=True):
        res = scan_kprime(m, opts["kprime_start"], opts["step"], opts["kprime_end"], quad,
                          workers=max(1, opts["workers"]))
        for pt in res.points:
            rows.append({
                "method": m.label, "kprime": pt.kprime, "k": pt.k, "region": pt.region,
                "ordering": " ".join(f.value for f in pt.ordering),
                "of_XminusKprimeY": pt.step2.get(Feature.XMINUS),
                "of_Z": pt.step2.get(Feature.Z),
                "of_Xdisc": pt.step2.get(Feature.XDISC),
                "mbr2": pt.mbr2,
            })
        for b in res.boundaries:
            boundaries.append({"method": m.label, "kprime": b.kprime,
                               "left": " ".join(f.value for f in b.left),
                               "right": " ".join(f.value for f in b.right)})
    if opts["boundaries_output"]:
        t = Table("scan-boundaries", ["method", "kprime", "left", "right"], boundaries, {})
        Path(opts["boundaries_output"]).write_text(t.render("csv", opts["paper_rounding"]))
    cols = ["method", "kprime", "k", "region", "ordering", "of_XminusKprimeY", "of_Z",
            "of_Xdisc", "mbr2"]
    return Table("scan", cols, rows, {"boundaries": boundaries})


def _load_data(opts) -> tuple[JointPmf, str]:
    if bool(opts["pmf"]) == bool(opts["csv"]):
        raise InvalidConfig("give exactly one of --pmf or --csv")
    if opts["pmf"]:
        pmf = parse_pmf_file(_read(opts["pmf"]))
        class_var = opts["class"] or pmf.variables[-1]
        pmf.axis(class_var)
    else:
        text = _read(opts["csv"])
        class_var = opts["class"]
        if class_var is None:
            first = next(csv.reader(io.StringIO(text)), None)
            if not first:
                raise InvalidConfig("cannot infer the class column of an empty CSV")
            class_var = first[-1].strip()
        pmf = ingest_csv(text, class_var)
    return pmf, class_var


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InvalidConfig(f"cannot read {path}: {exc.strerror}", path=path) from None


def _split(text: str) -> list[str]:
    return [s.strip() for s in text.split(",") if s.strip()]


def cmd_select(opts) -> Table:
    pmf, class_var = _load_data(opts)
    methods = _methods(opts, allow_targets=True)
    rows, meta = [], {"class": class_var, "runs": []}
    for m in methods:
        state = forward_select(pmf, m, class_var, opts["steps"],
                               tie_tolerance=opts["tie_tolerance"],
                               stop_when_fully_relevant=opts["stop_when_fully_relevant"])
        for rec in state.trace:
            for cand, value in rec.values.items():
                rows.append({"method": m.label, "step": rec.step, "candidate": cand,
                             "value": value, "type": rec.types[cand].value,
                             "chosen": cand == rec.chosen, "tie": cand in rec.ties})
        meta["runs"].append({"method": m.label, "selected": state.selected,
                             "stopped_early": state.stopped_early, "stop_step": state.stop_step})
    return Table("select", ["method", "step", "candidate", "value", "type", "chosen", "tie"],
                 rows, meta)


def cmd_classify(opts) -> Table:
    pmf, class_var = _load_data(opts)
    selected = _split(opts["selected"])
    rows = []
    for cand in pmf.variables:
        if cand == class_var or cand in selected:
            continue
        rows.append({"candidate": cand,
                     "type": classify_feature(pmf, class_var, selected, cand).value,
                     "target_of": target_of(pmf, class_var, selected, cand),
                     "target_of_prime": target_of_prime(pmf, class_var, selected, cand)})
    return Table("classify", ["candidate", "type", "target_of", "target_of_prime"], rows,
                 {"class": class_var, "selected": selected})


def cmd_mbr(opts) -> Table:
    rows = []
    if opts["pmf"] or opts["csv"]:
        pmf, class_var = _load_data(opts)
        selected = _split(opts["selected"])
        risk, rule = mbr_discrete(pmf, class_var, selected)
        rows.append({"quantity": "MBR", "features": " ".join(selected), "value": risk})
        meta = {"class": class_var,
                "rule": [{"cell": [_plain(v) for v in cell], "label": _plain(label)}
                         for cell, label in rule.items()]}
        return Table("mbr", ["quantity", "features", "value"], rows, meta)
    p = _params(opts)
    rows.append({"quantity": "MBR", "features": "X", "value": mbr_x(p.k)})
    for second in (Feature.XMINUS, Feature.Z, Feature.XDISC):
        rows.append({"quantity": "MBR2", "features": f"X {second.value}",
                     "value": mbr2((Feature.X, second), p.k)})
    n = opts["mc_samples"]
    if n:
        if n < 1000:
            raise InvalidConfig("--mc-samples must be 0 or at least 1000", mc_samples=n)
        rng = np.random.default_rng(opts["seed"])
        x = rng.standard_normal(n)
        y = rng.standard_normal(n)
        wrong = (x >= 0) != (x + p.k * y >= 0)
        rate = float(wrong.mean())
        rows.append({"quantity": "MBR_monte_carlo", "features": "X", "value": rate})
        rows.append({"quantity": "MBR_monte_carlo_se", "features": "X",
                     "value": math.sqrt(rate * (1 - rate) / n)})
    return Table("mbr", ["quantity", "features", "value"], rows, _setting_meta(p))


def _plain(v):
    return list(v) if isinstance(v, tuple) else v


COMMANDS = {"tables": cmd_tables, "order": cmd_order, "scan": cmd_scan,
            "select": cmd_select, "classify": cmd_classify, "mbr": cmd_mbr}


def run_command(argv: Sequence[str] | None = None, environ: dict[str, str] | None = None,
                stdout=None) -> int:
    """Run one subcommand; returns the exit status."""
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout or sys.stdout
    try:
        if argv and not argv[0].startswith("-") and argv[0] not in SUBCOMMANDS:
            raise UnknownSubcommand(f"unknown subcommand {argv[0]!r}", command=argv[0],
                                    known=list(SUBCOMMANDS))
        args = _build_parser().parse_args(argv)
        if args.command is None:
            raise UnknownSubcommand("no subcommand given", known=list(SUBCOMMANDS))
        opts = resolve_options(args.command, vars(args), environ)
        table = COMMANDS[args.command](opts)
        text = table.render(opts["format"], opts["paper_rounding"])
        if opts["output"]:
            Path(opts["output"]).write_text(text)
        else:
            stdout.write(text)
        return 0
    except MifwdError as exc:
        sys.stderr.write(json.dumps(exc.to_dict(), default=str) + "\n")
        return 2


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
