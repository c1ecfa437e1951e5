"""Batch runner for the numerical experiments.

Every subcommand writes a CSV table and a JSON-lines mirror. The first line
of each file is a JSON header holding the full run configuration and the
package version, so a table can always be traced back to its inputs.

Exit codes: 0 when every checked contract holds, 1 when one fails, 2 for a
configuration or domain error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .constants import alpha_theorem3, c_theorem2, constant_bundle, r0_theorem3, ratio_diagnostics, verify_simplex_min
from .convolve import clt_iterate
from .coupling import canonical_example
from .density import make_gaussian, make_pareto_trunc, make_triangle, make_two_block, make_uniform
from .entropy import as_order, renyi_entropy
from .epi import counterexample_experiment, epi_check, modified_epi_check
from .sconcave import certify_s_concave, sample_s_concave

COMMANDS = ("entropy", "clt", "counterexample", "constants", "verify-epi", "coverzhang", "certify")
DENSITIES = ("uniform", "gaussian", "two_block", "triangle", "pareto")
FINITE_ORDER = ("counterexample", "constants", "verify-epi")

DEFAULTS = {
    "s": -0.1,
    "r": [0.5],
    "d": 1,
    "n": 2,
    "p": 3.5,
    "R": [10.0],
    "h": 1e-3,
    "k_max": 6,
    "seed": 0,
    "trials": 20,
    "samples": 10_000,
    "density": "uniform",
    "tol": 1e-9,
}

HELP_COLUMNS = """\
CSV columns per command:
  entropy        density, order, h_r, N_r
  clt            n, order, h_r, reference, gap
  counterexample R, h, sigma2_R, N_r_X1, N_r_Zn, cr_bound
  constants      key, value
  verify-epi     trial, check, lhs, rhs, passed
  coverzhang     r, h_sum, h_diag, expected_sum, expected_diag, passed
  certify        density, s, verdict, worst_margin, x, y, midpoint
"""


@dataclass
class RunConfig:
    command: str
    parameters: dict = field(default_factory=dict)
    output_path: str | None = None

    def get(self, key):
        return self.parameters.get(key, DEFAULTS.get(key))

    @property
    def seed(self) -> int:
        return int(self.get("seed"))

    def header(self) -> str:
        params = dict(DEFAULTS)
        params.update(self.parameters)
        return json.dumps(
            {"config": {"command": self.command, "parameters": params, "output_path": self.output_path},
             "version": __version__},
            sort_keys=True,
        )


def _orders(config: RunConfig) -> list[float]:
    r = config.get("r")
    return list(r) if isinstance(r, (list, tuple)) else [r]


def validate(config: RunConfig) -> list[str]:
    """Return the violated preconditions of the run, empty when it is valid."""
    out = []
    cmd = config.command
    if cmd not in COMMANDS:
        return [f"unknown command {cmd!r}"]
    s, d, n = config.get("s"), config.get("d"), config.get("n")
    orders = _orders(config)
    if not isinstance(d, int) or d < 1:
        out.append("d must be a positive integer")
        d = 1
    if config.get("h") <= 0:
        out.append("h > 0 required")
    for r in orders:
        if cmd in FINITE_ORDER and r == 1:
            out.append("r ≠ 1")
        if cmd != "entropy" and not r > 0:
            out.append("r > 0 required")
        if cmd == "entropy" and r < 0:
            out.append("r ≥ 0 required")
    if cmd in ("constants", "verify-epi"):
        if not s > -1 / d:
            out.append("s > −1/d required")
        if not s < 0:
            out.append("s < 0 required")
        for r in orders:
            if not r > -s * d:
                out.append("r must exceed −sd")
            if not r < 1:
                out.append("r < 1 required")
        if not isinstance(n, int) or n < 2:
            out.append("n ≥ 2 required")
    if cmd == "verify-epi":
        if d != 1:
            out.append("d = 1 required (grid densities are one-dimensional)")
        if config.get("trials") < 1:
            out.append("trials ≥ 1 required")
    if cmd == "constants" and config.get("samples") < 1000:
        out.append("samples ≥ 1000 required")
    if cmd == "counterexample":
        for r in orders:
            if 0 < r < 1 and r >= 1 / 3:
                out.append("r ≥ 1/3 unsupported: the construction needs dimension ≥ 2")
            elif not 0 < r < 1:
                out.append("r must lie in (0, 1)")
            else:
                p = config.get("p")
                if not 3 < p <= 1 / r:
                    out.append("p must lie in (3, 1/r]")
        if not isinstance(n, int) or n < 1 or n & (n - 1):
            out.append("n must be a power of two")
        if any(R <= 0 for R in config.get("R")):
            out.append("R > 0 required")
    if cmd == "clt" and not 0 <= config.get("k_max") <= 8:
        out.append("k_max must lie in [0, 8]")
    if cmd in ("entropy", "clt", "certify") and config.get("density") not in DENSITIES:
        out.append(f"density must be one of {', '.join(DENSITIES)}")
    if cmd in ("entropy", "clt", "certify") and config.get("density") == "pareto":
        R, h = config.get("R")[0], config.get("h")
        if h > R / 1000:
            out.append("h ≤ R/1000 required for the truncated Pareto density")
    if cmd == "certify" and config.get("tol") <= 0:
        out.append("tol > 0 required")
    return out


def _density(config: RunConfig):
    name, h = config.get("density"), config.get("h")
    if name == "uniform":
        return make_uniform(-math.sqrt(3), math.sqrt(3), h)
    if name == "gaussian":
        return make_gaussian(1.0, h)
    if name == "two_block":
        return make_two_block(max(1, int(round(1 / (3 * h)))))
    if name == "triangle":
        return make_triangle(1.0, h)
    _, radial = make_pareto_trunc(config.get("R")[0], config.get("p"), 1, h)
    return radial.to_grid()


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, np.integer):
        return int(x)
    return x


class _Sink:
    """Collects CSV rows and JSON records for one run."""

    def __init__(self, columns):
        self.columns = list(columns)
        self.rows = []
        self.records = []

    def add(self, row: dict, record: dict | None = None):
        self.rows.append([_fmt(row[c]) for c in self.columns])
        self.records.append(record if record is not None else row)

    def csv_text(self, header: str) -> str:
        buf = io.StringIO()
        buf.write(header + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        writer.writerows(self.rows)
        return buf.getvalue()

    def jsonl_text(self, header: str) -> str:
        lines = [header] + [json.dumps(r, sort_keys=True, default=_json_default) for r in self.records]
        return "\n".join(lines) + "\n"


def _json_default(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, np.bool_):
        return bool(x)
    raise TypeError(type(x).__name__)


# -- commands -------------------------------------------------------------


def _cmd_entropy(config):
    f = _density(config)
    sink = _Sink(["density", "order", "h_r", "N_r"])
    for r in _orders(config):
        h = renyi_entropy(f, r)
        sink.add({"density": config.get("density"), "order": str(as_order(r)), "h_r": h, "N_r": math.exp(2 * h)})
    return sink, True


def _cmd_clt(config):
    trace = clt_iterate(_density(config), config.get("k_max"), _orders(config))
    sink = _Sink(["n", "order", "h_r", "reference", "gap"])
    for n, key, val, ref, gap in trace.rows():
        sink.add({"n": n, "order": key, "h_r": val, "reference": ref, "gap": gap})
    return sink, True


def _cmd_counterexample(config):
    sink = _Sink(["R", "h", "sigma2_R", "N_r_X1", "N_r_Zn", "cr_bound"])
    ok = True
    for r in _orders(config):
        table = counterexample_experiment(r, config.get("p"), config.get("R"), config.get("n"),
                                          config.parameters.get("h"))
        for row in table.rows:
            sink.add(row, dict(row, r=r, gaussian_bound=table.gaussian_bound))
        ok = ok and table.decreasing()
    return sink, ok


def _cmd_constants(config):
    s, d, n = config.get("s"), config.get("d"), config.get("n")
    sink = _Sink(["key", "value"])
    ok = True
    for r in _orders(config):
        bundle = constant_bundle(s, r, d, n)
        simplex = verify_simplex_min(s, r, d, n, config.get("samples"), config.seed)
        ok = ok and simplex["at_uniform"] <= simplex["min_found"] + 1e-9
        ok = ok and abs(simplex["at_uniform"] - simplex["log_c"]) <= 1e-9 * max(1.0, abs(simplex["log_c"]))
        record = {"bundle": json.loads(bundle.to_json()), "simplex": simplex}
        if bundle.alpha is not None:
            diag = ratio_diagnostics(s, r, d)
            record["diagnostics_hold"] = diag["contracts_hold"]
            ok = ok and diag["contracts_hold"]
        for key, value in json.loads(bundle.to_json()).items():
            sink.rows.append([key, _fmt(value)])
        sink.rows.append(["simplex_min_found", _fmt(simplex["min_found"])])
        sink.rows.append(["simplex_at_uniform", _fmt(simplex["at_uniform"])])
        sink.records.append(record)
    return sink, ok


def _cmd_verify_epi(config):
    s = config.get("s")
    rng = np.random.default_rng(config.seed)
    sink = _Sink(["trial", "check", "lhs", "rhs", "passed"])
    ok = True
    for r in _orders(config):
        c = c_theorem2(s, r, 1, 2)
        alpha = alpha_theorem3(s, r, 1) if r > r0_theorem3(s, 1) else None
        for t in range(config.get("trials")):
            f, g = sample_s_concave(rng, s), sample_s_concave(rng, s)
            rep = epi_check([f, g], r, c)
            sink.add({"trial": t, "check": "epi", "lhs": rep.ratio, "rhs": c, "passed": rep.passed})
            ok = ok and rep.passed
            if alpha is not None:
                lhs, rhs = modified_epi_check(f, g, r, alpha)
                passed = bool(lhs >= rhs * (1 - 1e-6))
                sink.add({"trial": t, "check": "modified", "lhs": lhs, "rhs": rhs, "passed": passed})
                ok = ok and passed
    return sink, ok


def _cmd_coverzhang(config):
    sink = _Sink(["r", "h_sum", "h_diag", "expected_sum", "expected_diag", "passed"])
    cells = max(1, int(round(1 / (3 * config.get("h")))))
    ok = True
    for r in _orders(config):
        h_sum, h_diag = canonical_example(r, cells)
        passed = abs(h_sum - math.log(2)) <= 1e-4 and abs(h_diag - math.log(4 / 3)) <= 1e-4
        sink.add({"r": r, "h_sum": h_sum, "h_diag": h_diag, "expected_sum": math.log(2),
                  "expected_diag": math.log(4 / 3), "passed": passed})
        ok = ok and passed
    return sink, ok


def _cmd_certify(config):
    f = _density(config)
    s = config.get("s")
    rep = certify_s_concave(f, s, config.get("tol"))
    sink = _Sink(["density", "s", "verdict", "worst_margin", "x", "y", "midpoint"])
    x, y, m = rep.witness if rep.witness else (None, None, None)
    sink.add({"density": config.get("density"), "s": s, "verdict": rep.verdict, "worst_margin": rep.worst_margin,
              "x": x, "y": y, "midpoint": m}, json.loads(rep.to_json()))
    # certification is a measurement, not a contract
    return sink, True


HANDLERS = {
    "entropy": _cmd_entropy,
    "clt": _cmd_clt,
    "counterexample": _cmd_counterexample,
    "constants": _cmd_constants,
    "verify-epi": _cmd_verify_epi,
    "coverzhang": _cmd_coverzhang,
    "certify": _cmd_certify,
}


def run(config: RunConfig, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    problems = validate(config)
    if problems:
        for p in problems:
            print(f"error: {p}", file=stderr)
        return 2
    try:
        sink, ok = HANDLERS[config.command](config)
    except ValueError as exc:
        print(f"error: {exc}", file=stderr)
        return 2
    header = config.header()
    if config.output_path:
        base = config.output_path
        for suffix in (".csv", ".jsonl"):
            if base.endswith(suffix):
                base = base[: -len(suffix)]
        with open(base + ".csv", "w", newline="") as fh:
            fh.write(sink.csv_text(header))
        with open(base + ".jsonl", "w") as fh:
            fh.write(sink.jsonl_text(header))
    else:
        stdout.write(sink.csv_text(header))
    if not ok:
        print("contract violated", file=stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="renyi-epi",
        description="Numerical checks of Rényi entropy power inequalities.",
        epilog=HELP_COLUMNS,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, epilog=HELP_COLUMNS, formatter_class=argparse.RawDescriptionHelpFormatter)
        p.add_argument("--config", help="JSON file with parameters; flags override it")
        p.add_argument("--output", help="path prefix for the .csv and .jsonl outputs (stdout CSV if absent)")
        p.add_argument("--s", type=float)
        p.add_argument("--r", type=float, nargs="+", help="one or more orders")
        p.add_argument("--d", type=int)
        p.add_argument("--n", type=int)
        p.add_argument("--p", type=float)
        p.add_argument("--R", type=float, nargs="+")
        p.add_argument("--h", type=float)
        p.add_argument("--k-max", dest="k_max", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--trials", type=int)
        p.add_argument("--samples", type=int)
        p.add_argument("--tol", type=float)
        p.add_argument("--density", choices=DENSITIES)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    params = {}
    if args.config:
        with open(args.config) as fh:
            params.update(json.load(fh))
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            params[key] = value
    for key in ("r", "R"):
        if key in params and not isinstance(params[key], list):
            params[key] = [params[key]]
    return RunConfig(args.command, params, args.output)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = config_from_args(args)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
