"""Command-line front end: ``tailex {estimate,corrections,weights,mc1,mc2,scan}``.

Numeric output uses the shortest round-trip decimal form, so tables are
byte-stable across runs. When ``--output`` is given, a ``<output>.manifest.json``
sidecar records the full parameter set, input digests and timestamps.

Exit codes: 0 success, 2 input error, 3 degenerate data, 4 internal error.
"""

from __future__ import annotations

import argparse
import datetime as dt
import hashlib
import io
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .distributions import ParetoSpec
from .empirical import abs_log_returns, empirical_survival, read_column, support_scan
from .errors import DegenerateSampleError, HarnessError, InputError, TailexError
from .estimators import (
    COMPARISON_SET,
    Estimator,
    Target,
    correction_factors,
    d_weight_profile,
    estimate_many,
    order_sample,
)
from .montecarlo import (
    DEFAULT_RHO_MAGNITUDES,
    DEFAULT_SAMPLE_SIZES,
    Mc1Config,
    Mc2Config,
    k_ml_weights_simulated,
    run_mc1,
    run_mc2,
)

log = logging.getLogger("tailex")

COMMON_DEFAULTS = {"seed": 0, "output": None, "format": "csv", "threads": None, "verbose": False}
DEFAULTS = {
    "estimate": {"column": "0", "delimiter": ",", "estimators": "all", "threshold": None},
    "corrections": {"n": None},
    "weights": {"target": "D", "estimator": "ML", "n": None, "replications": 10_000, "k": 1.0, "s_min": 50.0},
    "mc1": {
        "k": [1.0],
        "s_min": 50.0,
        "supports": [50.0, 5.0],
        "n": list(DEFAULT_SAMPLE_SIZES),
        "replications": 10_000,
    },
    "mc2": {"k": [1.0], "rho": list(DEFAULT_RHO_MAGNITUDES), "n": [10, 100], "replications": 10_000},
    "scan": {
        "column": "0",
        "delimiter": ",",
        "estimators": ",".join(e.name for e in COMPARISON_SET),
        "min_tail": 3,
        "max_tail": None,
        "returns": False,
        "ecdf_output": None,
    },
}


# -- formatting -----------------------------------------------------------------------

def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return "" if math.isnan(x) else repr(x)
    return str(x)


def _json_value(x):
    if isinstance(x, (float, np.floating)):
        return None if math.isnan(x) else float(x)
    if isinstance(x, np.integer):
        return int(x)
    return x


def render(columns: list, rows: list, kind: str) -> str:
    if kind == "json":
        body = {"columns": columns, "rows": [[_json_value(v) for v in r] for r in rows]}
        return json.dumps(body, indent=1, allow_nan=False) + "\n"
    buf = io.StringIO()
    buf.write(",".join(columns) + "\n")
    for r in rows:
        buf.write(",".join(fmt(v) for v in r) + "\n")
    return buf.getvalue()


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


class Run:
    """Collects outputs and the manifest for one command invocation."""

    def __init__(self, command: str, params: dict):
        self.command = command
        self.params = params
        self.started = dt.datetime.now(dt.timezone.utc).isoformat()
        self.inputs = {}

    def add_input(self, path) -> None:
        self.inputs[str(path)] = "sha256:" + _digest(path)

    def emit(self, columns, rows, output=None, *, primary=True) -> None:
        text = render(columns, rows, self.params["format"])
        target = output if output is not None else (self.params["output"] if primary else None)
        if target is None:
            sys.stdout.write(text)
            return
        target = Path(target)
        _write_atomic(target, text)
        manifest = {
            "command": self.command,
            "parameters": self.params,
            "version": __version__,
            "backend": kernels.BACKEND,
            "inputs": self.inputs,
            "started": self.started,
            "finished": dt.datetime.now(dt.timezone.utc).isoformat(),
        }
        _write_atomic(target.with_name(target.name + ".manifest.json"), json.dumps(manifest, indent=1, default=str) + "\n")


# -- commands -------------------------------------------------------------------------

def _parse_estimators(spec) -> list[Estimator]:
    if isinstance(spec, (list, tuple)):
        names = list(spec)
    elif str(spec).strip().lower() == "all":
        return list(Estimator)
    else:
        names = [s for s in str(spec).split(",") if s.strip()]
    if not names:
        raise InputError("UNKNOWN_ESTIMATOR", "no estimators requested")
    return [Estimator.parse(s) for s in names]


def _column(value):
    return int(value) if isinstance(value, int) else str(value)


def _load_values(p: dict, run: Run, *, returns=False) -> tuple[np.ndarray, int]:
    raw, skipped = read_column(p["file"], _column(p["column"]), p["delimiter"])
    run.add_input(p["file"])
    if returns:
        prices = raw[np.isfinite(raw)]
        r = abs_log_returns(prices, drop_zeros=True)
        dropped = skipped + (raw.size - prices.size) + (prices.size - 1 - r.size)
        log.info("returns: %d values, %d rows dropped (missing or zero returns)", r.size, dropped)
        return r, dropped
    keep = np.isfinite(raw) & (raw > 0)
    return raw[keep], skipped + int((~keep).sum())


def cmd_estimate(p: dict, run: Run) -> int:
    estimators = _parse_estimators(p["estimators"])
    values, dropped = _load_values(p, run)
    if p.get("threshold") is not None:
        values = values[values >= float(p["threshold"])]
    if values.size == 0:
        raise InputError("NO_VALID_ROWS", "no observations left after filtering")
    if dropped:
        log.warning("dropped %d non-positive, non-finite or unparsable rows", dropped)
    sample = order_sample(values)
    if sample.n < 2:
        raise InputError("SAMPLE_TOO_SMALL", f"need at least 2 observations, got {sample.n}")
    results = estimate_many(sample, estimators)
    rows, failed = [], []
    for est in estimators:
        res = results[est]
        if isinstance(res, Exception):
            failed.append(res)
            rows.append([est.name, est.target.value, sample.n, None, res.code])
        else:
            rows.append([est.name, est.target.value, sample.n, res.value, "OK"])
    run.emit(["estimator", "target", "n_used", "value", "status"], rows)
    for err in failed:
        print(f"tailex: {err}", file=sys.stderr)
    return 3 if failed else 0


def _int_list(values) -> list[int]:
    out = []
    for v in values if isinstance(values, (list, tuple)) else [values]:
        for part in str(v).split(","):
            part = part.strip()
            if not part:
                continue
            if ":" in part:
                lo, hi = part.split(":", 1)
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(part))
    return out


def cmd_corrections(p: dict, run: Run) -> int:
    if p["n"] is None:
        raise InputError("MISSING_ARGUMENT", "--n is required")
    ns = _int_list(p["n"])
    rows = []
    for n in ns:
        cf = correction_factors(n)
        rows.append([n, cf.f, cf.g, cf.h])
    run.emit(["n", "f", "g", "h"], rows)
    return 0


def cmd_weights(p: dict, run: Run) -> int:
    if p["n"] is None:
        raise InputError("MISSING_ARGUMENT", "--n is required")
    n = int(p["n"])
    target = str(p["target"]).upper()
    estimator = str(p["estimator"]).upper()
    if target not in ("D", "K") or estimator not in ("ML", "OLS"):
        raise InputError("INVALID_ARGUMENT", "target must be D or K and estimator ML or OLS")
    if target == "D":
        w = d_weight_profile(estimator, n).weights
    elif estimator == "OLS":
        w = d_weight_profile("OLS", n).weights
    else:
        spec = ParetoSpec(float(p["k"]), float(p["s_min"]))
        w = k_ml_weights_simulated(spec, n, int(p["replications"]), int(p["seed"]), p["threads"])
    rows = [[i + 1, wi] for i, wi in enumerate(w)]
    run.emit(["i", "weight"], rows)
    return 0


_MC_COLUMNS = ["exercise", "k", "{point}", "n", "estimator", "bias", "variance", "mse", "replications", "seed"]


def _mc_rows(summary, label):
    return [
        [label, r.k, r.point, r.n, r.estimator.name, r.bias, r.variance, r.mse, r.replications, r.seed]
        for r in summary.rows
    ]


def _floats(values) -> list[float]:
    out = []
    for v in values if isinstance(values, (list, tuple)) else [values]:
        out.extend(float(x) for x in str(v).split(",") if x.strip())
    return out


def cmd_mc1(p: dict, run: Run) -> int:
    rows, redraws = [], 0
    for k in _floats(p["k"]):
        cfg = Mc1Config(k, float(p["s_min"]), _floats(p["supports"]), _int_list(p["n"]), int(p["replications"]), int(p["seed"]))
        summary = run_mc1(cfg, threads=p["threads"])
        rows += _mc_rows(summary, "mc1")
        redraws += sum(summary.redraws.values())
    run.params["redraws"] = redraws
    run.emit([c.format(point="support") for c in _MC_COLUMNS], rows)
    return 0


def cmd_mc2(p: dict, run: Run) -> int:
    rows, redraws = [], 0
    for k in _floats(p["k"]):
        cfg = Mc2Config(k, _floats(p["rho"]), _int_list(p["n"]), int(p["replications"]), int(p["seed"]))
        summary = run_mc2(cfg, threads=p["threads"])
        rows += _mc_rows(summary, "mc2")
        redraws += sum(summary.redraws.values())
    run.params["redraws"] = redraws
    run.emit([c.format(point="rho") for c in _MC_COLUMNS], rows)
    return 0


def cmd_scan(p: dict, run: Run) -> int:
    estimators = _parse_estimators(p["estimators"])
    values, dropped = _load_values(p, run, returns=bool(p["returns"]))
    if values.size == 0:
        raise InputError("NO_VALID_ROWS", "no observations to scan")
    if dropped:
        log.warning("dropped %d rows", dropped)
    sample = order_sample(values)
    min_tail = int(p["min_tail"])
    max_tail = None if p["max_tail"] is None else min(int(p["max_tail"]), sample.n)
    if sample.n < min_tail:
        raise InputError("SAMPLE_TOO_SMALL", f"{sample.n} observations, fewer than --min-tail {min_tail}")
    scan_rows = support_scan(sample, estimators, min_tail, max_tail)
    rows, failures = [], {}
    for r in scan_rows:
        rows.append([r.m, r.threshold] + [r.estimates.get(e) for e in estimators])
        for e in r.errors:
            failures[e] = failures.get(e, 0) + 1
    for e, count in failures.items():
        print(f"tailex: {e.name} undefined on {count} tail sizes (empty cells)", file=sys.stderr)
    run.emit(["m", "threshold"] + [e.name for e in estimators], rows)

    ecdf_path = p["ecdf_output"]
    if ecdf_path is None and p["output"] is not None:
        out = Path(p["output"])
        ecdf_path = out.with_name(out.stem + ".ecdf" + out.suffix)
    if ecdf_path is not None:
        points = empirical_survival(sample)
        run.emit(["rank", "s", "p"], [[pt.rank, pt.s, pt.p] for pt in points], output=ecdf_path, primary=False)
    return 0


COMMANDS = {
    "estimate": cmd_estimate,
    "corrections": cmd_corrections,
    "weights": cmd_weights,
    "mc1": cmd_mc1,
    "mc2": cmd_mc2,
    "scan": cmd_scan,
}


# -- argument parsing -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    common = argparse.ArgumentParser(add_help=False, argument_default=S)
    common.add_argument("--config", help="flat JSON file of flag values; flags override it")
    common.add_argument("--seed", type=int)
    common.add_argument("-o", "--output", help="output file (default: stdout)")
    common.add_argument("--format", choices=["csv", "json"])
    common.add_argument("--threads", type=int, help="worker threads (default: $TAILEX_THREADS or 1)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="tailex", description="Tail-exponent estimation toolkit.")
    parser.add_argument("--version", action="version", version=f"tailex {__version__} ({kernels.BACKEND} kernels)")
    sub = parser.add_subparsers(dest="command", required=True)

    def data_args(sp):
        sp.add_argument("--file", help="input CSV with a header row")
        sp.add_argument("--column", help="column name or 0-based index")
        sp.add_argument("--delimiter")

    sp = sub.add_parser("estimate", parents=[common], argument_default=S, help="estimate d and k on a data column")
    data_args(sp)
    sp.add_argument("--estimators", help="comma-separated names or 'all'")
    sp.add_argument("--threshold", type=float, help="keep observations >= threshold")

    sp = sub.add_parser("corrections", parents=[common], argument_default=S, help="tabulate f(n), g(n), h(n)")
    sp.add_argument("--n", nargs="+", help="sample sizes; 'a:b' ranges allowed")

    sp = sub.add_parser("weights", parents=[common], argument_default=S, help="observation weights of ML vs OLS")
    sp.add_argument("--target", choices=["D", "K", "d", "k"])
    sp.add_argument("--estimator", choices=["ML", "OLS", "ml", "ols"])
    sp.add_argument("--n", type=int)
    sp.add_argument("--replications", type=int, help="samples averaged for k-ML weights")
    sp.add_argument("--k", type=float, help="Pareto exponent for k-ML weight sampling")
    sp.add_argument("--s-min", dest="s_min", type=float)

    sp = sub.add_parser("mc1", parents=[common], argument_default=S, help="mixture Monte Carlo exercise")
    sp.add_argument("--k", action="append", help="tail exponent; repeat for a grid")
    sp.add_argument("--s-min", dest="s_min", type=float)
    sp.add_argument("--supports", nargs="+")
    sp.add_argument("--n", nargs="+")
    sp.add_argument("--replications", type=int)

    sp = sub.add_parser("mc2", parents=[common], argument_default=S, help="Burr Monte Carlo exercise")
    sp.add_argument("--k", action="append", help="tail exponent; repeat for a grid")
    sp.add_argument("--rho", nargs="+", help="|rho| values")
    sp.add_argument("--n", nargs="+")
    sp.add_argument("--replications", type=int)

    sp = sub.add_parser("scan", parents=[common], argument_default=S, help="estimates over all tail sizes")
    data_args(sp)
    sp.add_argument("--estimators")
    sp.add_argument("--min-tail", dest="min_tail", type=int)
    sp.add_argument("--max-tail", dest="max_tail", type=int)
    sp.add_argument("--returns", action="store_true", help="scan absolute log returns of a price column")
    sp.add_argument("--ecdf-output", dest="ecdf_output", help="companion survival-function table")
    return parser


def resolve_params(args: argparse.Namespace) -> dict:
    given = vars(args).copy()
    command = given.pop("command")
    params = dict(COMMON_DEFAULTS)
    params.update(DEFAULTS[command])
    config_path = given.pop("config", None)
    if config_path is not None:
        try:
            cfg = json.loads(Path(config_path).read_text())
        except (OSError, ValueError) as exc:
            raise InputError("IO_ERROR", f"cannot read config {config_path}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise InputError("INVALID_CONFIG", "config must be a flat JSON object")
        params.update({k.replace("-", "_"): v for k, v in cfg.items()})
        params["config"] = str(config_path)
    params.update(given)
    if params["threads"] is None:
        params["threads"] = int(os.environ.get("TAILEX_THREADS", "1") or 1)
    params["threads"] = max(1, int(params["threads"]))
    if command in ("estimate", "scan") and not params.get("file"):
        raise InputError("MISSING_ARGUMENT", "--file is required")
    return params


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    command = args.command
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="tailex: %(message)s", stream=sys.stderr)
    try:
        params = resolve_params(args)
        run = Run(command, params)
        return COMMANDS[command](params, run)
    except TailexError as exc:
        print(f"tailex: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception as exc:  # noqa: BLE001
        print(f"tailex: internal error: {exc!r}", file=sys.stderr)
        return HarnessError.exit_code


if __name__ == "__main__":
    sys.exit(main())
