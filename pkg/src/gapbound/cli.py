"""Command-line harness: spectral reports, bounds, sweeps over n, and rate fits.

Exit codes: 0 success, 1 bad input, 2 assumption failure reported,
3 assumption failure that aborts a sweep.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import bounds, markov_core, simulate, spectral
from .errors import GapboundError, TooLarge

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_ASSUMPTION_REPORT = 2
EXIT_ASSUMPTION_ABORT = 3

SWEEP_COLUMNS = ("n", "empirical_error", "std_error", "exact_error",
                 "theorem_bound", "prop_bound", "ratio")
DEFAULT_N_GRID = [2**k for k in range(4, 15)]
SEED_ENV = "GAPBOUND_SEED"


class InputError(Exception):
    pass


class AssumptionFailure(Exception):
    pass


def fmt(x: Optional[float]) -> str:
    """17 significant digits, so every double round-trips through the CSV."""
    if x is None:
        return ""
    return format(float(x), ".17g")


def load_json(arg, base: Optional[Path] = None):
    """Inline JSON object/array, a path to a JSON file, or an already-parsed value."""
    if not isinstance(arg, str):
        return arg
    text = arg.strip()
    if text.startswith(("{", "[")):
        return json.loads(text)
    path = Path(text)
    if base is not None and not path.is_absolute():
        path = base / path
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


# -- sweep configuration -----------------------------------------------------

@dataclass
class ExperimentConfig:
    chain: dict
    function: dict
    p: float
    nu: object = "stationary"
    n_grid: list = field(default_factory=lambda: list(DEFAULT_N_GRID))
    replicates: int = 1000
    n0: int = 0
    master_seed: int = 0
    mode: str = "both"

    def __post_init__(self):
        if not self.n_grid or any(int(n) != n or n < 1 for n in self.n_grid):
            raise InputError("n_grid must be a nonempty list of positive integers")
        if any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise InputError("n_grid must be strictly increasing")
        if not 1.0 <= float(self.p) <= 2.0:
            raise InputError("p must lie in [1, 2]")
        if self.mode not in ("empirical", "oracle", "both"):
            raise InputError(f"unknown mode {self.mode!r}")
        if self.replicates < 1 or self.n0 < 0:
            raise InputError("replicates must be >= 1 and n0 >= 0")

    @classmethod
    def from_json(cls, data: dict, base: Optional[Path] = None) -> "ExperimentConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise InputError(f"unknown config keys: {sorted(unknown)}")
        data = dict(data)
        try:
            data["chain"] = dict(load_json(data["chain"], base))
            if "kernel" in data["chain"]:
                data["chain"]["kernel"] = load_json(data["chain"]["kernel"], base)
            data["function"] = load_json(data["function"], base)
            if data.get("nu", "stationary") != "stationary":
                data["nu"] = load_json(data["nu"], base)
        except KeyError as exc:
            raise InputError(f"config is missing {exc}") from None
        seed = os.environ.get(SEED_ENV)
        if seed is not None:
            data["master_seed"] = int(seed)
        return cls(**data)


@dataclass
class PreparedSweep:
    chain: simulate.ChainSpec
    f: object
    pi_f: float
    f_norm: float
    s: float
    M: float


def prepare(cfg: ExperimentConfig) -> PreparedSweep:
    p = float(cfg.p)
    q = markov_core.conjugate(p)
    kind = cfg.chain.get("kind", "finite")
    if kind == "finite":
        K = markov_core.kernel_from_json(load_json(cfg.chain["kernel"]))
        pi = markov_core.stationary_distribution(K)
        nu = pi if cfg.nu == "stationary" else markov_core.Distribution.from_json(cfg.nu)
        if "values" not in cfg.function:
            raise InputError("finite chains need a function with 'values'")
        f = markov_core.StateFunction.from_json(cfg.function)
        if f.values.shape[0] != K.m:
            raise InputError("function has the wrong number of states")
        s = spectral.inverse_norm_s(K, pi)
        if math.isinf(s):
            raise AssumptionFailure("Id - K is singular on the centred subspace")
        return PreparedSweep(
            chain=simulate.ChainSpec.finite(K, nu),
            f=f,
            pi_f=markov_core.mean(f, pi),
            f_norm=markov_core.lp_norm(f, pi, p),
            s=s,
            M=markov_core.radon_nikodym_norm(nu, pi, q),
        )
    if kind == "ar1":
        if cfg.nu != "stationary":
            raise InputError("ar1 chains start from their stationary law")
        ht = cfg.function.get("heavy_tail")
        if ht is None:
            raise InputError("ar1 chains need a 'heavy_tail' function")
        f = simulate.heavy_tail_function(ht["alpha"], ht.get("x0", 0.0), p)
        s, _ = simulate.ar1_constants(cfg.chain["rho"])
        return PreparedSweep(simulate.ChainSpec.ar1(cfg.chain["rho"]), f, f.pi_f, f.lp_norm, s, 1.0)
    raise InputError(f"unknown chain kind {kind!r}")


def run_sweep(cfg: ExperimentConfig) -> list[dict]:
    prep = prepare(cfg)
    p = float(cfg.p)
    rows = []
    for n in cfg.n_grid:
        n = int(n)
        row = dict.fromkeys(SWEEP_COLUMNS)
        row["n"] = n
        if p > 1:
            row["theorem_bound"] = bounds.theorem_abs_error_bound(
                bounds.BoundInputs(p=p, s=prep.s, f_norm=prep.f_norm, M=prep.M, n=n))
        row["prop_bound"] = bounds.prop_pmean_bound(p, prep.s, prep.f_norm, n)
        if cfg.mode in ("empirical", "both"):
            est = simulate.empirical_error(
                prep.chain, prep.f,
                simulate.RunSpec(n=n, n0=cfg.n0, replicates=cfg.replicates,
                                 master_seed=cfg.master_seed),
                power=1.0, pi_f=prep.pi_f)
            row["empirical_error"] = est.mean
            row["std_error"] = est.std_error
        if cfg.mode in ("oracle", "both") and prep.chain.kind == "finite":
            try:
                row["exact_error"] = simulate.exact_error_bruteforce(
                    prep.chain.kernel, prep.chain.nu, prep.f, n, cfg.n0, 1.0)
            except TooLarge:
                pass
        observed = row["empirical_error"] if row["empirical_error"] is not None else row["exact_error"]
        if observed is not None and row["theorem_bound"]:
            row["ratio"] = observed / row["theorem_bound"]
        rows.append(row)
    return rows


def sweep_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in rows:
        writer.writerow([str(row["n"])] + [fmt(row[c]) for c in SWEEP_COLUMNS[1:]])
    return buf.getvalue()


# -- rate fitting ------------------------------------------------------------

def fit_rate(n, values) -> tuple[float, float]:
    """OLS of ``log(value)`` on ``log(n)``; returns ``(slope, intercept)``."""
    n = np.asarray(n, dtype=np.float64)
    v = np.asarray(values, dtype=np.float64)
    if n.shape[0] < 3:
        raise InputError("need at least 3 rows to fit a rate")
    if np.any(~np.isfinite(v)) or np.any(v <= 0) or np.any(n <= 0):
        raise InputError("rate fits need positive values")
    slope, intercept = np.polyfit(np.log(n), np.log(v), 1)
    return float(slope), float(intercept)


def read_column(csv_text: str, column: str) -> tuple[list[float], list[float]]:
    reader = csv.DictReader(io.StringIO(csv_text))
    if reader.fieldnames is None or column not in reader.fieldnames or "n" not in reader.fieldnames:
        raise InputError(f"CSV has no column {column!r} (or no 'n' column)")
    ns, vals = [], []
    for rec in reader:
        if rec[column] in ("", None):
            raise InputError(f"missing value in column {column!r} at n={rec['n']}")
        ns.append(float(rec["n"]))
        vals.append(float(rec[column]))
    return ns, vals


# -- subcommands -------------------------------------------------------------

def _kernel_and_pi(arg):
    K = markov_core.kernel_from_json(load_json(arg))
    return K, markov_core.stationary_distribution(K)


def cmd_spectral(args) -> int:
    K, pi = _kernel_and_pi(args.kernel)
    report = spectral.spectral_report(K, pi)
    print(json.dumps(report.to_json()))
    if not report.assumption_holds:
        print("assumption1: fails", file=sys.stderr)
        return EXIT_ASSUMPTION_REPORT
    return EXIT_OK


def cmd_verify_identity(args) -> int:
    if args.n_max < 1:
        raise InputError("n_max must be >= 1")
    K, pi = _kernel_and_pi(args.kernel)
    ok = True
    print("n,residual,pass")
    for n in range(1, args.n_max + 1):
        r = spectral.verify_operator_identity(K, pi, n)
        passed = r <= spectral.IDENTITY_TOL
        ok &= passed
        print(f"{n},{fmt(r)},{int(passed)}")
    if not ok:
        print("identity: fails", file=sys.stderr)
        return EXIT_ASSUMPTION_REPORT
    return EXIT_OK


def cmd_bound(args) -> int:
    out = {"p": args.p, "s": args.s, "f_norm": args.f_norm, "M": args.M, "n": args.n,
           "rate": bounds.theorem_rate(args.p)}
    if args.p > 1:
        out["C_p"] = bounds.constant_Cp_theorem(args.p, args.s)
        out["theorem"] = bounds.theorem_abs_error_bound(
            bounds.BoundInputs(p=args.p, s=args.s, f_norm=args.f_norm, M=args.M, n=args.n))
    out["proposition"] = bounds.prop_pmean_bound(args.p, args.s, args.f_norm, args.n)
    out["corollary"] = bounds.corollary_pmean_bound(args.p, args.s, args.M_inf, args.f_norm, args.n)
    if args.p == 2:
        out["lemma"] = bounds.lemma_mse_bound(args.s, args.f_norm, args.n)
    print(json.dumps(out))
    return EXIT_OK


def cmd_sweep(args) -> int:
    path = Path(args.config)
    cfg = ExperimentConfig.from_json(load_json(str(path)), base=path.parent)
    try:
        rows = run_sweep(cfg)
    except AssumptionFailure as exc:
        print(f"assumption1: fails ({exc})", file=sys.stderr)
        return EXIT_ASSUMPTION_ABORT
    text = sweep_csv(rows)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_fit_rate(args) -> int:
    ns, vals = read_column(Path(args.csv).read_text(encoding="utf-8"), args.column)
    slope, intercept = fit_rate(ns, vals)
    reference = bounds.theorem_rate(args.p) if args.p is not None else None
    print(json.dumps({"column": args.column, "slope": slope, "intercept": intercept,
                      "reference": reference}))
    return EXIT_OK


def cmd_oracle(args) -> int:
    K, pi = _kernel_and_pi(args.kernel)
    f = markov_core.StateFunction.from_json(load_json(args.function))
    nu = pi if args.nu is None else markov_core.Distribution.from_json(load_json(args.nu))
    value = simulate.exact_error_bruteforce(K, nu, f, args.n, args.n0, args.power)
    print(json.dumps({"n": args.n, "n0": args.n0, "power": args.power, "exact_error": value}))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gapbound", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectral", help="spectral report of a kernel (JSON)")
    p.add_argument("kernel", help="kernel JSON file or inline JSON")
    p.set_defaults(func=cmd_spectral)

    p = sub.add_parser("verify-identity", help="residuals of the variance operator identity")
    p.add_argument("kernel")
    p.add_argument("--n-max", type=int, default=20)
    p.set_defaults(func=cmd_verify_identity)

    p = sub.add_parser("bound", help="evaluate the closed-form bounds")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--f-norm", type=float, required=True)
    p.add_argument("--M", type=float, default=1.0, help="L^q norm of d(nu)/d(pi)")
    p.add_argument("--M-inf", type=float, default=1.0, help="sup norm of d(nu)/d(pi)")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("sweep", help="error and bounds over a grid of n (CSV)")
    p.add_argument("config")
    p.add_argument("-o", "--output", help="write CSV here instead of stdout")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fit-rate", help="log-log slope of a sweep column")
    p.add_argument("csv")
    p.add_argument("--column", default="empirical_error")
    p.add_argument("--p", type=float, help="print the reference slope -(1 - 1/p)")
    p.set_defaults(func=cmd_fit_rate)

    p = sub.add_parser("oracle", help="exact error by path enumeration")
    p.add_argument("kernel")
    p.add_argument("--function", required=True, help='{"values": [...]} or a file')
    p.add_argument("--nu", help='{"weights": [...]} or a file; default stationary')
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--n0", type=int, default=0)
    p.add_argument("--power", type=float, default=1.0)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, GapboundError, KeyError, TypeError, OSError,
            json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
