"""Command-line entry point: ``hvaf generate|recover|recover-matrix|estimate|experiment``.

Exit codes: 0 success, 2 usage, 3 not converged, 4 I/O, 5 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import experiments as ex
from . import io
from .errors import ConfigError, DimensionError, ModelError, NumericalError, RankError
from .esprit import estimate
from .lrhm import LrhmConfig, solve_lrhm
from .metrics import rlne
from .signals import ObservationSet, normalize, random_mask, random_model, synthesize
from .solver import SolverConfig, solve

EXIT_OK, EXIT_USAGE, EXIT_NOT_CONVERGED, EXIT_IO, EXIT_NUMERICAL = 0, 2, 3, 4, 5


class UsageError(Exception):
    pass


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _seed(args) -> int:
    if args.seed is None:
        args.seed = int(np.random.SeedSequence().entropy % 2**63)
    return args.seed


def _dump(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_generate(args) -> int:
    seed = _seed(args)
    try:
        model = random_model(args.R, args.damped, seed=seed, separation=args.separation)
    except ModelError as exc:
        raise UsageError(str(exc)) from None
    y = synthesize(model, args.n)
    if not args.raw:
        peak = np.max(np.abs(y))
        y = normalize(y)
        model = type(model)(model.freqs, model.amps / peak, model.damping)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    io.write_signal(out / "signal.csv", y)
    io.write_model(out / "model.json", model)
    _dump(out / "manifest.json", {"command": "generate", "n": args.n, "R": args.R, "damped": args.damped,
                                  "separation": args.separation, "seed": seed, "normalized": not args.raw})
    return EXIT_OK


def _solver_config(args) -> SolverConfig:
    return SolverConfig(
        rank=args.rank,
        beta0=args.beta0,
        beta_max=args.beta_max,
        mu0=args.mu0,
        rho=args.rho,
        lam=args.lam if args.noisy else None,
        tol=args.tol,
        max_inner_iters=args.max_iters,
        init=args.init,
        seed=args.seed,
    )


def _run(obs, args):
    config = _solver_config(args)
    if args.solver == "lrhm":
        return solve_lrhm(obs, LrhmConfig.from_solver_config(config, max_iters=args.max_iters * 4))
    return solve(obs, config)


def cmd_recover(args) -> int:
    y = io.read_signal(args.signal)
    if args.mask:
        idx = io.read_mask(args.mask)
        if idx.size and idx[-1] > y.size:
            raise UsageError(f"mask index {idx[-1]} exceeds signal length {y.size}")
    elif args.M is not None:
        if args.M > y.size:
            raise UsageError(f"--M {args.M} exceeds signal length {y.size}")
        idx = random_mask(y.size, args.M, seed=_seed(args)).indices
    else:
        idx = np.arange(1, y.size + 1)
    try:
        rep = _run(ObservationSet.from_signal(y, idx), args)
    except ConfigError as exc:
        raise UsageError(str(exc)) from None
    io.write_signal(args.out, rep.recovered)
    ref = io.read_signal(args.reference) if args.reference else y
    payload = rep.to_dict()
    payload.update({"M": int(idx.size), "n": int(y.size), "seed": args.seed, "rlne": rlne(rep.recovered, ref)})
    if args.report:
        _dump(args.report, payload)
    return EXIT_OK if rep.converged else EXIT_NOT_CONVERGED


def cmd_recover_matrix(args) -> int:
    X = io.read_matrix(args.matrix)
    n, m = X.shape
    if args.masks:
        cols = {}
        for line, row in io._rows(args.masks, ["col", "index"]):
            cols.setdefault(int(row[0]), []).append(int(row[1]))
        masks = [ObservationSet(n, sorted(cols.get(j + 1, []))) for j in range(m)]
    else:
        M = max(1, int(round(args.fraction * n)))
        seeds = ex.trial_seeds(_seed(args), n, m, M, count=m)
        masks = [random_mask(n, M, seed=s) for s in seeds]
    config = _solver_config(args)
    rec, errors = ex.solve_columns(X, masks, config, solver=args.solver)
    io.write_matrix(args.out, np.nan_to_num(rec))
    if args.report:
        _dump(args.report, {"rlne": rlne(np.nan_to_num(rec), X), "failed_columns": {str(k + 1): v for k, v in errors.items()},
                            "seed": args.seed})
    return EXIT_OK if not errors else EXIT_NUMERICAL


def cmd_estimate(args) -> int:
    x = io.read_signal(args.signal)
    try:
        model = estimate(x, args.rank)
    except RankError as exc:
        raise UsageError(str(exc)) from None
    io.write_model(args.out, model)
    return EXIT_OK


def _run_experiment(spec: dict, workers):
    kind = spec.pop("kind", "phase_transition")
    seed = spec.get("seed", 0)
    if kind == "phase_transition":
        grid_spec = ex.PhaseGridSpec.from_dict(spec)
        grid = ex.phase_transition(grid_spec, workers=workers)
        return ex.phase_grid_rows(grid_spec, grid), asdict(grid_spec)
    allowed = {
        "rank_sweep": {"R_true", "M", "rank_values", "trials", "options", "seed", "n", "damped"},
        "sensitivity": {"parameter", "values", "snr_values", "trials", "seed", "base", "n", "R", "M"},
    }
    if kind not in allowed:
        raise ValueError(f"invalid experiment spec: kind must be one of phase_transition, {', '.join(allowed)}")
    unknown = sorted(set(spec) - allowed[kind])
    if unknown:
        raise ValueError(f"invalid {kind} spec: unknown fields {unknown}")
    if kind == "rank_sweep":
        missing = sorted({"R_true", "M", "rank_values", "trials"} - set(spec))
        if missing:
            raise ValueError(f"invalid rank_sweep spec: missing fields {missing}")
        rates = ex.rank_sweep(workers=workers, **spec)
        rows = [{"rank": r, "trials": spec["trials"], "success_rate": v} for r, v in zip(spec["rank_values"], rates)]
    else:
        missing = sorted({"parameter", "values", "snr_values", "trials"} - set(spec))
        if missing:
            raise ValueError(f"invalid sensitivity spec: missing fields {missing}")
        rows = ex.sensitivity_sweep(workers=workers, **spec)
    return rows, dict(spec, kind=kind, seed=seed)


def cmd_experiment(args) -> int:
    with open(args.spec) as fh:
        spec = json.load(fh)
    if not isinstance(spec, dict):
        raise UsageError("experiment spec must be a JSON object")
    try:
        rows, resolved = _run_experiment(dict(spec), args.workers)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    ex.write_csv(rows, out / "results.csv")
    ex.write_manifest(out / "manifest.json", resolved, resolved.get("seed", 0), rows)
    return EXIT_OK


def _add_solver_flags(p):
    p.add_argument("--rank", type=_positive_int, required=True, help="preset number of exponentials")
    p.add_argument("--solver", choices=ex.SOLVERS, default="hvaf")
    p.add_argument("--noisy", action="store_true", help="use the lambda-weighted data term")
    p.add_argument("--lambda", dest="lam", type=float, default=500.0)
    p.add_argument("--beta0", type=float, default=1.0)
    p.add_argument("--beta-max", type=float, default=2.0**30)
    p.add_argument("--mu0", type=float, default=1e-2)
    p.add_argument("--rho", type=float, default=1.05)
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--max-iters", type=_positive_int, default=500, help="inner-iteration cap per beta stage")
    p.add_argument("--init", choices=("svd", "random"), default="svd")
    p.add_argument("--seed", type=int)
    p.add_argument("--report", help="write a JSON report here")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hvaf", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="draw a random exponential signal")
    p.add_argument("--n", type=_positive_int, default=127)
    p.add_argument("--R", type=_positive_int, required=True)
    p.add_argument("--damped", action="store_true")
    p.add_argument("--separation", type=float)
    p.add_argument("--raw", action="store_true", help="skip max-magnitude normalization")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("recover", help="complete a partially observed signal")
    p.add_argument("--signal", required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--mask", help="file of observed 1-based indices")
    g.add_argument("--M", type=_positive_int, help="draw a random mask of this size")
    p.add_argument("--reference", help="full signal for the reported RLNE (defaults to --signal)")
    p.add_argument("--out", required=True)
    _add_solver_flags(p)
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("recover-matrix", help="complete each column of a matrix independently")
    p.add_argument("--matrix", required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--masks", help="CSV with header col,index")
    g.add_argument("--fraction", type=float, help="sampling fraction per column")
    p.add_argument("--out", required=True)
    _add_solver_flags(p)
    p.set_defaults(func=cmd_recover_matrix)

    p = sub.add_parser("estimate", help="ESPRIT parameter estimation")
    p.add_argument("--signal", required=True)
    p.add_argument("--rank", type=_positive_int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("experiment", help="run a Monte-Carlo experiment from a JSON spec")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--workers", type=_positive_int, help="trial processes (default: $HVAF_WORKERS or 1)")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))  # exits with status 2
    except io.ParseError as exc:
        print(f"hvaf: parse error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"hvaf: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DimensionError, ModelError, RankError) as exc:
        print(f"hvaf: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(f"hvaf: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
