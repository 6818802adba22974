"""Monte-Carlo harnesses: phase transitions, rank sweeps, parameter estimation,
frequency identifiability and parameter sensitivity.

Every trial draws its own generators from ``SeedSequence([seed, *key])`` so a
cell can be re-run in isolation and trial order never changes the result.
Set ``HVAF_WORKERS`` (or pass ``workers``) to spread trials over processes.
"""
from __future__ import annotations

import csv
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .esprit import estimate, estimation_success, parameter_errors
from .lrhm import LrhmConfig, solve_lrhm
from .metrics import recovery_success, rlne
from .signals import (
    ExponentialModel,
    ObservationSet,
    add_noise,
    normalize,
    random_amplitudes,
    random_mask,
    random_model,
    synthesize,
)
from .solver import SolverConfig, solve

log = logging.getLogger(__name__)

SOLVERS = ("hvaf", "lrhm")

# the five-peak signal with 0.5/127 and 1.5/127 spacings
FIVE_PEAK_FREQS = (0.2 - 0.5 / 127, 0.2, 0.2 + 0.5 / 127, 0.25, 0.25 + 1.5 / 127)


def trial_seeds(seed: int, *key: int, count: int = 3) -> list[np.random.SeedSequence]:
    """Independent child seeds for one trial identified by ``key``."""
    return np.random.SeedSequence([int(seed), *map(int, key)]).spawn(count)


def default_workers() -> int:
    return max(1, int(os.environ.get("HVAF_WORKERS", "1")))


def _map(fn, jobs, workers: Optional[int]):
    workers = default_workers() if workers is None else workers
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def run_solver(obs: ObservationSet, solver: str, config: SolverConfig):
    if solver == "hvaf":
        return solve(obs, config)
    if solver == "lrhm":
        return solve_lrhm(obs, LrhmConfig.from_solver_config(config))
    raise ValueError(f"unknown solver {solver!r}")


@dataclass
class PhaseGridSpec:
    """Grid of (R, M) cells with ``trials`` seeded trials per cell.

    ``options`` are :class:`SolverConfig` keyword overrides; the rank
    defaults to the true ``R`` of each cell unless ``rank`` is set.
    """

    R_values: list[int]
    M_values: list[int]
    n: int = 127
    trials: int = 20
    damped: bool = False
    separation: Optional[float] = None
    solver: str = "hvaf"
    rank: Optional[int] = None
    options: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        bad = []
        if not self.R_values or any(int(r) < 1 for r in self.R_values):
            bad.append("R_values: every entry must be >= 1")
        if not self.M_values or any(not 1 <= int(m) <= self.n for m in self.M_values):
            bad.append(f"M_values: every entry must lie in 1..n={self.n}")
        if int(self.trials) < 1:
            bad.append("trials: must be >= 1")
        if self.solver not in SOLVERS:
            bad.append(f"solver: must be one of {SOLVERS}")
        if bad:
            raise ValueError("invalid PhaseGridSpec: " + "; ".join(bad))

    @classmethod
    def from_dict(cls, data: dict) -> "PhaseGridSpec":
        known = set(cls.__dataclass_fields__)
        unknown = sorted(set(data) - known)
        missing = sorted(k for k in ("R_values", "M_values") if k not in data)
        if unknown or missing:
            raise ValueError(f"invalid PhaseGridSpec: unknown fields {unknown}, missing fields {missing}")
        return cls(**data)

    def config(self, R: int) -> SolverConfig:
        return SolverConfig(rank=self.rank or R, **self.options)


def _phase_trial(job) -> bool:
    spec, R, M, t = job
    s_model, s_mask, _ = trial_seeds(spec.seed, R, M, t)
    try:
        model = random_model(R, spec.damped, seed=s_model, separation=spec.separation)
        y = normalize(synthesize(model, spec.n))
        obs = random_mask(spec.n, M, seed=s_mask).with_values(y)
        rep = run_solver(obs, spec.solver, spec.config(R))
        return recovery_success(rep.recovered, y)
    except Exception:
        log.exception("trial R=%d M=%d t=%d failed", R, M, t)
        return False


def phase_transition(spec: PhaseGridSpec, workers: Optional[int] = None) -> np.ndarray:
    """Success rate per cell, shape ``(len(R_values), len(M_values))``."""
    jobs = [(spec, R, M, t) for R in spec.R_values for M in spec.M_values for t in range(spec.trials)]
    ok = np.array(_map(_phase_trial, jobs, workers), dtype=float)
    return ok.reshape(len(spec.R_values), len(spec.M_values), spec.trials).mean(axis=2)


def phase_grid_rows(spec: PhaseGridSpec, grid: np.ndarray) -> list[dict]:
    return [
        {"R": R, "M": M, "trials": spec.trials, "success_rate": float(grid[i, j])}
        for i, R in enumerate(spec.R_values)
        for j, M in enumerate(spec.M_values)
    ]


def _rank_trial(job) -> bool:
    R_true, M, rank, t, n, damped, options, seed = job
    s_model, s_mask, _ = trial_seeds(seed, R_true, M, t)
    model = random_model(R_true, damped, seed=s_model)
    y = normalize(synthesize(model, n))
    obs = random_mask(n, M, seed=s_mask).with_values(y)
    try:
        rep = solve(obs, SolverConfig(rank=rank, **options))
    except Exception:
        log.exception("rank trial rank=%d t=%d failed", rank, t)
        return False
    return recovery_success(rep.recovered, y)


def rank_sweep(
    R_true: int,
    M: int,
    rank_values: Sequence[int],
    trials: int,
    options: Optional[dict] = None,
    seed: int = 0,
    n: int = 127,
    damped: bool = False,
    workers: Optional[int] = None,
) -> list[float]:
    """Success rate for each preset rank. Trial ``t`` uses the same signal and
    mask for every rank, so rates are compared on matched draws."""
    options = options or {}
    jobs = [(R_true, M, r, t, n, damped, options, seed) for r in rank_values for t in range(trials)]
    ok = np.array(_map(_rank_trial, jobs, workers), dtype=float).reshape(len(rank_values), trials)
    return ok.mean(axis=1).tolist()


def five_peak_model(phases=None) -> ExponentialModel:
    """The undamped five-peak test signal; unit magnitudes unless ``phases`` differ."""
    phases = np.zeros(5) if phases is None else np.asarray(phases)
    return ExponentialModel.undamped(FIVE_PEAK_FREQS, np.exp(2j * np.pi * phases))


def _estimation_trial(job) -> dict:
    model, M, t, n, config, seed, resample = job
    s_amps, s_mask, _ = trial_seeds(seed, len(model), M, t)
    if resample:
        model = ExponentialModel(model.freqs, random_amplitudes(len(model), s_amps), model.damping)
    y = synthesize(model, n)
    obs = random_mask(n, M, seed=s_mask).with_values(y)
    rep = solve(obs, config)
    est = estimate(rep.recovered, len(model))
    ferr, cerr = parameter_errors(model, est)
    return {
        "M": M,
        "trial": t,
        "rlne": rlne(rep.recovered, y),
        "freq_error": ferr,
        "amp_error": cerr,
        "success": estimation_success(model, est),
    }


def estimation_benchmark(
    model: ExponentialModel,
    M_values: Sequence[int],
    trials: int,
    config: SolverConfig,
    seed: int = 0,
    n: int = 127,
    workers: Optional[int] = None,
    resample_amplitudes: bool = False,
) -> tuple[list[float], list[dict]]:
    """Fraction of trials per ``M`` where recovery followed by ESPRIT meets the
    parameter-estimation criterion; also returns the per-trial rows.

    With ``resample_amplitudes`` each trial keeps the frequencies and damping
    of ``model`` but draws fresh amplitudes from the synthetic ensemble.
    """
    jobs = [(model, M, t, n, config, seed, resample_amplitudes) for M in M_values for t in range(trials)]
    rows = _map(_estimation_trial, jobs, workers)
    rates = [float(np.mean([r["success"] for r in rows if r["M"] == M])) for M in M_values]
    return rates, rows


def two_tone_model(separation: float, f1: float = 0.3, amps=(0.51, 0.66)) -> ExponentialModel:
    return ExponentialModel.undamped([f1, f1 + separation], list(amps))


def _identifiability_trial(job) -> dict:
    sep, M, n, config, seed, mask_seed = job
    model = two_tone_model(sep)
    y = synthesize(model, n)
    obs = random_mask(n, M, seed=mask_seed).with_values(y)
    rep = solve(obs, config)
    est = estimate(rep.recovered, 2)
    mags = np.abs(est.amps)
    return {
        "separation": sep,
        "M": M,
        "rlne": rlne(rep.recovered, y),
        "est_freqs": est.freqs.tolist(),
        "est_amps": mags.tolist(),
        "min_amp": float(mags.min()),
        "converged": rep.converged,
    }


def identifiability_probe(
    separations: Sequence[float],
    M_values: Sequence[int],
    config: SolverConfig,
    seed: int = 0,
    n: int = 127,
    trials: int = 1,
    workers: Optional[int] = None,
) -> list[dict]:
    """Two-tone recovery for each (separation, M): RLNE and the ESPRIT model.

    Trial ``t`` of a given ``M`` uses the same mask for every separation.
    """
    jobs = [
        (sep, M, n, config, seed, trial_seeds(seed, M, t)[1])
        for sep in separations
        for M in M_values
        for t in range(trials)
    ]
    rows = _map(_identifiability_trial, jobs, workers)
    for i, row in enumerate(rows):
        row["trial"] = i % trials
    return rows


# lambda used per SNR when sweeping beta or mu0 (the best lambda per noise level)
LAMBDA_FOR_SNR = {10: 200.0, 15: 500.0, 20: 1000.0}


def _sensitivity_trial(job) -> float:
    parameter, value, snr, t, n, R, M, base, seed = job
    s_model, s_mask, s_noise = trial_seeds(seed, R, M, t)
    model = random_model(R, False, seed=s_model)
    y = normalize(synthesize(model, n))
    obs = random_mask(n, M, seed=s_mask).with_values(y)
    sigma = 10.0 ** (-snr / 20.0)
    noisy = add_noise(obs, sigma, seed=s_noise)
    opts = dict(base)
    opts.setdefault("lam", LAMBDA_FOR_SNR.get(snr, 500.0))
    key = {"lambda": "lam", "beta": "beta0", "mu0": "mu0"}[parameter]
    opts[key] = value
    opts.setdefault("rank", R)
    rep = solve(noisy, SolverConfig(**opts))
    return rlne(rep.recovered, y)


def sensitivity_sweep(
    parameter: str,
    values: Sequence[float],
    snr_values: Sequence[float],
    trials: int,
    seed: int = 0,
    base: Optional[dict] = None,
    n: int = 127,
    R: int = 5,
    M: int = 64,
    workers: Optional[int] = None,
) -> list[dict]:
    """Mean RLNE of noisy-mode recovery for each (value, SNR).

    ``parameter`` is ``"lambda"``, ``"beta"`` (initial continuation value) or
    ``"mu0"``. Unless given in ``base``, lambda follows :data:`LAMBDA_FOR_SNR`,
    mu0 is 0.05 and beta0 is 32. The same signals, masks and noise are reused across values.
    """
    if parameter not in ("lambda", "beta", "mu0"):
        raise ValueError(f"unknown parameter {parameter!r}")
    base = {"mu0": 0.05, "beta0": 32.0, **(base or {})}
    jobs = [
        (parameter, v, snr, t, n, R, M, base, seed)
        for v in values
        for snr in snr_values
        for t in range(trials)
    ]
    errs = np.array(_map(_sensitivity_trial, jobs, workers)).reshape(len(values), len(snr_values), trials)
    return [
        {"parameter": parameter, "value": float(v), "snr_db": float(snr), "trials": trials, "mean_rlne": float(errs[i, j].mean())}
        for i, v in enumerate(values)
        for j, snr in enumerate(snr_values)
    ]


DEFAULT_COLUMN_LAMBDA = 500.0


def _column_trial(job):
    col, obs, config, solver = job
    try:
        return col, run_solver(obs, solver, config).recovered, None
    except Exception as exc:  # reported per column
        return col, None, f"{type(exc).__name__}: {exc}"


def solve_columns(
    matrix,
    masks: Sequence[ObservationSet],
    config: SolverConfig,
    solver: str = "hvaf",
    workers: Optional[int] = None,
):
    """Recover each column of ``matrix`` independently from its own mask.

    Columns are solved in noisy mode; ``config.lam`` of None is replaced by
    :data:`DEFAULT_COLUMN_LAMBDA`. Returns ``(recovered, errors)`` where failed columns are left as NaN and
    ``errors`` maps column index (0-based) to the failure message.
    """
    matrix = np.asarray(matrix, dtype=complex)
    if len(masks) != matrix.shape[1]:
        raise ValueError(f"{len(masks)} masks for {matrix.shape[1]} columns")
    if config.lam is None:
        config = replace(config, lam=DEFAULT_COLUMN_LAMBDA)
    jobs = [(j, masks[j].with_values(matrix[:, j]), config, solver) for j in range(matrix.shape[1])]
    out = np.full(matrix.shape, np.nan, dtype=complex)
    errors = {}
    for j, col, err in _map(_column_trial, jobs, workers):
        if err is None:
            out[:, j] = col
        else:
            errors[j] = err
    return out, errors


def damped_matrix(n: int, m: int, R: int, seed: int = 0) -> np.ndarray:
    """``n x m`` matrix whose columns are normalized damped exponential sums."""
    seeds = trial_seeds(seed, n, m, R, count=m)
    cols = [synthesize(random_model(R, True, seed=s), n) for s in seeds]
    X = np.stack(cols, axis=1)
    return X / np.max(np.abs(X))


def write_csv(rows: list[dict], path) -> None:
    if not rows:
        raise ValueError("nothing to write")
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: (json.dumps(v) if isinstance(v, list) else v) for k, v in row.items()})


def write_manifest(path, spec, seed: int, summary) -> None:
    payload = {"spec": asdict(spec) if hasattr(spec, "__dataclass_fields__") else spec, "seed": seed, "summary": summary}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
