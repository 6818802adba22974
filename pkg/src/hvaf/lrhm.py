"""Nuclear-norm low-rank Hankel completion, used as a comparison baseline.

ADMM on ``min ||Z||_* s.t. Z = H x, P(x) = P(y)`` (or with a
``lam/2 ||P(x) - P(y)||^2`` term instead of the constraint).
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError
from .hankel import antidiag_weights, hankel_adjoint, hankelize
from .signals import ObservationSet
from .solver import SolverReport, StageRecord, _check_inputs
from .svt import soft_threshold_singular_values


@dataclass(frozen=True)
class LrhmConfig:
    mu0: float = 1e-2
    rho: float = 1.05
    lam: Optional[float] = None
    tol: float = 1e-7
    max_iters: int = 2000

    def __post_init__(self):
        if not self.mu0 > 0 or not 1 < self.rho <= 1.1 or not self.tol > 0 or self.max_iters < 1:
            raise ConfigError("LRHM needs mu0 > 0, 1 < rho <= 1.1, tol > 0, max_iters >= 1")
        if self.lam is not None and not self.lam > 0:
            raise ConfigError("lam must be > 0 in noisy mode")

    @classmethod
    def from_solver_config(cls, config, **overrides) -> "LrhmConfig":
        base = dict(mu0=config.mu0, rho=config.rho, lam=config.lam, tol=config.tol)
        base.update(overrides)
        return cls(**base)


def solve_lrhm(obs: ObservationSet, config: LrhmConfig = LrhmConfig()) -> SolverReport:
    """Recover the signal by nuclear-norm minimization of its Hankel matrix.

    Stops when both the relative change of ``x`` and the relative splitting
    gap ``||H x - Z|| / ||H x||`` are at most ``config.tol``.

    ``report.objective`` traces ``||H x||_*`` per iteration.
    """
    _check_inputs(obs)
    start = time.perf_counter()
    idx = obs.indices - 1
    x = obs.zero_filled()
    Hx = hankelize(x)
    w = antidiag_weights(Hx.shape).astype(float)
    lagr = np.zeros_like(Hx)
    mu = float(config.mu0)
    report = SolverReport(recovered=x, solver="lrhm")
    rel = np.inf
    for it in range(1, config.max_iters + 1):
        Z = soft_threshold_singular_values(Hx + lagr / mu, 1.0 / mu)
        target = hankel_adjoint(Z - lagr / mu)
        if config.lam is None:
            x_new = target / w
            x_new[idx] = obs.values
        else:
            num, den = mu * target, mu * w
            num[idx] += config.lam * obs.values
            den[idx] += config.lam
            x_new = num / den
        Hx = hankelize(x_new)
        gap = Hx - Z
        lagr = lagr + mu * gap
        mu *= config.rho
        ref = np.linalg.norm(x)
        rel = np.linalg.norm(x_new - x) / ref if ref > 0 else np.inf
        # x alone can stall while Z is still thresholded to zero
        primal = np.linalg.norm(gap) / max(np.linalg.norm(Hx), np.finfo(float).tiny)
        x = x_new
        report.objective.append(float(np.sum(np.linalg.svd(Hx, compute_uv=False))))
        if rel <= config.tol and primal <= config.tol:
            break
    done = bool(rel <= config.tol and primal <= config.tol)
    report.stages.append(StageRecord(0.0, it, float(rel), float(np.linalg.norm(gap)), done))
    report.recovered = x
    report.converged = done
    report.wall_time = time.perf_counter() - start
    return report
