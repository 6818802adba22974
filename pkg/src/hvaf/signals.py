"""Sums of damped complex exponentials, random ensembles, sampling masks and noise."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DimensionError, ModelError

MAX_SEPARATION_RESAMPLES = 10_000


@dataclass(frozen=True)
class ExponentialModel:
    """Parameters ``(f_r, c_r, tau_r)`` of ``y_k = sum_r c_r exp((2 pi i f_r - tau_r) k)``."""

    freqs: np.ndarray
    amps: np.ndarray
    damping: np.ndarray
    warnings: tuple = field(default=(), compare=False)

    def __post_init__(self):
        f = np.atleast_1d(np.asarray(self.freqs, dtype=float))
        c = np.atleast_1d(np.asarray(self.amps, dtype=complex))
        tau = np.atleast_1d(np.asarray(self.damping, dtype=float))
        if not (f.shape == c.shape == tau.shape) or f.ndim != 1:
            raise ModelError("freqs, amps and damping must be 1-D of equal length")
        if f.size == 0:
            raise ModelError("model needs at least one component")
        if np.any(tau < 0):
            raise ModelError("damping factors must be nonnegative")
        object.__setattr__(self, "freqs", f)
        object.__setattr__(self, "amps", c)
        object.__setattr__(self, "damping", tau)

    @classmethod
    def undamped(cls, freqs, amps) -> "ExponentialModel":
        freqs = np.atleast_1d(freqs)
        return cls(freqs, amps, np.zeros(len(freqs)))

    def __len__(self):
        return self.freqs.size

    @property
    def nodes(self) -> np.ndarray:
        """``z_r = exp(2 pi i f_r - tau_r)``."""
        return np.exp(2j * np.pi * self.freqs - self.damping)

    def sorted(self) -> "ExponentialModel":
        order = np.argsort(self.freqs, kind="stable")
        return ExponentialModel(self.freqs[order], self.amps[order], self.damping[order], self.warnings)

    def to_records(self) -> list[dict]:
        return [
            {"f": float(f), "c_re": float(c.real), "c_im": float(c.imag), "tau": float(t)}
            for f, c, t in zip(self.freqs, self.amps, self.damping)
        ]

    @classmethod
    def from_records(cls, records) -> "ExponentialModel":
        if not records:
            raise ModelError("model needs at least one component")
        return cls(
            [r["f"] for r in records],
            [complex(r["c_re"], r["c_im"]) for r in records],
            [r.get("tau", 0.0) for r in records],
        )


@dataclass(frozen=True)
class ObservationSet:
    """Observed samples of a length-``n`` signal at sorted 1-based ``indices``."""

    n: int
    indices: np.ndarray
    values: Optional[np.ndarray] = None

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=int).ravel()
        if idx.size and (idx[0] < 1 or idx[-1] > self.n or np.any(np.diff(idx) <= 0)):
            raise DimensionError(f"indices must be strictly increasing within 1..{self.n}")
        object.__setattr__(self, "indices", idx)
        if self.values is not None:
            v = np.asarray(self.values, dtype=complex).ravel()
            if v.size != idx.size:
                raise DimensionError(f"{v.size} values for {idx.size} indices")
            object.__setattr__(self, "values", v)

    @classmethod
    def from_signal(cls, y, indices) -> "ObservationSet":
        y = np.asarray(y, dtype=complex)
        idx = np.asarray(indices, dtype=int)
        return cls(y.size, idx, y[idx - 1])

    @property
    def M(self) -> int:
        return self.indices.size

    @property
    def mask(self) -> np.ndarray:
        m = np.zeros(self.n, dtype=bool)
        m[self.indices - 1] = True
        return m

    def with_values(self, y) -> "ObservationSet":
        return ObservationSet.from_signal(y, self.indices)

    def zero_filled(self) -> np.ndarray:
        """Length-``n`` vector holding the observed values and zeros elsewhere."""
        if self.values is None:
            raise ModelError("observation set has no values")
        x = np.zeros(self.n, dtype=complex)
        x[self.indices - 1] = self.values
        return x


def synthesize(model: ExponentialModel, n: int) -> np.ndarray:
    """Samples ``y_1 .. y_n`` of the exponential sum."""
    if len(model) == 0:
        raise ModelError("empty model")
    k = np.arange(1, int(n) + 1)
    expo = np.outer(k, 2j * np.pi * model.freqs - model.damping)
    return np.exp(expo) @ model.amps


def vandermonde_factor(model: ExponentialModel, rows: int):
    """Vandermonde factor ``E`` (``rows x R``) and diagonal ``Sigma``.

    ``E[k, r] = z_r**k`` for ``k = 0 .. rows-1``. Because samples start at
    ``k = 1``, one power of ``z_r`` is folded into ``Sigma = diag(c_r z_r)``,
    so that ``hankelize(synthesize(model, 2*rows - 1)) == E @ Sigma @ E.T``.
    """
    z = model.nodes
    E = z[None, :] ** np.arange(int(rows))[:, None]
    return E, np.diag(model.amps * z)


def _wrap_distance(f: np.ndarray) -> float:
    if f.size < 2:
        return np.inf
    s = np.sort(f)
    gaps = np.diff(np.append(s, s[0] + 1.0))
    return float(gaps.min())


def _draw_amplitudes(rng, R: int) -> np.ndarray:
    m = rng.uniform(0.0, 1.0, R)
    theta = rng.uniform(0.0, 1.0, R)
    return (1.0 + 10.0 ** (0.5 * m)) * np.exp(2j * np.pi * theta)


def random_amplitudes(R: int, seed=None) -> np.ndarray:
    """``R`` complex amplitudes from the ensemble used by :func:`random_model`."""
    return _draw_amplitudes(np.random.default_rng(seed), int(R))


def random_model(R: int, damped: bool = False, seed=None, separation: Optional[float] = None) -> ExponentialModel:
    """Draw a model from the synthetic ensemble.

    Frequencies are uniform on [0, 1), amplitudes ``(1 + 10**(0.5 m)) e^{2 pi i theta}``
    with ``m, theta ~ U[0, 1]``, and (if ``damped``) ``tau = 1 / (10 + 30 u)``
    with ``u ~ U[0, 1]``. With ``separation`` the frequencies are redrawn until
    their minimum wrap-around distance is at least that value.
    """
    R = int(R)
    if R < 1:
        raise ModelError(f"need R >= 1, got {R}")
    if separation is not None and R * separation >= 1:
        raise ModelError(f"separation {separation} infeasible for R={R}")
    rng = np.random.default_rng(seed)
    f = rng.uniform(0.0, 1.0, R)
    if separation is not None:
        tries = 0
        while _wrap_distance(f) < separation:
            tries += 1
            if tries > MAX_SEPARATION_RESAMPLES:
                raise ModelError(f"no draw met separation {separation} after {tries - 1} resamples")
            f = rng.uniform(0.0, 1.0, R)
    c = _draw_amplitudes(rng, R)
    tau = 1.0 / (10.0 + 30.0 * rng.uniform(0.0, 1.0, R)) if damped else np.zeros(R)
    return ExponentialModel(f, c, tau)


def random_mask(n: int, M: int, seed=None) -> ObservationSet:
    """``M`` distinct indices out of ``1..n`` drawn uniformly, values unset."""
    if not 1 <= M <= n:
        raise DimensionError(f"need 1 <= M <= n, got M={M}, n={n}")
    rng = np.random.default_rng(seed)
    idx = np.sort(rng.choice(n, size=M, replace=False)) + 1
    return ObservationSet(n, idx)


def add_noise(obs: ObservationSet, sigma: float, seed=None) -> ObservationSet:
    """Add complex Gaussian noise scaled so that ``||e|| = sigma * ||values||``."""
    if obs.values is None:
        raise ModelError("observation set has no values")
    if sigma < 0:
        raise ValueError("noise level must be nonnegative")
    if sigma == 0:
        return obs
    rng = np.random.default_rng(seed)
    w = rng.standard_normal(obs.M) + 1j * rng.standard_normal(obs.M)
    e = sigma * np.linalg.norm(obs.values) * w / np.linalg.norm(w)
    return ObservationSet(obs.n, obs.indices, obs.values + e)


def normalize(x) -> np.ndarray:
    """Divide by the largest magnitude."""
    x = np.asarray(x, dtype=complex)
    peak = np.max(np.abs(x)) if x.size else 0.0
    if peak == 0:
        raise ModelError("cannot normalize an all-zero signal")
    return x / peak
