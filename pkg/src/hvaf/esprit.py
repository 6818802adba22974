"""Least-squares ESPRIT for sums of damped exponentials."""
import warnings

import numpy as np

from .errors import ModelError, RankError
from .hankel import default_square_shape, hankelize
from .signals import ExponentialModel

COND_WARN = 1e12
ESTIMATION_TOL = 1e-3


def estimate(x, rank: int) -> ExponentialModel:
    """Estimate ``rank`` components ``(f, c, tau)`` from the samples ``x_1..x_n``.

    The signal subspace is the leading ``rank`` left singular vectors of the
    Hankel matrix of ``x``; its shift invariance gives the nodes ``z_r`` as
    eigenvalues of the least-squares rotation. Damping is clamped at zero and
    amplitudes are the least-squares Vandermonde fit. Components come back
    sorted by frequency.
    """
    x = np.asarray(x, dtype=complex)
    rank = int(rank)
    if rank < 1 or x.size < 2 * rank + 1:
        raise RankError(f"need 1 <= rank and n >= 2*rank+1, got rank={rank}, n={x.size}")
    shape = default_square_shape(x.size)
    if rank > min(shape.n1 - 1, shape.n2):
        raise RankError(f"rank {rank} exceeds subspace capacity of a {shape} Hankel matrix")
    A = np.linalg.svd(hankelize(x, shape), full_matrices=False)[0][:, :rank]
    psi = np.linalg.lstsq(A[:-1], A[1:], rcond=None)[0]
    z = np.linalg.eigvals(psi)
    freqs = np.mod(np.angle(z) / (2 * np.pi), 1.0)
    # mod can round a tiny negative angle up to exactly 1.0
    freqs[freqs >= 1.0] = 0.0
    with np.errstate(divide="ignore"):
        damping = np.maximum(-np.log(np.abs(z)), 0.0)
    nodes = np.exp(2j * np.pi * freqs - damping)
    vander = nodes[None, :] ** np.arange(1, x.size + 1)[:, None]
    amps = np.linalg.lstsq(vander, x, rcond=None)[0]
    notes = ()
    cond = np.linalg.cond(vander)
    if not np.isfinite(cond) or cond > COND_WARN:
        notes = (f"ill-conditioned Vandermonde fit (cond={cond:.3g})",)
        warnings.warn(notes[0], RuntimeWarning, stacklevel=2)
    return ExponentialModel(freqs, amps, damping, notes).sorted()


def parameter_errors(truth: ExponentialModel, est: ExponentialModel) -> tuple[float, float]:
    """Relative frequency and magnitude errors after pairing by sorted frequency."""
    if len(truth) != len(est):
        raise ModelError(f"cannot compare {len(truth)} components with {len(est)}")
    t, e = truth.sorted(), est.sorted()
    ferr = np.linalg.norm(e.freqs - t.freqs) / np.linalg.norm(t.freqs)
    cerr = np.linalg.norm(np.abs(e.amps) - np.abs(t.amps)) / np.linalg.norm(np.abs(t.amps))
    return float(ferr), float(cerr)


def estimation_success(truth: ExponentialModel, est: ExponentialModel, tol: float = ESTIMATION_TOL) -> bool:
    """True when both relative errors are at most ``tol``."""
    ferr, cerr = parameter_errors(truth, est)
    return ferr <= tol and cerr <= tol
