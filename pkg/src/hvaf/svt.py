"""Singular value soft-thresholding (proximal map of the nuclear norm)."""
import numpy as np

from .errors import NumericalError


def soft_threshold_singular_values(X, t: float) -> np.ndarray:
    """Shrink the singular values of ``X`` by ``t``, clipping at zero.

    Parameters
    ----------
    X : array_like, shape (..., m, n)
        Matrix, or stack of matrices sharing one threshold.
    t : float
        Nonnegative threshold.

    Returns
    -------
    ndarray
        ``A @ diag(max(s - t, 0)) @ B^H`` where ``X = A diag(s) B^H``; the
        minimizer of ``t*||Z||_* + 0.5*||Z - X||_F^2``.
    """
    if t < 0:
        raise ValueError(f"threshold must be nonnegative, got {t}")
    X = np.asarray(X)
    try:
        A, s, Bh = np.linalg.svd(X, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD failed on matrix of shape {X.shape}: {exc}") from exc
    s = np.maximum(s - t, 0.0)
    return (A * s[..., None, :]) @ Bh


def nuclear_norm(X) -> float:
    return float(np.sum(np.linalg.svd(np.asarray(X), compute_uv=False)))
