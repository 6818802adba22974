"""Reconstruction error metrics."""
import numpy as np

SUCCESS_TOL = 1e-3


def rlne(x, y) -> float:
    """Relative least normalized error ``||x - y||_F / ||y||_F``."""
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape:
        raise ValueError(f"shape mismatch {x.shape} vs {y.shape}")
    ref = np.linalg.norm(y)
    if ref == 0:
        raise ValueError("reference is zero")
    return float(np.linalg.norm(x - y) / ref)


def recovery_success(x, y, tol: float = SUCCESS_TOL) -> bool:
    return rlne(x, y) <= tol


def snr_db(noise, observed) -> float:
    """``-10 log10(||e||^2 / ||P_Omega y||^2)``."""
    ref = np.linalg.norm(observed)
    if ref == 0:
        raise ValueError("observed signal is zero")
    e = np.linalg.norm(noise)
    if e == 0:
        return float("inf")
    return float(-20.0 * np.log10(e / ref))
