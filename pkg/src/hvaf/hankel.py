"""Hankel lifting of vectors, its adjoint, pseudoinverse and column selectors.

Indices in the public API are 1-based (``column_select``/``column_embed``),
arrays are ordinary 0-based numpy arrays.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import DimensionError


class HankelShape(NamedTuple):
    """Row and column counts of a Hankel matrix built from ``n1 + n2 - 1`` samples."""

    n1: int
    n2: int

    @property
    def n(self) -> int:
        return self.n1 + self.n2 - 1


def _check_shape(shape) -> HankelShape:
    n1, n2 = int(shape[0]), int(shape[1])
    if n1 < 1 or n2 < 1:
        raise DimensionError(f"Hankel shape must be positive, got ({n1}, {n2})")
    return HankelShape(n1, n2)


def default_square_shape(n: int) -> HankelShape:
    """Square shape for odd ``n``; one extra row for even ``n``."""
    n = int(n)
    if n < 1:
        raise DimensionError(f"signal length must be >= 1, got {n}")
    n1 = n // 2 + 1
    return HankelShape(n1, n + 1 - n1)


def _index_grid(shape: HankelShape) -> np.ndarray:
    return np.add.outer(np.arange(shape.n1), np.arange(shape.n2))


def hankelize(x, shape=None) -> np.ndarray:
    """Return the ``n1 x n2`` matrix with entry ``(i, j)`` equal to ``x[i + j]``.

    ``x`` may carry extra leading axes; the Hankel structure is built over
    the last axis. ``shape`` defaults to :func:`default_square_shape`.
    """
    x = np.asarray(x)
    if shape is None:
        shape = default_square_shape(x.shape[-1])
    shape = _check_shape(shape)
    if x.shape[-1] != shape.n:
        raise DimensionError(
            f"length {x.shape[-1]} does not match Hankel shape {tuple(shape)} "
            f"(needs {shape.n})"
        )
    return x[..., _index_grid(shape)]


def hankel_adjoint(X) -> np.ndarray:
    """Sum each anti-diagonal of ``X`` (leading batch axes allowed)."""
    X = np.asarray(X)
    if X.ndim < 2 or X.shape[-1] == 0 or X.shape[-2] == 0:
        raise DimensionError(f"expected a non-empty matrix, got shape {X.shape}")
    n1, n2 = X.shape[-2:]
    out = np.zeros(X.shape[:-2] + (n1 + n2 - 1,), dtype=np.result_type(X.dtype, np.float64))
    for i in range(n1):
        out[..., i : i + n2] += X[..., i, :]
    return out


def antidiag_weights(shape) -> np.ndarray:
    """Number of entries on each anti-diagonal, i.e. the diagonal of ``R* R``."""
    shape = _check_shape(shape)
    k = np.arange(1, shape.n + 1)
    return np.minimum.reduce([k, np.full_like(k, shape.n1), np.full_like(k, shape.n2), shape.n + 1 - k])


def hankel_pinv(X) -> np.ndarray:
    """Anti-diagonal averaging; the left inverse of :func:`hankelize`."""
    X = np.asarray(X)
    s = hankel_adjoint(X)
    return s / antidiag_weights(X.shape[-2:])


def column_select(X, r: int) -> np.ndarray:
    """Return column ``r`` (1-based) of ``X``."""
    X = np.asarray(X)
    if not 1 <= r <= X.shape[1]:
        raise IndexError(f"column {r} out of range 1..{X.shape[1]}")
    return X[:, r - 1].copy()


def column_embed(x, r: int, width: int) -> np.ndarray:
    """Matrix of ``width`` columns that is zero except column ``r`` (1-based) = ``x``."""
    x = np.asarray(x)
    if not 1 <= r <= width:
        raise IndexError(f"column {r} out of range 1..{width}")
    out = np.zeros((x.shape[0], width), dtype=np.result_type(x.dtype, np.float64))
    out[:, r - 1] = x
    return out
