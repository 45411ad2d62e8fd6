"""Input validation helpers used across the package."""
import numpy as np
from sklearn.utils import check_array

from .exceptions import DimensionError, NotSymmetricError

SYMMETRY_RTOL = 1e-10


def check_square_matrix(m, name="matrix"):
    """Return ``m`` as a finite float64 2-D square array."""
    try:
        arr = check_array(m, dtype=np.float64, ensure_2d=True,
                          ensure_all_finite=True, ensure_min_samples=1,
                          ensure_min_features=1, copy=False)
    except ValueError as exc:
        raise DimensionError(f"{name}: {exc}") from exc
    if arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {arr.shape}")
    return arr


def check_signal(x, n=None, name="signal"):
    """Return ``x`` as a finite 1-D float64 vector, optionally of length ``n``."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise DimensionError(f"{name} must be 1-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    if n is not None and arr.shape[0] != n:
        raise DimensionError(f"{name} has length {arr.shape[0]}, expected {n}")
    return arr


def check_signals(X, n=None, name="X"):
    """Validate a batch of signals laid out as rows, shape (n_samples, n)."""
    try:
        arr = check_array(X, dtype=np.float64, ensure_all_finite=True)
    except ValueError as exc:
        raise DimensionError(f"{name}: {exc}") from exc
    if n is not None and arr.shape[1] != n:
        raise DimensionError(
            f"{name} has {arr.shape[1]} columns, expected {n}")
    return arr


def is_symmetric(m, rtol=SYMMETRY_RTOL):
    scale = max(1.0, float(np.max(np.abs(m))) if m.size else 0.0)
    return bool(np.max(np.abs(m - m.T), initial=0.0) <= rtol * scale)


def check_symmetric(m, name="matrix", rtol=SYMMETRY_RTOL):
    if not is_symmetric(m, rtol):
        raise NotSymmetricError(
            f"{name} is not symmetric within relative tolerance {rtol:g}; "
            "spectral services require a real symmetric shift")
    return m


def check_same_dim(a, b, what="operands"):
    if a != b:
        raise DimensionError(f"{what} have mismatched dimensions {a} and {b}")
