"""Input coercion for collections of paths."""
import numpy as np

from .signature import PathSample


def check_path(x) -> PathSample:
    """Coerce a single path to :class:`PathSample`.

    Accepts a ``PathSample``, an ``(n, d)`` or ``(n,)`` array observed on the
    uniform grid, or a ``(times, points)`` pair.
    """
    if isinstance(x, PathSample):
        return x
    if isinstance(x, tuple) and len(x) == 2:
        return PathSample(*x)
    return PathSample.uniform(np.asarray(x, dtype=np.float64))


def check_paths(X) -> list:
    """Coerce a collection of paths (list or ``(samples, n, d)`` array)."""
    if isinstance(X, np.ndarray):
        if X.ndim == 2:
            X = X[:, :, None]
        if X.ndim != 3:
            raise ValueError(f"path arrays must have shape (samples, n, d), got {X.shape}")
    paths = [check_path(x) for x in X]
    if not paths:
        raise ValueError("expected at least one path")
    dims = {p.dim for p in paths}
    if len(dims) != 1:
        raise ValueError(f"paths have mixed dimensions {sorted(dims)}")
    return paths
