"""Small numeric helpers used across modules."""
from __future__ import annotations

import os

import numpy as np

from .errors import GermlabError

# Fixed seed for every low-discrepancy / random placement in the package.
DEFAULT_SEED = 0x5EED

# 2 - golden ratio; fractional rotations by this are maximally equidistributed.
GOLDEN_FRAC = 0.3819660112501051


def package_seed() -> int:
    """Default seed, overridable through the GERMLAB_SEED environment variable."""
    raw = os.environ.get("GERMLAB_SEED")
    if raw is None:
        return DEFAULT_SEED
    try:
        return int(raw, 0)
    except ValueError as exc:
        raise GermlabError(f"GERMLAB_SEED must be an integer, got {raw!r}") from exc


def as_point_array(points, dim: int | None = None, name: str = "points") -> np.ndarray:
    """Coerce to a float (k, dim) array, validating shape and finiteness."""
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise GermlabError(f"{name} must be a 2-d array, got shape {arr.shape}")
    if dim is not None and arr.shape[1] != dim:
        raise GermlabError(f"{name} must have dimension {dim}, got {arr.shape[1]}")
    if not np.all(np.isfinite(arr)):
        raise GermlabError(f"{name} contains non-finite entries")
    return arr


def row_norms(arr: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(arr * arr, axis=-1))


def normalize_rows(arr: np.ndarray) -> np.ndarray:
    """Normalize each row to unit length; zero rows are rejected."""
    norms = row_norms(arr)
    if np.any(norms == 0.0):
        raise GermlabError("cannot normalize a zero vector")
    return arr / norms[:, None]


def pairwise_distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Dense Euclidean distance matrix, brute force. Shapes (p, n), (q, n) -> (p, q)."""
    diff = a[:, None, :] - b[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=-1))


def lexsort_rows(arr: np.ndarray) -> np.ndarray:
    """Indices sorting rows lexicographically (first coordinate most significant)."""
    if arr.shape[0] == 0:
        return np.array([], dtype=int)
    return np.lexsort(tuple(arr[:, c] for c in range(arr.shape[1] - 1, -1, -1)))


def golden_fractions(count: int, seed_offset: int = 0) -> np.ndarray:
    """`count` low-discrepancy fractions in [0, 1), deterministic in seed_offset."""
    base = (seed_offset * GOLDEN_FRAC) % 1.0
    return (base + GOLDEN_FRAC * np.arange(count)) % 1.0


def ball_points(dim: int, count: int, seed: int | None = None) -> np.ndarray:
    """Deterministic pseudo-random points in the closed unit ball."""
    rng = np.random.default_rng(package_seed() if seed is None else seed)
    raw = rng.standard_normal((count, dim))
    radii = rng.random(count) ** (1.0 / dim)
    norms = row_norms(raw)
    norms[norms == 0.0] = 1.0
    return raw / norms[:, None] * radii[:, None]


def fit_slope(x: np.ndarray, y: np.ndarray) -> float:
    """Least-squares slope of y against x."""
    if len(x) < 2:
        raise GermlabError("need at least two points to fit a slope")
    return float(np.polyfit(np.asarray(x, dtype=float), np.asarray(y, dtype=float), 1)[0])
