"""Value types for set-germs at the origin and their multiscale discretizations.

A germ is known only through arbitrarily small neighbourhoods of 0, so every
limit statement ("x_i -> 0") is discretized here as a geometric ladder of
shells. Two germ encodings are provided: a finite multiscale point sample
(:class:`SampledGerm`, the JSON wire format) and a distance/sampler oracle
(:class:`GermOracle`, the universal analysis input).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._util import as_point_array, lexsort_rows, pairwise_distances, row_norms
from .errors import GermlabError, SchemaError

UNIT_TOL = 1e-12

DEFAULT_T0 = 1.0
DEFAULT_RATIO = 0.5
DEFAULT_DEPTH = 30


def take_fields(doc: dict, required: tuple[str, ...], optional: tuple[str, ...] = (),
                where: str = "document") -> dict:
    """Validate that `doc` has exactly the given fields; unknown fields are rejected."""
    if not isinstance(doc, dict):
        raise SchemaError(f"{where}: expected a JSON object, got {type(doc).__name__}")
    missing = [k for k in required if k not in doc]
    if missing:
        raise SchemaError(f"{where}: missing fields {missing}")
    unknown = [k for k in doc if k not in required and k not in optional]
    if unknown:
        raise SchemaError(f"{where}: unknown fields {unknown}")
    return doc


@dataclass(frozen=True)
class ScaleSchedule:
    """Geometric ladder t_k = t0 * r^k, k = 0..depth-1, controlling multiscale work."""

    t0: float
    r: float
    depth: int

    def __post_init__(self):
        if not (self.t0 > 0):
            raise GermlabError(f"t0 must be positive, got {self.t0}")
        if not (0 < self.r < 1):
            raise GermlabError(f"r must lie in (0, 1), got {self.r}")
        if self.depth < 2:
            raise GermlabError(f"depth must be at least 2, got {self.depth}")

    def scale(self, k: int) -> float:
        return self.t0 * self.r**k

    def scales(self) -> np.ndarray:
        return self.t0 * self.r ** np.arange(self.depth, dtype=float)

    def shells(self) -> list[tuple[float, float]]:
        """(inner, outer) annuli [t_k * r, t_k] for every ladder scale."""
        return [(self.scale(k) * self.r, self.scale(k)) for k in range(self.depth)]

    def fine_shells(self) -> list[tuple[float, float]]:
        """The finest ceil(depth/2) shells, the ones that witness the limit."""
        keep = math.ceil(self.depth / 2)
        return self.shells()[self.depth - keep:]

    def to_json_dict(self) -> dict:
        return {"t0": self.t0, "r": self.r, "depth": self.depth}

    @classmethod
    def from_json_dict(cls, doc: dict) -> "ScaleSchedule":
        take_fields(doc, ("t0", "r", "depth"), where="ScaleSchedule")
        return cls(float(doc["t0"]), float(doc["r"]), int(doc["depth"]))


def make_schedule(t0: float, r: float, depth: int) -> ScaleSchedule:
    """Build a scale ladder, rejecting t0 <= 0, r outside (0,1), depth < 2."""
    return ScaleSchedule(float(t0), float(r), int(depth))


def default_schedule() -> ScaleSchedule:
    """Dyadic ladder reaching ~1e-9, composing cleanly with power-of-two rescalings."""
    return ScaleSchedule(DEFAULT_T0, DEFAULT_RATIO, DEFAULT_DEPTH)


@dataclass(frozen=True, eq=False)
class SampledGerm:
    """Finite multiscale sample of a set-germ: nonzero points with scale bounds."""

    dim: int
    points: np.ndarray
    min_scale: float
    max_scale: float

    def __post_init__(self):
        pts = as_point_array(self.points, name="germ points")
        object.__setattr__(self, "points", pts)
        if self.dim != pts.shape[1]:
            raise GermlabError(f"declared dim {self.dim} != point dim {pts.shape[1]}")
        if pts.shape[0] == 0:
            raise GermlabError("a sampled germ needs at least one point")
        if not (0 < self.min_scale <= self.max_scale):
            raise GermlabError("need 0 < min_scale <= max_scale")
        radii = row_norms(pts)
        if np.any(radii == 0.0):
            raise GermlabError("germ points must be nonzero")
        lo = self.min_scale * (1 - 1e-9)
        hi = self.max_scale * (1 + 1e-9)
        if np.any(radii < lo) or np.any(radii > hi):
            raise GermlabError("every point norm must lie in [min_scale, max_scale]")

    @property
    def radii(self) -> np.ndarray:
        return row_norms(self.points)

    def shell_points(self, inner: float, outer: float) -> np.ndarray:
        r = self.radii
        return self.points[(r >= inner) & (r <= outer)]

    def check_shell_coverage(self, schedule: ScaleSchedule) -> None:
        """Require a point in every schedule shell inside [min_scale, max_scale]."""
        r = self.radii
        for inner, outer in schedule.shells():
            if inner < self.min_scale * (1 - 1e-9) or outer > self.max_scale * (1 + 1e-9):
                continue
            if not np.any((r >= inner) & (r <= outer)):
                raise GermlabError(
                    f"germ not populated in shell [{inner:.3g}, {outer:.3g}]")

    def scaled(self, factor: float) -> "SampledGerm":
        if factor <= 0:
            raise GermlabError("scaling factor must be positive")
        return SampledGerm(self.dim, self.points * factor,
                           self.min_scale * factor, self.max_scale * factor)

    def to_json_dict(self) -> dict:
        return {
            "dim": self.dim,
            "points": [[float(v) for v in p] for p in self.points],
            "min_scale": float(self.min_scale),
            "max_scale": float(self.max_scale),
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "SampledGerm":
        take_fields(doc, ("dim", "points", "min_scale", "max_scale"), where="SampledGerm")
        return cls(int(doc["dim"]), np.asarray(doc["points"], dtype=float),
                   float(doc["min_scale"]), float(doc["max_scale"]))


@dataclass(frozen=True, eq=False)
class GermOracle:
    """A set-germ given by a distance evaluator and a shell sampler.

    `distance` maps a (k, dim) array of query points to their distances from
    the germ; `sample` maps an (inner, outer) annulus to a (m, dim) array of
    germ points inside it (possibly empty). Both must be pure and
    deterministic. `sampled` optionally carries the finite sample the oracle
    was built from (used for serialization and anchor sets); `family`
    optionally describes analytic structure (used for exact pushforwards).
    """

    dim: int
    distance: Callable[[np.ndarray], np.ndarray]
    sample: Callable[[float, float], np.ndarray]
    sampled: SampledGerm | None = None
    label: str = ""
    family: dict | None = field(default=None, repr=False)

    def distance_at(self, point) -> float:
        pts = as_point_array(point, dim=self.dim, name="query")
        return float(np.asarray(self.distance(pts)).reshape(-1)[0])

    def distances(self, points) -> np.ndarray:
        pts = as_point_array(points, dim=self.dim, name="query")
        return np.asarray(self.distance(pts), dtype=float).reshape(pts.shape[0])


def sample_to_oracle(germ: SampledGerm, label: str = "") -> GermOracle:
    """Oracle backed by brute-force nearest-point distance over the sample."""
    pts = germ.points

    def distance(queries: np.ndarray) -> np.ndarray:
        q = as_point_array(queries, dim=germ.dim, name="query")
        return pairwise_distances(q, pts).min(axis=1)

    def sample(inner: float, outer: float) -> np.ndarray:
        return germ.shell_points(inner, outer)

    return GermOracle(dim=germ.dim, distance=distance, sample=sample,
                      sampled=germ, label=label or "sampled")


@dataclass(frozen=True, eq=False)
class DirectionSet:
    """Finite eps-net of unit vectors approximating a direction set D(A)."""

    dim: int
    reps: np.ndarray
    eps: float
    weights: np.ndarray

    def __post_init__(self):
        reps = np.asarray(self.reps, dtype=float).reshape(-1, self.dim)
        weights = np.asarray(self.weights, dtype=int).reshape(-1)
        object.__setattr__(self, "reps", reps)
        object.__setattr__(self, "weights", weights)
        if self.eps <= 0:
            raise GermlabError("eps must be positive")
        if reps.shape[0] != weights.shape[0]:
            raise GermlabError("reps and weights must have matching lengths")
        if reps.shape[0] > 0:
            norms = row_norms(reps)
            if np.any(np.abs(norms - 1.0) > UNIT_TOL):
                raise GermlabError("direction reps must be unit vectors (1e-12)")
            if np.any(weights < 1):
                raise GermlabError("every rep must be supported by at least one sample")
            if reps.shape[0] > 1:
                d = pairwise_distances(reps, reps)
                np.fill_diagonal(d, np.inf)
                if d.min() < self.eps / 2 - 1e-12:
                    raise GermlabError("net separation violated: reps closer than eps/2")

    def __len__(self) -> int:
        return self.reps.shape[0]

    @property
    def is_empty(self) -> bool:
        return self.reps.shape[0] == 0

    def to_json_dict(self) -> dict:
        return {
            "dim": self.dim,
            "eps": float(self.eps),
            "reps": [[float(v) for v in r] for r in self.reps],
            "weights": [int(w) for w in self.weights],
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "DirectionSet":
        take_fields(doc, ("dim", "eps", "reps", "weights"), where="DirectionSet")
        reps = np.asarray(doc["reps"], dtype=float).reshape(-1, int(doc["dim"]))
        return cls(int(doc["dim"]), reps, float(doc["eps"]),
                   np.asarray(doc["weights"], dtype=int))


@dataclass(frozen=True, eq=False)
class Cone:
    """Half-cone over a direction set with vertex at the origin."""

    base: DirectionSet

    def contains(self, point) -> bool:
        """Membership at the base net's resolution; the origin always belongs."""
        p = np.asarray(point, dtype=float).reshape(-1)
        n = float(np.sqrt(p @ p))
        if n == 0.0:
            return True
        u = p / n
        d = pairwise_distances(u.reshape(1, -1), self.base.reps).min()
        return bool(d <= self.base.eps)


def unit_vector(v) -> np.ndarray:
    """Validate and return a copy of v normalized to unit length."""
    arr = np.asarray(v, dtype=float).reshape(-1)
    n = float(np.sqrt(arr @ arr))
    if n == 0.0:
        raise GermlabError("zero vector has no direction")
    u = arr / n
    # renormalize once so normalization is a fixed point in floats
    n2 = float(np.sqrt(u @ u))
    if n2 != 1.0:
        u = u / n2
    return u


def canonical_directions(points: np.ndarray) -> np.ndarray:
    """Normalize rows and sort them lexicographically (deterministic order)."""
    pts = as_point_array(points, name="points")
    norms = row_norms(pts)
    if np.any(norms == 0.0):
        raise GermlabError("zero vector has no direction")
    dirs = pts / norms[:, None]
    return dirs[lexsort_rows(dirs)]
