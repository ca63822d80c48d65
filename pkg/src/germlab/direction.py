"""Direction-set estimation, cones, comparison, and dimension on the sphere.

Directions of a germ are the sphere limits of x/||x|| as x -> 0; here the
limit is read off the finest half of a scale ladder, reduced to an eps-net by
greedy farthest-point selection with lexicographic tie-breaking so results
are identical across runs and platforms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._util import fit_slope, lexsort_rows, normalize_rows, pairwise_distances
from .core import Cone, DirectionSet, GermOracle, ScaleSchedule
from .errors import GermlabError
from .maps import MapDescriptor, eval_map

DEFAULT_EPS = 0.05


def greedy_net(directions: np.ndarray, eps: float) -> tuple[np.ndarray, np.ndarray]:
    """Farthest-point eps-net of unit vectors with deterministic tie-breaking.

    Candidates are sorted lexicographically first; the net starts at the
    smallest one and repeatedly adds the candidate farthest from the chosen
    set (first index wins ties, i.e. the lexicographically smallest), until
    everything is covered within eps. Returns (reps, weights) where weights
    count the candidates absorbed by each rep.
    """
    if eps <= 0:
        raise GermlabError("eps must be positive")
    dirs = np.asarray(directions, dtype=float)
    if dirs.ndim != 2 or dirs.shape[0] == 0:
        raise GermlabError("need a nonempty (k, n) array of directions")
    dirs = dirs[lexsort_rows(dirs)]
    chosen = [0]
    mindist = pairwise_distances(dirs, dirs[:1]).reshape(-1)
    while True:
        far = int(np.argmax(mindist))
        if mindist[far] <= eps:
            break
        chosen.append(far)
        mindist = np.minimum(mindist, pairwise_distances(dirs, dirs[far:far + 1]).reshape(-1))
    reps = dirs[chosen]
    owner = np.argmin(pairwise_distances(dirs, reps), axis=1)
    weights = np.bincount(owner, minlength=len(chosen))
    return reps, weights


def estimate_direction_set(g: GermOracle, schedule: ScaleSchedule,
                           eps: float = DEFAULT_EPS) -> DirectionSet:
    """Estimate the germ's direction set from the finest half of the ladder.

    Coarse shells are regarded as pre-asymptotic and contribute nothing;
    raises when the fine shells hold no sample at all.
    """
    if eps <= 0:
        raise GermlabError("eps must be positive")
    chunks = []
    for inner, outer in schedule.fine_shells():
        pts = np.asarray(g.sample(inner, outer), dtype=float)
        if pts.size:
            chunks.append(pts.reshape(-1, g.dim))
    if not chunks:
        raise GermlabError("germ not populated at fine scales")
    dirs = normalize_rows(np.vstack(chunks))
    reps, weights = greedy_net(dirs, eps)
    return DirectionSet(dim=g.dim, reps=reps, eps=eps, weights=weights)


def cone_over(d: DirectionSet) -> Cone:
    """Half-cone with vertex 0 over the direction set."""
    if d.is_empty:
        raise GermlabError("cannot build a cone over an empty direction set")
    return Cone(base=d)


def sphere_hausdorff(d1: DirectionSet, d2: DirectionSet) -> float:
    """Symmetric Hausdorff distance between rep sets, brute force over pairs."""
    if d1.dim != d2.dim:
        raise GermlabError("direction sets live in different dimensions")
    if d1.is_empty or d2.is_empty:
        raise GermlabError("Hausdorff distance needs nonempty direction sets")
    dm = pairwise_distances(d1.reps, d2.reps)
    return float(max(dm.min(axis=1).max(), dm.min(axis=0).max()))


def directed_excess(d1: DirectionSet, d2: DirectionSet) -> float:
    """One-sided excess: how far d1's reps stick out of d2."""
    if d1.is_empty or d2.is_empty:
        raise GermlabError("excess needs nonempty direction sets")
    return float(pairwise_distances(d1.reps, d2.reps).min(axis=1).max())


def covering_number(points: np.ndarray, delta: float) -> int:
    """Greedy first-fit cover count: balls of radius delta around lex-ordered reps."""
    pts = np.asarray(points, dtype=float)
    pts = pts[lexsort_rows(pts)]
    remaining = np.ones(pts.shape[0], dtype=bool)
    count = 0
    while remaining.any():
        center = pts[np.argmax(remaining)]
        covered = pairwise_distances(pts, center.reshape(1, -1)).reshape(-1) <= delta
        remaining &= ~covered
        count += 1
    return count


@dataclass(frozen=True)
class DimensionEstimate:
    """Box-counting result: rounded slope of log N(delta) against log(1/delta)."""

    dimension: int
    slope: float
    resolutions: tuple[float, ...]
    counts: tuple[int, ...]
    flagged: bool  # slope farther than 0.25 from an integer: likely under-sampled

    def rows(self) -> list[tuple[float, int]]:
        return list(zip(self.resolutions, self.counts))


def dimension_profile(d: DirectionSet, resolutions) -> DimensionEstimate:
    res = [float(r) for r in resolutions]
    if len(res) < 2:
        raise GermlabError("need at least two resolutions")
    if any(b >= a for a, b in zip(res, res[1:])):
        raise GermlabError("resolutions must be strictly decreasing")
    if min(res) <= d.eps:
        raise GermlabError("resolutions must stay above the net resolution eps")
    if d.is_empty:
        raise GermlabError("cannot estimate the dimension of an empty direction set")
    counts = [covering_number(d.reps, delta) for delta in res]
    slope = fit_slope(np.log(1.0 / np.asarray(res)), np.log(np.asarray(counts, dtype=float)))
    dim = int(round(slope))
    dim = max(0, min(d.dim - 1, dim))
    flagged = abs(slope - round(slope)) > 0.25
    return DimensionEstimate(dim, slope, tuple(res), tuple(counts), flagged)


def estimate_dimension(d: DirectionSet, resolutions) -> int:
    """Integer box-counting dimension of the direction set, clamped to [0, n-1]."""
    return dimension_profile(d, resolutions).dimension


def default_resolutions(eps: float, count: int = 5, top: float = 0.45) -> list[float]:
    """Geometric resolution ladder staying strictly above the net eps."""
    bottom = max(2.2 * eps, 1e-6)
    if bottom >= top:
        raise GermlabError("eps too coarse for a resolution ladder")
    return list(np.geomspace(top, bottom, count))


def map_direction_set(f: MapDescriptor, d: DirectionSet, eps: float) -> DirectionSet:
    """Image direction set {f(a)/||f(a)||}, re-netted at resolution eps."""
    if d.is_empty:
        raise GermlabError("cannot map an empty direction set")
    if f.dim_in != d.dim:
        raise GermlabError("map input dimension does not match the direction set")
    images = eval_map(f, d.reps)
    norms = np.sqrt(np.sum(images * images, axis=1))
    if np.any(norms < 1e-12):
        raise GermlabError("map collapses a direction")
    reps, _ = greedy_net(images / norms[:, None], eps)
    # weights: original sample support absorbed into each new rep
    owner = np.argmin(pairwise_distances(images / norms[:, None], reps), axis=1)
    weights = np.zeros(len(reps), dtype=int)
    for idx, w in zip(owner, d.weights):
        weights[idx] += int(w)
    return DirectionSet(dim=f.dim_out, reps=reps, eps=eps, weights=weights)
