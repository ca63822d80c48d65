"""Lipschitz machinery: extremal extensions, the doubling process, rescaling.

The extension formulas are the classical extremal ones (lower: inf of cone
majorants, upper: sup of cone minorants); they restrict to the anchors
exactly and carry the anchor constant. The doubling process globalizes a
bi-Lipschitz map between germs via two shears, and the rescaling limit
extracts a pseudo-derivative as a Cauchy subsequence of n f(x/n) on a grid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._util import as_point_array, ball_points, row_norms
from .errors import GermlabError
from .maps import (MapDescriptor, anchor_lipschitz, compose_map, eval_map,
                   extension_map, shear_map, rescaled_map)


def estimate_lipschitz(f: MapDescriptor, pairs) -> float:
    """Max of ||f(x)-f(y)|| / ||x-y|| over sample pairs (a lower bound).

    `pairs` is a sequence of (x, y) point pairs; coincident pairs are
    rejected.
    """
    xs, ys = [], []
    for x, y in pairs:
        xs.append(np.asarray(x, dtype=float).reshape(-1))
        ys.append(np.asarray(y, dtype=float).reshape(-1))
    if not xs:
        raise GermlabError("need at least one sample pair")
    X = np.vstack(xs)
    Y = np.vstack(ys)
    gaps = row_norms(X - Y)
    if np.any(gaps == 0.0):
        raise GermlabError("coincident pair in Lipschitz sampling")
    vals = row_norms(eval_map(f, X) - eval_map(f, Y)) / gaps
    return float(vals.max())


def grid_pairs(dim: int, count: int, seed: int = 23) -> list[tuple[np.ndarray, np.ndarray]]:
    """Deterministic sample pairs in the unit ball for constant estimation."""
    a = ball_points(dim, count, seed=seed)
    b = ball_points(dim, count, seed=seed + 1)
    keep = row_norms(a - b) > 0
    return list(zip(a[keep], b[keep]))


@dataclass(frozen=True, eq=False)
class ExtensionSpec:
    """Anchor data (points, values) with the constant L the extension will use."""

    points: np.ndarray
    values: np.ndarray
    L: float
    mode: str = "inf"

    def __post_init__(self):
        pts = as_point_array(self.points, name="anchor points")
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim == 1:
            vals = vals.reshape(-1, 1)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)
        if self.mode not in ("inf", "sup"):
            raise GermlabError("mode must be 'inf' or 'sup'")
        if not (self.L > 0):
            raise GermlabError("L must be positive")
        needed = anchor_lipschitz(pts, vals)
        if self.L < needed * (1 - 1e-12) - 1e-15:
            raise GermlabError(
                f"anchors are not L-compatible: need L >= {needed:.6g}, got {self.L:.6g}")


def whitney_extend(spec: ExtensionSpec) -> MapDescriptor:
    """Extremal scalar L-Lipschitz extension of the anchor data.

    inf mode evaluates min_a (f(a) + L d(x, a)); sup mode evaluates
    max_a (f(a) - L d(x, a)). Both agree with the anchors exactly.
    """
    if spec.values.shape[1] != 1:
        raise GermlabError("whitney_extend takes scalar anchor values; see extend_map")
    return extension_map(spec.points, spec.values, spec.L, spec.mode)


def extend_map(points, values, L: float, mode: str = "inf") -> MapDescriptor:
    """Componentwise extension of vector anchor data.

    Each output component is extended independently with constant L, so the
    vector constant is only bounded by sqrt(dim_out) * L; the descriptor's
    lip_upper records that bound.
    """
    return extension_map(points, values, L, mode)


def doubling_plus(f: MapDescriptor) -> MapDescriptor:
    """Shear (x, y) -> (x, y + f(x)) on R^{2n}; exact inverse attached."""
    return shear_map("plus", f, 1)


def doubling_minus(f: MapDescriptor) -> MapDescriptor:
    """Shear (x, y) -> (x + f(y), y) on R^{2n}; exact inverse attached."""
    return shear_map("minus", f, 1)


def doubling_composite(phi_ext: MapDescriptor, phi_inv_ext: MapDescriptor) -> MapDescriptor:
    """Globalized bi-Lipschitz map built from extensions of phi and phi^{-1}.

    With F = phi_ext and G = phi_inv_ext, the composite is
    Y_minus(G)^{-1} o Y_plus(F) on R^{2n}; wherever F(x) = phi(x) and
    G(phi(x)) = x (in particular on the anchor set), it sends (x, 0) to
    (0, phi(x)).
    """
    n = phi_ext.dim_in
    if phi_ext.dim_out != n or phi_inv_ext.dim_in != n or phi_inv_ext.dim_out != n:
        raise GermlabError("doubling needs extensions R^n -> R^n both ways")
    return compose_map(shear_map("minus", phi_inv_ext, -1),
                       shear_map("plus", phi_ext, 1))


def rescale(f: MapDescriptor, n: int) -> MapDescriptor:
    """Descriptor for x -> n f(x/n); Lipschitz constants identical to f's."""
    return rescaled_map(f, n)


@dataclass(frozen=True, eq=False)
class RescalingReport:
    """Trace of the rescaling limit n f(x/n) along powers of two.

    `examined` lists (j, n_j = 2^j, sup deviation from the previous index,
    accepted flag); accepted indices are the chosen subsequence. `converged`
    means three consecutive acceptances occurred within the budget; otherwise
    the last table is still returned and the caller decides what to do with
    it (only a subsequence limit is ever guaranteed).
    """

    grid: np.ndarray
    table: np.ndarray
    examined: tuple[tuple[int, int, float, bool], ...]
    accepted: tuple[int, ...]
    converged: bool
    tol: float

    @property
    def sup_deviations(self) -> list[float]:
        return [row[2] for row in self.examined]

    def to_json_dict(self) -> dict:
        return {
            "converged": self.converged,
            "tol": float(self.tol),
            "accepted": [int(j) for j in self.accepted],
            "examined": [{"j": int(j), "n": int(n), "sup_deviation": float(d),
                          "accepted": bool(a)} for j, n, d, a in self.examined],
            "grid": [[float(v) for v in p] for p in self.grid],
            "table": [[float(v) for v in p] for p in self.table],
        }

    def csv_rows(self) -> list[tuple[int, int, float, bool]]:
        return [(int(j), int(n), float(d), bool(a)) for j, n, d, a in self.examined]


def unit_ball_grid(dim: int, spacing: float = 0.05, max_random: int = 256) -> np.ndarray:
    """Default evaluation grid: a lattice in the ball for dim <= 3, else
    fixed-seed low-discrepancy points."""
    if dim <= 3:
        axis = np.arange(-1.0, 1.0 + spacing / 2, spacing)
        grids = np.meshgrid(*([axis] * dim), indexing="ij")
        pts = np.stack([g.reshape(-1) for g in grids], axis=1)
        return pts[row_norms(pts) <= 1.0 + 1e-12]
    return ball_points(dim, max_random)


def pseudo_derivative(f: MapDescriptor, grid=None, tol: float = 1e-3,
                      budget: int = 20, origin_tol: float = 1e-12
                      ) -> tuple[MapDescriptor, RescalingReport]:
    """Grid limit of the rescalings n f(x/n) along n = 2^j, j = 0..budget.

    Walks the dyadic ladder comparing each table to the previous one and
    accepts index j when the sup-grid deviation is <= tol * 2^-(accepted so
    far); three consecutive acceptances declare convergence. The returned map
    is the extremal Lipschitz interpolation of the final grid table (constant
    from f), exact on the grid.

    `origin_tol` bounds ||f(0)||: the rescaled drift it causes is at most
    2^budget * ||f(0)||, so callers working with maps built from germ anchors
    (which vanish at 0 only up to the finest anchor scale) may widen it.
    """
    if budget < 4:
        raise GermlabError("budget must be at least 4")
    if tol <= 0:
        raise GermlabError("tol must be positive")
    origin = eval_map(f, np.zeros(f.dim_in))
    if float(np.max(np.abs(origin))) > origin_tol:
        raise GermlabError(
            f"pseudo-derivative needs f(0) = 0 (within {origin_tol:g})")
    G = unit_ball_grid(f.dim_in) if grid is None else as_point_array(grid, dim=f.dim_in,
                                                                     name="grid")
    if G.shape[0] == 0:
        raise GermlabError("grid must be nonempty")
    prev = eval_map(f, G)
    examined = [(0, 1, math.nan, False)]
    accepted: list[int] = []
    consec = 0
    converged = False
    for j in range(1, budget + 1):
        n = 2**j
        table = n * eval_map(f, G / n)
        dev = float(row_norms(table - prev).max())
        ok = dev <= tol * 2.0 ** (-len(accepted))
        if ok:
            accepted.append(j)
            consec += 1
        else:
            consec = 0
        examined.append((j, n, dev, ok))
        prev = table
        if consec >= 3:
            converged = True
            break
    report = RescalingReport(grid=G, table=prev, examined=tuple(examined),
                             accepted=tuple(accepted), converged=converged, tol=tol)
    L = f.lip_upper
    if L is None:
        L = anchor_lipschitz(G, prev)
    L = max(L, anchor_lipschitz(G, prev))  # float safety: table must be L-compatible
    limit = extend_map(G, prev, L if L > 0 else 1.0, mode="inf")
    return limit, report
