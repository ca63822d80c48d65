"""Deterministic generators for the germ, sequence, and map families under study.

Every generator returns reproducible data: samples use fixed low-discrepancy
angular placement, and each germ carries an analytic distance evaluator next
to its finite sample (a finite sample alone over-estimates distances at fine
scales, which would wreck the distance-based SSP test for curves).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._util import golden_fractions, normalize_rows, row_norms
from .core import GermOracle, SampledGerm, ScaleSchedule, unit_vector
from .errors import GermlabError
from .maps import MapDescriptor, eval_map, pwl_map
from .sequences import SequenceGerm, SequenceRule, from_rule

SEQUENCE_FAMILIES = ("harmonic", "log_ratio", "power_sqrt", "geometric", "pb_not_ssp")


def gen_sequence(name: str, **params) -> SequenceGerm:
    """Named sequence family: harmonic, log_ratio, power_sqrt, geometric(q),
    pb_not_ssp(i_max)."""
    if name not in SEQUENCE_FAMILIES:
        raise GermlabError(f"unknown sequence family {name!r}; "
                           f"choose from {SEQUENCE_FAMILIES}")
    if name == "pb_not_ssp":
        params.setdefault("i_max", 6)
    return from_rule(name, **params)


# ---------------------------------------------------------------------------
# linear families with exact distance evaluators

def _unit_rows(arr) -> np.ndarray:
    return normalize_rows(np.asarray(arr, dtype=float).reshape(-1, np.asarray(arr).shape[-1]))


def ray_family(direction) -> dict:
    return {"kind": "ray", "direction": unit_vector(direction)}


def line_family(direction) -> dict:
    return {"kind": "line", "direction": unit_vector(direction)}


def plane_family(basis) -> dict:
    b = np.asarray(basis, dtype=float)
    if b.ndim != 2 or b.shape[0] != 2:
        raise GermlabError("plane family needs a (2, n) basis")
    q, _ = np.linalg.qr(b.T)
    return {"kind": "plane", "basis": q.T[:2]}


def sector_family(theta1: float, theta2: float) -> dict:
    if not (theta2 > theta1):
        raise GermlabError("sector needs theta2 > theta1")
    if theta2 - theta1 >= 2 * math.pi:
        raise GermlabError("sector must span less than a full turn")
    return {"kind": "sector", "theta1": float(theta1), "theta2": float(theta2)}


def cone_family(directions) -> dict:
    return {"kind": "cone", "directions": _unit_rows(directions)}


def union_family(*parts: dict) -> dict:
    if len(parts) < 2:
        raise GermlabError("union needs at least two parts")
    return {"kind": "union", "parts": tuple(parts)}


def sequence_on_ray_family(rule: SequenceRule, direction) -> dict:
    """The spatial germ {a_m * d}: a sequence germ placed along a ray."""
    return {"kind": "radial_sequence", "rule": rule, "direction": unit_vector(direction)}


def family_dim(family: dict) -> int:
    kind = family["kind"]
    if kind in ("ray", "line", "radial_sequence"):
        return len(family["direction"])
    if kind == "plane":
        return family["basis"].shape[1]
    if kind == "sector":
        return 2
    if kind == "cone":
        return family["directions"].shape[1]
    if kind == "union":
        return family_dim(family["parts"][0])
    if kind == "polyline":
        return 2
    raise GermlabError(f"unknown germ family kind {kind!r}")


def _ray_distances(q: np.ndarray, d: np.ndarray) -> np.ndarray:
    proj = np.maximum(q @ d, 0.0)
    return np.sqrt(np.maximum(np.sum(q * q, axis=1) - proj * proj, 0.0))


def family_distance(family: dict, queries: np.ndarray) -> np.ndarray:
    q = np.asarray(queries, dtype=float).reshape(-1, family_dim(family))
    kind = family["kind"]
    if kind == "ray":
        return _ray_distances(q, family["direction"])
    if kind == "line":
        d = family["direction"]
        proj = q @ d
        return np.sqrt(np.maximum(np.sum(q * q, axis=1) - proj * proj, 0.0))
    if kind == "plane":
        b = family["basis"]
        coeff = q @ b.T
        return row_norms(q - coeff @ b)
    if kind == "sector":
        t1, t2 = family["theta1"], family["theta2"]
        ang = np.arctan2(q[:, 1], q[:, 0])
        rel = np.mod(ang - t1, 2 * math.pi)
        inside = rel <= (t2 - t1) + 1e-15
        d1 = _ray_distances(q, np.array([math.cos(t1), math.sin(t1)]))
        d2 = _ray_distances(q, np.array([math.cos(t2), math.sin(t2)]))
        out = np.minimum(d1, d2)
        out[inside] = 0.0
        return out
    if kind == "cone":
        reps = family["directions"]
        proj = np.maximum(q @ reps.T, 0.0)
        best = np.max(proj, axis=1)
        return np.sqrt(np.maximum(np.sum(q * q, axis=1) - best * best, 0.0))
    if kind == "union":
        stacked = np.stack([family_distance(p, q) for p in family["parts"]])
        return stacked.min(axis=0)
    if kind == "radial_sequence":
        return _radial_sequence_distance(family, q)
    if kind == "polyline":
        return polyline_distance(family["corners"], q)
    raise GermlabError(f"unknown germ family kind {kind!r}")


def _radial_sequence_distance(family: dict, q: np.ndarray) -> np.ndarray:
    rule: SequenceRule = family["rule"]
    d = family["direction"]
    cap = rule.max_index()
    hi_index = float(cap) if cap is not None else 1e15
    out = np.empty(q.shape[0])
    for i, point in enumerate(q):
        proj = float(point @ d)
        target = max(proj, 1e-300)
        m = _invert_log_term(rule, math.log(target), hi_index)
        cand_idx = np.unique(np.clip(np.array(
            [1.0, math.floor(m) - 2, math.floor(m) - 1, math.floor(m),
             math.ceil(m), math.ceil(m) + 1, math.ceil(m) + 2, hi_index]), 1.0, hi_index))
        vals = np.exp(rule.log_terms(cand_idx))
        pts = vals[:, None] * d[None, :]
        out[i] = float(row_norms(pts - point[None, :]).min())
    return out


def _invert_log_term(rule: SequenceRule, log_target: float, hi: float) -> float:
    """Largest float index m with log a_m >= log_target (binary search)."""
    lo = 1.0
    if float(rule.log_terms(np.array([lo]))[0]) <= log_target:
        return lo
    if float(rule.log_terms(np.array([hi]))[0]) >= log_target:
        return hi
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if float(rule.log_terms(np.array([mid]))[0]) >= log_target:
            lo = mid
        else:
            hi = mid
    return lo


def family_shell_directions(family: dict, per_shell: int) -> np.ndarray:
    """Fixed angular pattern repeated in every shell (scale self-similarity)."""
    kind = family["kind"]
    if kind == "ray":
        return family["direction"].reshape(1, -1)
    if kind == "line":
        d = family["direction"]
        return np.vstack([d, -d])
    if kind == "sector":
        t1, t2 = family["theta1"], family["theta2"]
        inner = t1 + (t2 - t1) * golden_fractions(max(per_shell - 2, 0), seed_offset=1)
        angles = np.concatenate([[t1, t2], np.sort(inner)])
        return np.stack([np.cos(angles), np.sin(angles)], axis=1)
    if kind == "plane":
        b = family["basis"]
        angles = 2 * math.pi * np.sort(golden_fractions(per_shell, seed_offset=2))
        return np.cos(angles)[:, None] * b[0] + np.sin(angles)[:, None] * b[1]
    if kind == "cone":
        return family["directions"]
    if kind == "union":
        return np.vstack([family_shell_directions(p, per_shell) for p in family["parts"]])
    raise GermlabError(f"family kind {family['kind']!r} has no shell pattern")


def family_oracle(family: dict, schedule: ScaleSchedule, per_shell: int = 16,
                  label: str = "") -> GermOracle:
    """Germ oracle for a linear family: exact distance, self-similar sampling."""
    dim = family_dim(family)
    if family["kind"] == "radial_sequence":
        return _radial_sequence_oracle(family, schedule, label)
    dirs = family_shell_directions(family, per_shell)
    scales = schedule.scales()
    points = (scales[:, None, None] * dirs[None, :, :]).reshape(-1, dim)
    sampled = SampledGerm(dim=dim, points=points,
                          min_scale=float(scales[-1]), max_scale=float(scales[0]))

    def distance(queries):
        return family_distance(family, queries)

    def sample(inner, outer):
        keep = scales[(scales >= inner) & (scales <= outer)]
        if keep.size == 0:
            return np.empty((0, dim))
        return (keep[:, None, None] * dirs[None, :, :]).reshape(-1, dim)

    return GermOracle(dim=dim, distance=distance, sample=sample,
                      sampled=sampled, label=label or family["kind"], family=family)


def _radial_sequence_oracle(family: dict, schedule: ScaleSchedule, label: str) -> GermOracle:
    rule: SequenceRule = family["rule"]
    d = family["direction"]
    dim = len(d)
    cap = rule.max_index()
    hi = float(cap) if cap is not None else 1e15
    lo_scale = schedule.scale(schedule.depth)

    def radii_between(inner, outer):
        m_lo = _invert_log_term(rule, math.log(max(outer, 1e-300)), hi)
        m_hi = _invert_log_term(rule, math.log(max(inner, 1e-300)), hi)
        ms = np.arange(math.floor(m_lo), math.ceil(m_hi) + 1, dtype=float)
        ms = ms[(ms >= 1) & (ms <= hi)]
        if ms.size > 512:
            ms = ms[np.unique(np.round(np.linspace(0, ms.size - 1, 512)).astype(int))]
        if ms.size == 0:
            return np.empty(0)
        vals = np.exp(rule.log_terms(ms))
        return vals[(vals >= inner) & (vals <= outer)]

    def distance(queries):
        return _radial_sequence_distance(family, np.asarray(queries, dtype=float))

    def sample(inner, outer):
        vals = radii_between(inner, outer)
        return vals[:, None] * d[None, :]

    pts = radii_between(lo_scale, schedule.t0)
    if pts.size == 0:
        raise GermlabError("sequence germ has no points in the schedule range")
    sampled = SampledGerm(dim=dim, points=pts[:, None] * d[None, :],
                          min_scale=float(pts.min()), max_scale=float(pts.max()))
    return GermOracle(dim=dim, distance=distance, sample=sample,
                      sampled=sampled, label=label or "radial_sequence", family=family)


def gen_linear_germ(kind: dict, s: ScaleSchedule, per_shell: int = 16,
                    label: str = "") -> GermOracle:
    """Sampled germ for an exact linear-geometry family (ray, line, plane,
    sector, cone over a direction set, union)."""
    if per_shell < 1:
        raise GermlabError("per_shell must be at least 1")
    if kind["kind"] not in ("ray", "line", "plane", "sector", "cone", "union",
                            "radial_sequence"):
        raise GermlabError(f"unknown linear germ kind {kind['kind']!r}")
    return family_oracle(kind, s, per_shell, label=label)


def union_germs(*oracles: GermOracle, label: str = "union") -> GermOracle:
    """Union of germs: min distance, concatenated samples."""
    if len(oracles) < 2:
        raise GermlabError("union needs at least two germs")
    dim = oracles[0].dim
    if any(o.dim != dim for o in oracles):
        raise GermlabError("union parts must share the ambient dimension")

    def distance(queries):
        return np.stack([o.distances(queries) for o in oracles]).min(axis=0)

    def sample(inner, outer):
        parts = [np.asarray(o.sample(inner, outer), dtype=float).reshape(-1, dim)
                 for o in oracles]
        return np.vstack(parts) if parts else np.empty((0, dim))

    sampled = None
    if all(o.sampled is not None for o in oracles):
        pts = np.vstack([o.sampled.points for o in oracles])
        sampled = SampledGerm(dim=dim, points=pts,
                              min_scale=min(o.sampled.min_scale for o in oracles),
                              max_scale=max(o.sampled.max_scale for o in oracles))
    family = None
    if all(o.family is not None for o in oracles):
        family = {"kind": "union", "parts": tuple(o.family for o in oracles)}
    return GermOracle(dim=dim, distance=distance, sample=sample,
                      sampled=sampled, label=label, family=family)


# ---------------------------------------------------------------------------
# zigzag curves between the positive x-axis and the half line y = c x

def polyline_distance(corners: np.ndarray, queries: np.ndarray) -> np.ndarray:
    """Exact distance to the graph polyline with corners ordered by decreasing x.

    The curve is the graph of a function, so |py - f(px)| bounds the distance
    and the minimizer's abscissa lies within that bound of px; only segments
    in that window need checking.
    """
    corners = np.asarray(corners, dtype=float)
    q = np.asarray(queries, dtype=float).reshape(-1, 2)
    xs = corners[::-1, 0]  # increasing for searchsorted / interp
    ys = corners[::-1, 1]
    out = np.empty(q.shape[0])
    for i, (px, py) in enumerate(q):
        # anchor: the graph point above the clamped abscissa; its distance
        # bounds the answer, so the minimizer's abscissa is within d0 of px
        pxc = min(max(px, xs[0]), xs[-1])
        d0 = math.hypot(px - pxc, py - float(np.interp(pxc, xs, ys)))
        lo = max(np.searchsorted(xs, px - d0, side="left") - 1, 0)
        hi = min(np.searchsorted(xs, px + d0, side="right") + 1, len(xs))
        if hi - lo < 2:
            lo, hi = max(lo - 1, 0), min(hi + 1, len(xs))
        ax, ay = xs[lo:hi - 1], ys[lo:hi - 1]
        bx, by = xs[lo + 1:hi], ys[lo + 1:hi]
        ux, uy = bx - ax, by - ay
        seg2 = ux * ux + uy * uy
        t = np.clip(((px - ax) * ux + (py - ay) * uy) / seg2, 0.0, 1.0)
        dx = px - (ax + t * ux)
        dy = py - (ay + t * uy)
        out[i] = min(d0, float(np.sqrt(dx * dx + dy * dy).min()))
    return out


def _polyline_shell_points(corners: np.ndarray, inner: float, outer: float,
                           count: int) -> np.ndarray:
    """Deterministic points on the polyline with radius in [inner, outer]."""
    xs = corners[::-1, 0]
    lo = np.searchsorted(xs, inner / 2.0, side="left")
    hi = np.searchsorted(xs, outer * 2.0, side="right")
    window = corners[::-1][max(lo - 1, 0):min(hi + 1, len(xs))]
    if window.shape[0] < 2:
        return np.empty((0, 2))
    if window.shape[0] > 8 * count:
        keep = np.unique(np.round(np.linspace(0, window.shape[0] - 1,
                                              8 * count)).astype(int))
        window = window[keep]
    # subdivide so the sample tracks the sweep of the curve, not just corners
    frac = np.linspace(0.0, 1.0, 9)[:-1]
    seg_a, seg_b = window[:-1], window[1:]
    pts = (seg_a[:, None, :] + frac[None, :, None]
           * (seg_b - seg_a)[:, None, :]).reshape(-1, 2)
    pts = np.vstack([pts, window[-1:]])
    radii = row_norms(pts)
    pts = pts[(radii >= inner) & (radii <= outer)]
    if pts.shape[0] > count:
        # thin by position along the polyline (stable, deterministic)
        keep = np.unique(np.round(np.linspace(0, pts.shape[0] - 1, count)).astype(int))
        pts = pts[keep]
    return pts


@dataclass(frozen=True, eq=False)
class ZigzagGerm:
    """Zigzag curve bundle: germ oracle, finite sample, graph profile, constants."""

    germ: GermOracle
    sampled: SampledGerm
    profile: MapDescriptor
    lip_constant: float
    corners: np.ndarray
    c: float
    ratio: float
    ssp_law: bool


def _zigzag_corners_geometric(c: float, ratio: float, floor: float) -> np.ndarray:
    """Similar-triangle corners: bases at sqrt(ratio) * ratio^k on the x-axis,
    apex on y = c x.

    The leading factor sqrt(ratio) keeps the corner radii at the geometric
    mid-phase of the ratio ladder, so probes on that ladder measure the
    germ's actual gaps instead of landing on corners.
    """
    mu = (1.0 + ratio) / 2.0
    x0 = math.sqrt(ratio)
    corners = []
    k = 0
    while True:
        xk = x0 * ratio**k
        corners.append((xk, 0.0))
        if xk < floor:
            break
        apex = mu * xk
        corners.append((apex, c * apex))
        k += 1
    corners.append((0.0, 0.0))
    return np.asarray(corners, dtype=float)


def _zigzag_corners_harmonic(c: float, floor: float) -> np.ndarray:
    """Corner-ratio -> 1 law: abscissas 1/j, alternating between the axis and y = c x."""
    j_max = int(math.ceil(1.0 / floor)) + 1
    if j_max > 4_000_000:
        raise GermlabError("zigzag depth too large for the 1/j corner law; "
                           "use depth <= 20")
    j = np.arange(1, j_max + 1, dtype=float)
    xs = 1.0 / j
    ys = np.where(np.arange(j_max) % 2 == 1, c * xs, 0.0)
    corners = np.stack([xs, ys], axis=1)
    return np.vstack([corners, [[0.0, 0.0]]])


def gen_zigzag(c: float = 1.0, ratio: float = 0.5, ssp: bool = False,
               depth: int = 14, per_shell: int = 16) -> ZigzagGerm:
    """Zigzag curve germ oscillating between the positive x-axis and y = c x.

    ssp=False builds the self-similar-triangle curve (corner abscissas
    ratio^k), whose interior directions stay relatively far from the curve at
    every scale. ssp=True uses corner abscissas 1/j, whose consecutive-corner
    ratio tends to 1; its graph profile has unbounded slopes, so the reported
    constant is the truncated table's and grows with depth.
    """
    if not (c > 0):
        raise GermlabError("slope c must be positive")
    if not (0 < ratio < 1):
        raise GermlabError("ratio must lie in (0, 1)")
    if not (2 <= depth <= 40):
        raise GermlabError("depth must lie in [2, 40]")
    schedule = ScaleSchedule(1.0, 0.5, depth)
    floor = schedule.scale(depth) / 8.0
    if ssp:
        if depth > 20:
            raise GermlabError("ssp zigzag supports depth <= 20 (corner count)")
        corners = _zigzag_corners_harmonic(c, floor)
    else:
        corners = _zigzag_corners_geometric(c, ratio, floor)

    shells = schedule.shells()
    chunks = [_polyline_shell_points(corners, inner, outer, per_shell)
              for inner, outer in shells]
    points = np.vstack([ch for ch in chunks if ch.size])
    sampled = SampledGerm(dim=2, points=points,
                          min_scale=float(row_norms(points).min()),
                          max_scale=float(row_norms(points).max()))

    family = {"kind": "polyline", "corners": corners}

    def distance(queries):
        return polyline_distance(corners, queries)

    def sample(inner, outer):
        return _polyline_shell_points(corners, inner, outer, per_shell)

    germ = GermOracle(dim=2, distance=distance, sample=sample, sampled=sampled,
                      label="zigzag-ssp" if ssp else "zigzag-triangles",
                      family=family)
    profile = pwl_map(corners[::-1, 0], corners[::-1, 1])
    return ZigzagGerm(germ=germ, sampled=sampled, profile=profile,
                      lip_constant=float(profile.lip_upper), corners=corners,
                      c=c, ratio=ratio, ssp_law=ssp)


# ---------------------------------------------------------------------------
# blow-up chart (X, Y) -> (X Y, Y)

def blowup_chart_map(points: np.ndarray) -> np.ndarray:
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    return np.stack([pts[:, 0] * pts[:, 1], pts[:, 1]], axis=1)


def chart_swap(g: SampledGerm) -> SampledGerm:
    """Swap coordinates (u, v) -> (v, u): the zigzag seen in chart coordinates."""
    pts = g.points[:, ::-1].copy()
    return SampledGerm(dim=2, points=pts, min_scale=g.min_scale, max_scale=g.max_scale)


def blowup_region_constant(b: SampledGerm) -> float:
    """Smallest c with X <= c Y over the chart sample (so the image obeys |x| <= c y^2)."""
    pts = b.points
    if np.any(pts[:, 1] <= 0):
        raise GermlabError("chart points need Y > 0")
    return float(np.max(pts[:, 0] / pts[:, 1]))


def gen_blowup_image(b: SampledGerm) -> SampledGerm:
    """Image of a chart germ under the blow-up chart (X, Y) -> (X Y, Y).

    The image satisfies |x| <= c y^2 with c the chart's region constant; the
    construction checks that bound pointwise.
    """
    if b.dim != 2:
        raise GermlabError("blow-up chart lives on R^2")
    c = blowup_region_constant(b)
    image = blowup_chart_map(b.points)
    if np.any(np.abs(image[:, 0]) > c * image[:, 1] ** 2 + 1e-12):
        raise GermlabError("blow-up image left the region |x| <= c y^2")
    radii = row_norms(image)
    return SampledGerm(dim=2, points=image,
                       min_scale=float(radii.min()), max_scale=float(radii.max()))


# ---------------------------------------------------------------------------
# family pushforward under a linear map

def transform_family(family: dict, matrix: np.ndarray) -> dict:
    """Exact image family under an invertible linear map."""
    m = np.asarray(matrix, dtype=float)
    kind = family["kind"]
    if kind == "ray":
        return ray_family(m @ family["direction"])
    if kind == "line":
        return line_family(m @ family["direction"])
    if kind == "plane":
        return plane_family((m @ family["basis"].T).T)
    if kind == "sector":
        t1, t2 = family["theta1"], family["theta2"]
        u1 = m @ np.array([math.cos(t1), math.sin(t1)])
        u2 = m @ np.array([math.cos(t2), math.sin(t2)])
        mid = m @ np.array([math.cos((t1 + t2) / 2), math.sin((t1 + t2) / 2)])
        a1 = math.atan2(u1[1], u1[0])
        a2 = math.atan2(u2[1], u2[0])
        am = math.atan2(mid[1], mid[0])
        span12 = (a2 - a1) % (2 * math.pi)
        if (am - a1) % (2 * math.pi) <= span12:
            return sector_family(a1, a1 + span12)
        span21 = (a1 - a2) % (2 * math.pi)
        return sector_family(a2, a2 + span21)
    if kind == "cone":
        return cone_family(normalize_rows(family["directions"] @ m.T))
    if kind == "union":
        return union_family(*[transform_family(p, m) for p in family["parts"]])
    if kind == "polyline":
        return {"kind": "polyline", "corners": family["corners"] @ m.T}
    raise GermlabError(f"cannot transform family kind {kind!r} exactly")


def pushforward_germ(phi: MapDescriptor, g: GermOracle, schedule: ScaleSchedule,
                     per_shell: int = 16, label: str = "") -> GermOracle:
    """Image germ phi(A): exact for linear maps on linear families, parametric
    (curve minimization) for nonlinear maps on ray/union-of-ray families."""
    from .maps import as_linear_matrix

    if g.family is None:
        raise GermlabError("pushforward needs a germ with analytic structure")
    matrix = as_linear_matrix(phi)
    if matrix is not None:
        fam = transform_family(g.family, matrix)
        if fam["kind"] == "polyline":
            return _polyline_oracle(fam, per_shell, label or f"{g.label}-image")
        return family_oracle(fam, schedule, per_shell, label=label or f"{g.label}-image")
    rays = _collect_rays(g.family)
    if rays is None:
        raise GermlabError("nonlinear pushforward implemented for ray unions only")
    return _parametric_ray_image(phi, rays, g, schedule, per_shell,
                                 label or f"{g.label}-image")


def _polyline_oracle(family: dict, per_shell: int, label: str) -> GermOracle:
    corners = family["corners"]

    def distance(queries):
        return polyline_distance(corners, queries)

    def sample(inner, outer):
        return _polyline_shell_points(corners, inner, outer, per_shell)

    radii = row_norms(corners[row_norms(corners) > 0])
    pts = corners[row_norms(corners) > 0]
    sampled = SampledGerm(dim=2, points=pts, min_scale=float(radii.min()),
                          max_scale=float(radii.max()))
    return GermOracle(dim=2, distance=distance, sample=sample, sampled=sampled,
                      label=label, family=family)


def _collect_rays(family: dict) -> list[np.ndarray] | None:
    if family["kind"] == "ray":
        return [family["direction"]]
    if family["kind"] == "union":
        out = []
        for part in family["parts"]:
            rays = _collect_rays(part)
            if rays is None:
                return None
            out.extend(rays)
        return out
    return None


def _parametric_ray_image(phi: MapDescriptor, rays: list[np.ndarray], g: GermOracle,
                          schedule: ScaleSchedule, per_shell: int,
                          label: str) -> GermOracle:
    dim = phi.dim_out
    scales = schedule.scales()

    def curve_points(t: np.ndarray) -> np.ndarray:
        pts = [eval_map(phi, t[:, None] * d[None, :]) for d in rays]
        return np.stack(pts)  # (n_rays, len(t), dim)

    def distance(queries):
        q = np.asarray(queries, dtype=float).reshape(-1, dim)
        out = np.empty(q.shape[0])
        for i, point in enumerate(q):
            r = float(np.sqrt(point @ point))
            lo, hi = max(r / 8.0, 1e-12), r * 8.0 + 1e-12
            ts = np.geomspace(lo, hi, 48)
            best = np.inf
            for d in rays:
                vals = row_norms(eval_map(phi, ts[:, None] * d[None, :]) - point)
                k = int(np.argmin(vals))
                a = ts[max(k - 1, 0)]
                b = ts[min(k + 1, len(ts) - 1)]
                best = min(best, _golden_min(
                    lambda t, dd=d: float(row_norms(
                        eval_map(phi, np.array([[t * c for c in dd]])) - point)[0]),
                    a, b))
            out[i] = best
        return out

    def sample(inner, outer):
        keep = scales[(scales >= inner / 4) & (scales <= outer * 4)]
        if keep.size == 0:
            return np.empty((0, dim))
        pts = np.vstack([eval_map(phi, keep[:, None] * d[None, :]) for d in rays])
        radii = row_norms(pts)
        return pts[(radii >= inner) & (radii <= outer)]

    pts = np.vstack([eval_map(phi, scales[:, None] * d[None, :]) for d in rays])
    radii = row_norms(pts)
    sampled = SampledGerm(dim=dim, points=pts, min_scale=float(radii.min()),
                          max_scale=float(radii.max()))
    return GermOracle(dim=dim, distance=distance, sample=sample, sampled=sampled,
                      label=label, family=None)


def _golden_min(fn, a: float, b: float, iters: int = 40) -> float:
    """Golden-section minimum of fn on [a, b]."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - inv_phi * (b - a)
    x2 = a + inv_phi * (b - a)
    f1, f2 = fn(x1), fn(x2)
    for _ in range(iters):
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - inv_phi * (b - a)
            f1 = fn(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + inv_phi * (b - a)
            f2 = fn(x2)
    return min(f1, f2)
