"""Transversality predicates and empirical harnesses for the invariance results.

The harnesses are evidence generators at desk scale, not proof checkers: each
one records the SSP verdicts it depends on, and never reports PASS or FAIL
when those hypotheses are unmet or inconclusive (the zigzag example shows the
conclusions genuinely fail without them).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._util import ball_points, normalize_rows, pairwise_distances, row_norms
from .core import DirectionSet, GermOracle, ScaleSchedule, default_schedule
from .direction import (DEFAULT_EPS, default_resolutions, dimension_profile,
                        estimate_direction_set, greedy_net, sphere_hausdorff)
from .errors import GermlabError
from .examples import pushforward_germ
from .lipschitz import doubling_composite, extend_map, pseudo_derivative
from .maps import MapDescriptor, anchor_lipschitz, eval_map
from .ssp import DEFAULT_DISTANCE_TOL, SSPVerdict, ssp_distance_test

EMPTY_DIMENSION = -1  # direction-set dimension of the empty set; its cone is {0}


def intersect_direction_sets(d1: DirectionSet, d2: DirectionSet,
                             eps: float | None = None) -> DirectionSet:
    """Finite surrogate of D(A) n D(B): reps of each set lying within eps of
    the other, merged and re-netted. Defaults eps to 2 max(d1.eps, d2.eps)."""
    if d1.dim != d2.dim:
        raise GermlabError("direction sets live in different dimensions")
    if eps is None:
        eps = 2.0 * max(d1.eps, d2.eps)
    net_eps = max(d1.eps, d2.eps)
    picked = []
    if not d1.is_empty and not d2.is_empty:
        dm = pairwise_distances(d1.reps, d2.reps)
        picked.append(d1.reps[dm.min(axis=1) <= eps])
        picked.append(d2.reps[dm.min(axis=0) <= eps])
    merged = np.vstack(picked) if picked else np.empty((0, d1.dim))
    if merged.shape[0] == 0:
        return DirectionSet(dim=d1.dim, reps=np.empty((0, d1.dim)), eps=net_eps,
                            weights=np.empty(0, dtype=int))
    reps, weights = greedy_net(merged, net_eps)
    return DirectionSet(dim=d1.dim, reps=reps, eps=net_eps, weights=weights)


def is_weakly_transverse(dA: DirectionSet, dB: DirectionSet,
                         eps: float | None = None) -> bool:
    """Weak transversality: the direction sets do not meet (at resolution eps)."""
    return intersect_direction_sets(dA, dB, eps).is_empty


def direction_set_dimension(d: DirectionSet, resolutions=None) -> int:
    """Box-counting dimension, with the empty set at -1 (its cone is the origin)."""
    if d.is_empty:
        return EMPTY_DIMENSION
    if resolutions is None:
        resolutions = default_resolutions(d.eps)
    return dimension_profile(d, resolutions).dimension


def cone_dimension(d: DirectionSet, resolutions=None) -> int:
    """dim of the half-cone over d: direction dimension + 1, and 0 when empty."""
    return direction_set_dimension(d, resolutions) + 1


def is_transverse(dA: DirectionSet, dB: DirectionSet, n: int, resolutions=None) -> bool:
    """dim LD(A) + dim LD(B) - dim(LD(A) n LD(B)) == n, on integer estimates."""
    if dA.dim != n or dB.dim != n:
        raise GermlabError("direction sets must live in R^n")
    inter = intersect_direction_sets(dA, dB)
    total = (cone_dimension(dA, resolutions) + cone_dimension(dB, resolutions)
             - cone_dimension(inter, resolutions))
    return total == n


@dataclass(frozen=True)
class HarnessConfig:
    """Shared knobs for the theorem harnesses."""

    schedule: ScaleSchedule = field(default_factory=default_schedule)
    eps: float = DEFAULT_EPS
    ssp_tol: float = DEFAULT_DISTANCE_TOL
    tol: float = 0.1
    pd_tol: float = 1e-3
    pd_budget: int = 14
    ball_points: int = 128
    per_shell: int = 16
    mode: str = "theorem"  # cone invariance: "theorem" (two-sided) or "lemma"
    resolutions: tuple[float, ...] | None = None


@dataclass(frozen=True)
class TheoremReport:
    """Harness outcome: hypothesis verdicts, measurements, tri-state pass."""

    name: str
    hypotheses: dict
    measured: dict
    passed: bool | None
    notes: tuple[str, ...] = ()

    def to_json_dict(self) -> dict:
        def conv(v):
            if isinstance(v, SSPVerdict):
                return v.to_json_dict()
            if isinstance(v, (np.floating, float)):
                return float(v)
            if isinstance(v, (np.integer, int)):
                return int(v)
            if isinstance(v, (list, tuple)):
                return [conv(x) for x in v]
            if isinstance(v, dict):
                return {k: conv(x) for k, x in v.items()}
            return v

        return {"name": self.name,
                "hypotheses": conv(self.hypotheses),
                "measured": conv(self.measured),
                "pass": self.passed,
                "notes": list(self.notes)}


def _dedupe_rows(arr: np.ndarray) -> np.ndarray:
    return np.unique(np.asarray(arr, dtype=float), axis=0)


def _embed_block(reps: np.ndarray, n: int, front: bool) -> np.ndarray:
    out = np.zeros((reps.shape[0], 2 * n))
    if front:
        out[:, :n] = reps
    else:
        out[:, n:] = reps
    return out


def check_cone_invariance(gA: GermOracle, gB: GermOracle, phi: MapDescriptor,
                          cfg: HarnessConfig | None = None) -> TheoremReport:
    """Tangent-cone invariance harness: does the globalized map's
    pseudo-derivative carry D(A) onto D(B)?

    Builds extensions of phi and its inverse from the sampled anchors, forms
    the doubling composite on R^{2n}, takes its rescaling pseudo-derivative on
    a grid containing the embedded reps of D(A), and compares the mapped
    directions with D(B) embedded in the second block. Two-sided mode needs
    both germs SSP; lemma mode checks the one-sided containment and needs only
    A's SSP.
    """
    cfg = cfg or HarnessConfig()
    n = gA.dim
    if gB.dim != n or phi.dim_in != n or phi.dim_out != n:
        raise GermlabError("cone invariance needs germs and map in the same R^n")
    dA = estimate_direction_set(gA, cfg.schedule, cfg.eps)
    dB = estimate_direction_set(gB, cfg.schedule, cfg.eps)
    ssp_A = ssp_distance_test(gA, dA, cfg.schedule, cfg.ssp_tol)
    ssp_B = ssp_distance_test(gB, dB, cfg.schedule, cfg.ssp_tol)

    if gA.sampled is None:
        raise GermlabError("cone invariance needs a sampled A germ for anchors")
    anchors = _dedupe_rows(gA.sampled.points)
    values = eval_map(phi, anchors)
    transport = float(np.max(gB.distances(values) / np.maximum(row_norms(anchors), 1e-300)))

    phi_ext = extend_map(anchors, values, max(anchor_lipschitz(anchors, values), 1e-9))
    phi_inv_ext = extend_map(values, anchors, max(anchor_lipschitz(values, anchors), 1e-9))
    composite = doubling_composite(phi_ext, phi_inv_ext)

    grid = np.vstack([_embed_block(dA.reps, n, front=True),
                      ball_points(2 * n, cfg.ball_points)])
    # extensions of germ anchors vanish at 0 only up to the finest anchor
    # scale; the rescaled drift 2^budget * ||f(0)|| must stay well under tol
    origin_tol = max(1e-12, 0.01 * cfg.tol / 2.0**cfg.pd_budget)
    dphi, rescaling = pseudo_derivative(composite, grid, cfg.pd_tol,
                                        cfg.pd_budget, origin_tol=origin_tol)

    mapped = eval_map(dphi, _embed_block(dA.reps, n, front=True))
    norms = row_norms(mapped)
    notes = []
    if np.any(norms < 1e-9):
        notes.append("pseudo-derivative collapses a direction")
        mapped_unit = None
    else:
        mapped_unit = mapped / norms[:, None]
    target = _embed_block(dB.reps, n, front=False)

    measured = {
        "anchor_transport": transport,
        "rescaling_converged": rescaling.converged,
        "rescaling_accepted": list(rescaling.accepted),
        "reps_A": len(dA), "reps_B": len(dB),
    }
    if mapped_unit is not None:
        dm = pairwise_distances(mapped_unit, target)
        measured["two_sided"] = float(max(dm.min(axis=1).max(), dm.min(axis=0).max()))
        measured["one_sided_excess"] = float(dm.min(axis=1).max())

    hypotheses = {"ssp_A": ssp_A, "ssp_B": ssp_B}
    passed: bool | None = None
    if transport > cfg.tol:
        notes.append("phi does not map the sampled A into B at tolerance")
    elif mapped_unit is None:
        pass
    elif cfg.mode == "lemma":
        if ssp_A.is_satisfied:
            passed = measured["one_sided_excess"] <= cfg.tol
        else:
            notes.append("hypotheses unmet: A is not certified SSP")
    else:
        if ssp_A.is_satisfied and ssp_B.is_satisfied:
            passed = measured["two_sided"] <= cfg.tol
        else:
            notes.append("hypotheses unmet: both germs must be certified SSP")
    return TheoremReport(name="cone-invariance", hypotheses=hypotheses,
                         measured=measured, passed=passed, notes=tuple(notes))


def _direction_data(g: GermOracle, cfg: HarnessConfig):
    d = estimate_direction_set(g, cfg.schedule, cfg.eps)
    return d, ssp_distance_test(g, d, cfg.schedule, cfg.ssp_tol)


def check_dimension_equality(gA: GermOracle, gB: GermOracle, h: MapDescriptor,
                             cfg: HarnessConfig | None = None) -> TheoremReport:
    """Dimension-equality harness: dim(D(hA) n D(hB)) vs dim(D(A) n D(B)).

    With all four germs certified SSP the integer estimates must agree; when
    only one side is certified, the one-sided inequality (image at least as
    large as the source, or conversely) is checked instead.
    """
    cfg = cfg or HarnessConfig()
    ghA = pushforward_germ(h, gA, cfg.schedule, cfg.per_shell)
    ghB = pushforward_germ(h, gB, cfg.schedule, cfg.per_shell)
    dA, ssp_A = _direction_data(gA, cfg)
    dB, ssp_B = _direction_data(gB, cfg)
    dhA, ssp_hA = _direction_data(ghA, cfg)
    dhB, ssp_hB = _direction_data(ghB, cfg)

    inter_src = intersect_direction_sets(dA, dB)
    inter_img = intersect_direction_sets(dhA, dhB)
    dim_src = direction_set_dimension(inter_src, cfg.resolutions)
    dim_img = direction_set_dimension(inter_img, cfg.resolutions)

    hypotheses = {"ssp_A": ssp_A, "ssp_B": ssp_B, "ssp_hA": ssp_hA, "ssp_hB": ssp_hB}
    measured = {"dim_source": dim_src, "dim_image": dim_img,
                "source_reps": len(inter_src), "image_reps": len(inter_img)}
    src_ok = ssp_A.is_satisfied and ssp_B.is_satisfied
    img_ok = ssp_hA.is_satisfied and ssp_hB.is_satisfied
    notes = []
    if src_ok and img_ok:
        passed = dim_img == dim_src
        measured["checked"] = "equality"
    elif src_ok:
        passed = dim_img >= dim_src
        measured["checked"] = "image >= source (one-sided)"
    elif img_ok:
        passed = dim_src >= dim_img
        measured["checked"] = "source >= image (one-sided)"
    else:
        passed = None
        notes.append("hypotheses unmet: no side has both germs certified SSP")
    return TheoremReport(name="dimension-equality", hypotheses=hypotheses,
                         measured=measured, passed=passed, notes=tuple(notes))


def check_weak_transversality_preservation(gA: GermOracle, gB: GermOracle,
                                           h: MapDescriptor,
                                           cfg: HarnessConfig | None = None
                                           ) -> TheoremReport:
    """Weak-transversality harness: D(A) n D(B) empty iff D(hA) n D(hB) empty.

    Hypotheses: at least one germ on each side certified SSP.
    """
    cfg = cfg or HarnessConfig()
    ghA = pushforward_germ(h, gA, cfg.schedule, cfg.per_shell)
    ghB = pushforward_germ(h, gB, cfg.schedule, cfg.per_shell)
    dA, ssp_A = _direction_data(gA, cfg)
    dB, ssp_B = _direction_data(gB, cfg)
    dhA, ssp_hA = _direction_data(ghA, cfg)
    dhB, ssp_hB = _direction_data(ghB, cfg)

    src = is_weakly_transverse(dA, dB)
    img = is_weakly_transverse(dhA, dhB)
    hypotheses = {"ssp_A": ssp_A, "ssp_B": ssp_B, "ssp_hA": ssp_hA, "ssp_hB": ssp_hB}
    measured = {"weakly_transverse_source": src, "weakly_transverse_image": img}
    notes = []
    if (ssp_A.is_satisfied or ssp_B.is_satisfied) and \
            (ssp_hA.is_satisfied or ssp_hB.is_satisfied):
        passed = src == img
    else:
        passed = None
        notes.append("hypotheses unmet: need an SSP germ on each side")
    return TheoremReport(name="weak-transversality", hypotheses=hypotheses,
                         measured=measured, passed=passed, notes=tuple(notes))
