"""Finite-horizon tests for the sequence selection property (SSP).

A limit statement ("the ratio tends to 1", "dist(ta, A) = o(t)") can never be
certified from finitely many terms, so every test returns a three-way verdict
with explicit evidence: satisfied, violated, or inconclusive. The satisfied
and violated rules are trend-aware; see each test's docstring.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._util import fit_slope
from .core import DirectionSet, GermOracle, ScaleSchedule
from .errors import GermlabError
from .sequences import SequenceGerm, from_rule

SATISFIED = "satisfied"
VIOLATED = "violated"
INCONCLUSIVE = "inconclusive"

DEFAULT_RATIO_TOL = 1e-2
DEFAULT_DISTANCE_TOL = 1e-2

# Trend thresholds for the log-log decay fit of the deviation series.
_DECAY_SLOPE = -0.05
_FLAT_SLOPE = -0.01
_LOG_FLOOR = 1e-300


@dataclass(frozen=True)
class SSPVerdict:
    """Outcome of an SSP test: verdict, measured evidence, tolerance used."""

    verdict: str
    evidence: tuple[tuple[float, float], ...]
    tol: float
    detail: dict = field(default_factory=dict)

    @property
    def is_satisfied(self) -> bool:
        return self.verdict == SATISFIED

    @property
    def is_violated(self) -> bool:
        return self.verdict == VIOLATED

    def to_json_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "tol": float(self.tol),
            "evidence": [[float(a), float(b)] for a, b in self.evidence],
            "detail": {k: _jsonable(v) for k, v in self.detail.items()},
        }


def _jsonable(v):
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, (np.integer, int)):
        return int(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def _decimate(idx: np.ndarray, values: np.ndarray, keep: int = 256):
    step = max(1, len(idx) // keep)
    sel = np.arange(0, len(idx), step)
    if sel[-1] != len(idx) - 1:
        sel = np.append(sel, len(idx) - 1)
    return tuple((float(idx[i]), float(values[i])) for i in sel)


def _limit_verdict(indices: np.ndarray, w: np.ndarray, tol: float, window: int) -> tuple[str, dict]:
    """Classify a deviation series w_m that should tend to 0.

    satisfied: the trailing window stays within tol, or the series decays
    (log-log slope <= -0.05 over the trailing half) while staying under the
    spike bar. violated: a spike >= 10 tol inside the trailing window, or the
    trailing window sits entirely above tol with no decay trend. Otherwise
    inconclusive.
    """
    if window < 1 or window > len(w):
        raise GermlabError("window must be between 1 and the horizon")
    tail = w[-window:]
    tail_max = float(tail.max())
    tail_min = float(tail.min())
    half = max(2, len(w) // 2)
    wh = np.maximum(w[-half:], _LOG_FLOOR)
    slope = fit_slope(np.log(indices[-half:].astype(float)), np.log(wh))
    detail = {"tail_max": tail_max, "tail_min": tail_min,
              "decay_slope": slope, "window": window}
    if tail_max <= tol:
        detail["reason"] = "trailing deviations within tol"
        return SATISFIED, detail
    if tail_max >= 10 * tol:
        detail["reason"] = "spike >= 10*tol in the trailing window"
        return VIOLATED, detail
    if slope <= _DECAY_SLOPE:
        detail["reason"] = "deviations decay toward 0"
        return SATISFIED, detail
    if slope >= _FLAT_SLOPE and tail_min > tol:
        detail["reason"] = "deviations stay above tol with no decay"
        return VIOLATED, detail
    detail["reason"] = "no decisive trend at this horizon"
    return INCONCLUSIVE, detail


def ratio_series(a: SequenceGerm, horizon: int) -> tuple[np.ndarray, np.ndarray]:
    """(indices m, rho_m = a_m / a_{m+1}) for m = 1..horizon, horizon clamped."""
    h = a.available_horizon(horizon + 1) - 1
    if h < 2:
        raise GermlabError("sequence too short for a ratio series")
    logs = a.log_terms(h + 1)
    rho = np.exp(logs[:-1] - logs[1:])
    return np.arange(1, h + 1, dtype=float), rho


def ssp_ratio_test(a: SequenceGerm, horizon: int, tol: float = DEFAULT_RATIO_TOL,
                   window: int | None = None) -> SSPVerdict:
    """Ratio criterion: SSP for decreasing null sequences iff a_m/a_{m+1} -> 1.

    The deviation series is w_m = |rho_m - 1|, classified by _limit_verdict.
    """
    if tol <= 0:
        raise GermlabError("tol must be positive")
    idx, rho = ratio_series(a, horizon)
    h = len(idx)
    if window is None:
        window = max(2, h // 10)
    if h < 2 * window:
        raise GermlabError("horizon must be at least twice the window")
    w = np.abs(rho - 1.0)
    verdict, detail = _limit_verdict(idx, w, tol, window)
    detail["horizon"] = h
    return SSPVerdict(verdict, _decimate(idx, rho), tol, detail)


def ssp_definition_oracle(a: SequenceGerm, horizon: int,
                          tol: float = DEFAULT_RATIO_TOL) -> SSPVerdict:
    """Direct finite check of the shadowing definition on midpoint probes.

    For the probe p_m between a_{m+1} and a_m the nearest sequence element is
    one of the two neighbours, so the relative miss is
    min(p - a_{m+1}, a_m - p) / p = (1 - s) / (1 + s) with s = a_{m+1}/a_m.
    Computed from the term ratios in that form (the values themselves may
    underflow), which is a different arithmetic route than the ratio test.
    """
    if tol <= 0:
        raise GermlabError("tol must be positive")
    h = a.available_horizon(horizon + 1) - 1
    if h < 4:
        raise GermlabError("need a horizon of at least 4")
    logs = a.log_terms(h + 1)
    s = np.exp(logs[1:] - logs[:-1])  # a_{m+1} / a_m, in (0, 1)
    w = (1.0 - s) / (1.0 + s)
    idx = np.arange(1, h + 1, dtype=float)
    verdict, detail = _limit_verdict(idx, w, tol, max(2, h // 10))
    detail["horizon"] = h
    return SSPVerdict(verdict, _decimate(idx, w), tol, detail)


def ssp_distance_test(g: GermOracle, d: DirectionSet, s: ScaleSchedule,
                      tol: float = DEFAULT_DISTANCE_TOL) -> SSPVerdict:
    """Distance criterion: dist(t a, A) = o(t) for every estimated direction.

    Measures q_k = dist(t_k a, A) / t_k per rep over the ladder. Satisfied
    needs every rep's trailing half within tol with non-positive trend;
    violated needs some rep whose trailing median is >= 10 tol (the direction
    stays far from the germ at essentially all probed scales).
    """
    if tol <= 0:
        raise GermlabError("tol must be positive")
    if s.depth < 8:
        raise GermlabError("distance test needs schedule depth >= 8")
    if d.is_empty:
        raise GermlabError("distance test needs a nonempty direction set")
    scales = s.scales()
    half = s.depth // 2
    ks = np.arange(s.depth, dtype=float)
    worst_rep, worst_stat = None, -np.inf
    per_rep = []
    all_ok = True
    violated = False
    for i, rep in enumerate(d.reps):
        q = g.distances(scales[:, None] * rep[None, :]) / scales
        tail = q[half:]
        tail_max = float(tail.max())
        tail_med = float(np.median(tail))
        slope = fit_slope(ks[half:], tail)
        # the trend only matters when deviations are near the tolerance scale;
        # far below it, slope is numerical noise
        ok = tail_max <= tol and (tail_max <= 0.1 * tol or slope <= 1e-12)
        all_ok = all_ok and ok
        if tail_med >= 10 * tol:
            violated = True
        per_rep.append({"rep": [float(v) for v in rep], "tail_max": tail_max,
                        "tail_median": tail_med, "slope": slope})
        if tail_med > worst_stat:
            worst_stat, worst_rep = tail_med, (rep, q)
    if violated:
        verdict = VIOLATED
    elif all_ok:
        verdict = SATISFIED
    else:
        verdict = INCONCLUSIVE
    rep, q = worst_rep
    evidence = tuple((float(t), float(v)) for t, v in zip(scales, q))
    detail = {"per_rep": per_rep, "depth": s.depth,
              "worst_rep": [float(v) for v in rep]}
    return SSPVerdict(verdict, evidence, tol, detail)


@dataclass(frozen=True)
class PBResult:
    """Finite-horizon polynomial-boundedness verdict (a surrogate, not a proof)."""

    bounded: bool
    witness: int | None
    k_max: int
    horizon: int
    first_violation: dict

    def to_json_dict(self) -> dict:
        return {"bounded": self.bounded, "witness": self.witness,
                "k_max": self.k_max, "horizon": self.horizon,
                "first_violation": {str(k): int(v) for k, v in self.first_violation.items()},
                "note": "finite-horizon surrogate"}


def polynomial_boundedness_test(a: SequenceGerm, k_max: int, horizon: int) -> PBResult:
    """Smallest k <= k_max with a_m >= 1/m^k for all 2 <= m <= horizon, if any.

    Comparison runs in log space so families far below double-precision range
    still test correctly.
    """
    if k_max < 1:
        raise GermlabError("k_max must be at least 1")
    if horizon < 2:
        raise GermlabError("horizon must be at least 2")
    h = a.available_horizon(horizon)
    if h < 2:
        raise GermlabError("sequence too short for the boundedness test")
    logs = a.log_terms(h)
    m = np.arange(1, h + 1, dtype=float)
    log_m = np.log(m[1:])
    vals = logs[1:]
    first_violation: dict[int, int] = {}
    for k in range(1, k_max + 1):
        bad = vals < -k * log_m - 1e-12
        if not bad.any():
            return PBResult(True, k, k_max, h, first_violation)
        first_violation[k] = int(np.argmax(bad)) + 2
    return PBResult(False, None, k_max, h, first_violation)


def pb_not_ssp_sequence(i_max: int = 6) -> SequenceGerm:
    """Polynomially bounded sequence whose ratio does not tend to 1.

    Built on the block markers m_i = i^i: a_{m_i} = 1/m_i^2 down to
    a_{m_{i+1}-1} = 1/(m_i^2 + m_i) with geometric interpolation inside each
    block, so ratios are near 1 within blocks but jump by m_{i+1}^2/(m_i^2+m_i)
    at the boundaries.
    """
    if i_max < 3:
        raise GermlabError("need i_max >= 3 for a nontrivial construction")
    return from_rule("pb_not_ssp", i_max=i_max)
