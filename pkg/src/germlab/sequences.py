"""Strictly decreasing positive null sequences and their semigroup operations.

Sequences are evaluated in log space throughout: families like 1/m^sqrt(m)
underflow double precision long before the horizons of interest (m ~ 6000),
while their log terms stay perfectly representable.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import take_fields
from .errors import GermlabError, SchemaError

PREFIX_LEN = 32


@dataclass(frozen=True)
class SequenceRule:
    """Named generator rule; evaluates log a_m for any index in its domain."""

    name: str
    params: dict

    def __post_init__(self):
        if self.name not in _RULES:
            raise SchemaError(f"unknown sequence rule {self.name!r}")
        _RULES[self.name].validate(self.params)

    def max_index(self) -> int | None:
        return _RULES[self.name].max_index(self.params)

    def log_terms(self, m: np.ndarray) -> np.ndarray:
        m = np.asarray(m, dtype=float)
        cap = self.max_index()
        if cap is not None and np.any(m > cap):
            raise GermlabError(f"rule {self.name!r} is only defined up to m = {cap}")
        if np.any(m < 1):
            raise GermlabError("sequence indices start at m = 1")
        return _RULES[self.name].log_terms(self.params, m)

    def exact_term(self, m: int) -> Fraction | None:
        """Exact rational value when the family is rational, else None."""
        fn = _RULES[self.name].exact_term
        return None if fn is None else fn(self.params, m)

    def to_json_dict(self) -> dict:
        return {"name": self.name, "params": _params_to_json(self.params)}

    @classmethod
    def from_json_dict(cls, doc: dict) -> "SequenceRule":
        take_fields(doc, ("name", "params"), where="SequenceRule")
        name = str(doc["name"])
        if name not in _RULES:
            raise SchemaError(f"unknown sequence rule {name!r}")
        return cls(name, _RULES[name].params_from_json(doc["params"]))


class _RuleImpl:
    def __init__(self, validate, log_terms, max_index=lambda p: None,
                 exact_term=None, params_from_json=None):
        self.validate = validate
        self.log_terms = log_terms
        self.max_index = max_index
        self.exact_term = exact_term
        self.params_from_json = params_from_json or (lambda p: dict(p))


def _no_params(params):
    if params:
        raise SchemaError(f"rule takes no parameters, got {sorted(params)}")


def _pb_boundaries(i_max: int) -> np.ndarray:
    return np.array([i**i for i in range(1, i_max + 1)], dtype=np.int64)


def _pb_validate(params):
    keys = set(params)
    if keys != {"i_max"}:
        raise SchemaError(f"pb_not_ssp takes exactly 'i_max', got {sorted(keys)}")
    i_max = params["i_max"]
    if not isinstance(i_max, int) or not (3 <= i_max <= 8):
        raise GermlabError("pb_not_ssp needs integer i_max in [3, 8] (i^i overflows fast)")


def _pb_log_terms(params, m):
    # Blocks [m_i, m_{i+1}-1]: log-linear from -2 log m_i down to -log(m_i^2 + m_i),
    # then a jump to -2 log m_{i+1}. Log-linear interpolation is the geometric
    # interpolation of the values.
    bounds = _pb_boundaries(params["i_max"])
    m = np.asarray(m, dtype=float)
    out = np.empty_like(m)
    idx = np.searchsorted(bounds, m, side="right") - 1  # block index, 0-based
    at_top = m >= bounds[-1]
    out[at_top] = -2.0 * np.log(float(bounds[-1]))
    inner = ~at_top
    bi = bounds[idx[inner]].astype(float)
    bnext = bounds[idx[inner] + 1].astype(float)
    start = -2.0 * np.log(bi)
    end = -np.log(bi * bi + bi)
    span = bnext - 1.0 - bi
    lam = np.zeros_like(bi)
    pos = span > 0
    lam[pos] = (m[inner][pos] - bi[pos]) / span[pos]
    out[inner] = start + lam * (end - start)
    return out


def _power_validate(params):
    keys = set(params)
    if keys != {"p", "shift", "scale"}:
        raise SchemaError(f"power rule needs p, shift, scale; got {sorted(keys)}")
    if params["p"] <= 0 or params["scale"] <= 0 or params["shift"] < 0:
        raise GermlabError("power rule needs p > 0, scale > 0, shift >= 0")


def _power_exact(params, m):
    p, shift, scale = params["p"], params["shift"], params["scale"]
    if p != int(p) or shift != int(shift):
        return None
    return Fraction(scale).limit_denominator(10**9) / Fraction(m + int(shift)) ** int(p)


_RULES: dict[str, _RuleImpl] = {
    "harmonic": _RuleImpl(
        _no_params,
        lambda p, m: -np.log(m),
        exact_term=lambda p, m: Fraction(1, m),
    ),
    "log_ratio": _RuleImpl(
        _no_params,
        lambda p, m: np.log(np.log1p(1.0 / m)),
    ),
    "power_sqrt": _RuleImpl(
        _no_params,
        lambda p, m: -np.sqrt(m) * np.log(m),
    ),
    "geometric": _RuleImpl(
        lambda p: (set(p) == {"q"} and 0 < p["q"] < 1) or _raise_geo(p),
        lambda p, m: m * np.log(p["q"]),
    ),
    "pb_not_ssp": _RuleImpl(
        _pb_validate,
        _pb_log_terms,
        max_index=lambda p: int(_pb_boundaries(p["i_max"])[-1]),
        params_from_json=lambda p: {"i_max": int(p["i_max"])},
    ),
    "power": _RuleImpl(
        _power_validate,
        lambda p, m: np.log(p["scale"]) - p["p"] * np.log(m + p["shift"]),
        exact_term=_power_exact,
    ),
    "sum": _RuleImpl(
        lambda p: _combo_validate(p),
        lambda p, m: np.logaddexp(p["a"].log_terms(m), p["b"].log_terms(m)),
        max_index=lambda p: _combo_max(p),
        exact_term=lambda p, m: _combo_exact(p, m, lambda x, y: x + y),
        params_from_json=lambda p: _combo_from_json(p),
    ),
    "product": _RuleImpl(
        lambda p: _combo_validate(p),
        lambda p, m: p["a"].log_terms(m) + p["b"].log_terms(m),
        max_index=lambda p: _combo_max(p),
        exact_term=lambda p, m: _combo_exact(p, m, lambda x, y: x * y),
        params_from_json=lambda p: _combo_from_json(p),
    ),
}


def _raise_geo(p):
    raise GermlabError("geometric rule needs exactly parameter q in (0, 1)")


def _combo_validate(params):
    if set(params) != {"a", "b"}:
        raise SchemaError("sum/product rules need exactly child rules 'a' and 'b'")
    for key in ("a", "b"):
        if not isinstance(params[key], SequenceRule):
            raise SchemaError("sum/product children must be sequence rules")


def _combo_max(params):
    caps = [c for c in (params["a"].max_index(), params["b"].max_index()) if c is not None]
    return min(caps) if caps else None


def _combo_exact(params, m, op):
    xa = params["a"].exact_term(m)
    xb = params["b"].exact_term(m)
    if xa is None or xb is None:
        return None
    return op(xa, xb)


def _combo_from_json(params):
    take_fields(params, ("a", "b"), where="sum/product params")
    return {"a": SequenceRule.from_json_dict(params["a"]),
            "b": SequenceRule.from_json_dict(params["b"])}


def _params_to_json(params: dict) -> dict:
    out = {}
    for key, val in params.items():
        out[key] = val.to_json_dict() if isinstance(val, SequenceRule) else val
    return out


@dataclass(frozen=True, eq=False)
class SequenceGerm:
    """Strictly decreasing positive reals tending to 0: finite prefix + rule.

    The prefix holds the leading values (indices 1..len); when a rule is
    present it is authoritative for every index in its domain. Rule-less
    germs (e.g. loaded from a bare prefix) are defined only on the prefix.
    """

    prefix: np.ndarray
    rule: SequenceRule | None = None

    def __post_init__(self):
        pref = np.asarray(self.prefix, dtype=float).reshape(-1)
        object.__setattr__(self, "prefix", pref)
        if pref.size == 0 and self.rule is None:
            raise GermlabError("a sequence germ needs a prefix or a rule")
        if pref.size:
            if np.any(pref <= 0) or not np.all(np.isfinite(pref)):
                raise GermlabError("sequence values must be positive and finite")
            if np.any(np.diff(pref) >= 0):
                raise GermlabError("sequence must be strictly decreasing")

    def available_horizon(self, requested: int) -> int:
        """Largest usable horizon: the rule's domain cap or the prefix length."""
        if requested < 1:
            raise GermlabError("horizon must be at least 1")
        cap = self.rule.max_index() if self.rule is not None else len(self.prefix)
        return requested if cap is None else min(requested, cap)

    def log_terms(self, horizon: int) -> np.ndarray:
        """log a_m for m = 1..horizon (values may underflow; logs never do)."""
        horizon = int(horizon)
        if horizon < 1:
            raise GermlabError("horizon must be at least 1")
        if self.rule is not None:
            cap = self.rule.max_index()
            if cap is not None and horizon > cap:
                raise GermlabError(f"horizon {horizon} beyond rule domain {cap}")
            logs = self.rule.log_terms(np.arange(1, horizon + 1, dtype=float))
        else:
            if horizon > len(self.prefix):
                raise GermlabError(
                    f"horizon {horizon} beyond prefix length {len(self.prefix)} "
                    "and no rule is attached")
            logs = np.log(self.prefix[:horizon])
        if np.any(np.diff(logs) >= 0):
            raise GermlabError("sequence is not strictly decreasing over the horizon")
        return logs

    def terms(self, horizon: int) -> np.ndarray:
        return np.exp(self.log_terms(horizon))

    def term(self, m: int) -> float:
        return float(self.terms(m)[-1])

    def exact_term(self, m: int) -> Fraction | None:
        return self.rule.exact_term(m) if self.rule is not None else None

    def to_json_dict(self) -> dict:
        return {
            "prefix": [float(v) for v in self.prefix],
            "rule": self.rule.to_json_dict() if self.rule is not None else None,
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "SequenceGerm":
        take_fields(doc, ("prefix", "rule"), where="SequenceGerm")
        rule = None if doc["rule"] is None else SequenceRule.from_json_dict(doc["rule"])
        prefix = np.asarray(doc["prefix"], dtype=float)
        if prefix.size == 0 and rule is not None:
            prefix = _prefix_from_rule(rule)
        return cls(prefix, rule)


def _prefix_from_rule(rule: SequenceRule) -> np.ndarray:
    cap = rule.max_index()
    n = PREFIX_LEN if cap is None else min(PREFIX_LEN, cap)
    return np.exp(rule.log_terms(np.arange(1, n + 1, dtype=float)))


def from_rule(name: str, **params) -> SequenceGerm:
    rule = SequenceRule(name, params)
    return SequenceGerm(_prefix_from_rule(rule), rule)


def _binary_op(a: SequenceGerm, b: SequenceGerm, kind: str) -> SequenceGerm:
    if a.rule is not None and b.rule is not None:
        rule = SequenceRule(kind, {"a": a.rule, "b": b.rule})
        return SequenceGerm(_prefix_from_rule(rule), rule)
    if a.rule is None and b.rule is None and len(a.prefix) != len(b.prefix):
        raise GermlabError("horizon mismatch: prefixes differ and no rules attached")
    n = min(a.available_horizon(10**9), b.available_horizon(10**9))
    la, lb = a.log_terms(n), b.log_terms(n)
    vals = np.logaddexp(la, lb) if kind == "sum" else la + lb
    return SequenceGerm(np.exp(vals))


def seq_sum(a: SequenceGerm, b: SequenceGerm) -> SequenceGerm:
    """Termwise sum {a_m + b_m}; strictly decreasing by construction."""
    return _binary_op(a, b, "sum")


def seq_product(a: SequenceGerm, b: SequenceGerm) -> SequenceGerm:
    """Termwise product {a_m * b_m}."""
    return _binary_op(a, b, "product")
