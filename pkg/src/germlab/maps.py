"""Evaluable map descriptors: a closed catalog of builders plus combinators.

Maps are descriptors rather than arbitrary callables so the CLI can
serialize them; evaluation is deterministic (same input, bit-identical
output). Every evaluator accepts a single point (n,) or a batch (k, n).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._util import as_point_array, ball_points, pairwise_distances, row_norms
from .core import take_fields
from .errors import GermlabError, SchemaError
from .expr import EvalDomainError, evaluate as expr_evaluate, free_variables, parse as expr_parse

KINDS = ("identity", "affine", "stack", "sum", "compose",
         "shear_plus", "shear_minus", "rescaled", "pwl", "expr", "extension")


@dataclass(frozen=True, eq=False)
class MapDescriptor:
    """An evaluable mapping R^dim_in -> R^dim_out built from the catalog."""

    kind: str
    params: dict = field(repr=False)
    dim_in: int
    dim_out: int
    lip_upper: float | None = None
    inverse: "MapDescriptor | None" = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown map kind {self.kind!r}")

    def __call__(self, x):
        return eval_map(self, x)

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "params": _params_to_json(self.kind, self.params),
            "inverse": None if self.inverse is None else self.inverse.to_json_dict(),
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "MapDescriptor":
        take_fields(doc, ("kind", "params"), optional=("inverse",), where="MapDescriptor")
        kind = str(doc["kind"])
        if kind not in KINDS:
            raise SchemaError(f"unknown map kind {kind!r}")
        desc = _params_from_json(kind, doc["params"])
        inv_doc = doc.get("inverse")
        if inv_doc is not None:
            inv = cls.from_json_dict(inv_doc)
            desc = _with_inverse(desc, inv)
        return desc


def _with_inverse(desc: MapDescriptor, inverse: MapDescriptor | None) -> MapDescriptor:
    return MapDescriptor(desc.kind, desc.params, desc.dim_in, desc.dim_out,
                         desc.lip_upper, inverse)


# ---------------------------------------------------------------------------
# constructors

def identity_map(dim: int) -> MapDescriptor:
    if dim < 1:
        raise GermlabError("dimension must be positive")
    desc = MapDescriptor("identity", {"dim": dim}, dim, dim, 1.0, None)
    return _with_inverse(desc, desc)


def affine_map(matrix, offset=None) -> MapDescriptor:
    """x -> matrix @ x + offset; an exact inverse is attached when invertible."""
    mat = np.asarray(matrix, dtype=float)
    if mat.ndim != 2:
        raise GermlabError("affine matrix must be 2-d")
    m, n = mat.shape
    off = np.zeros(m) if offset is None else np.asarray(offset, dtype=float).reshape(-1)
    if off.shape[0] != m:
        raise GermlabError("offset length must match the matrix row count")
    lip = float(np.linalg.norm(mat, 2))
    desc = MapDescriptor("affine", {"matrix": mat, "offset": off}, n, m, lip, None)
    if m == n:
        det = float(np.linalg.det(mat))
        if abs(det) > 1e-12:
            inv_mat = np.linalg.inv(mat)
            inv = MapDescriptor("affine", {"matrix": inv_mat, "offset": -inv_mat @ off},
                                m, n, float(np.linalg.norm(inv_mat, 2)), None)
            inv = _with_inverse(inv, desc)
            desc = _with_inverse(desc, inv)
    return desc


def linear_map(matrix) -> MapDescriptor:
    return affine_map(matrix, None)


def rotation_map(theta: float) -> MapDescriptor:
    """Plane rotation by theta (an isometry; exact inverse attached)."""
    c, s = np.cos(theta), np.sin(theta)
    return affine_map([[c, -s], [s, c]])


def stack_map(*components: MapDescriptor) -> MapDescriptor:
    """Stack scalar-valued maps into one vector-valued map."""
    if not components:
        raise GermlabError("stack needs at least one component")
    dim_in = components[0].dim_in
    for c in components:
        if c.dim_in != dim_in:
            raise GermlabError("stack components must share the input dimension")
        if c.dim_out != 1:
            raise GermlabError("stack components must be scalar-valued")
    lips = [c.lip_upper for c in components]
    lip = None if any(l is None for l in lips) else float(np.sqrt(sum(l * l for l in lips)))
    return MapDescriptor("stack", {"components": tuple(components)},
                         dim_in, len(components), lip, None)


def sum_map(*maps: MapDescriptor) -> MapDescriptor:
    if len(maps) < 2:
        raise GermlabError("sum needs at least two maps")
    dim_in, dim_out = maps[0].dim_in, maps[0].dim_out
    for f in maps:
        if (f.dim_in, f.dim_out) != (dim_in, dim_out):
            raise GermlabError("summed maps must share dimensions")
    lips = [f.lip_upper for f in maps]
    lip = None if any(l is None for l in lips) else float(sum(lips))
    return MapDescriptor("sum", {"maps": tuple(maps)}, dim_in, dim_out, lip, None)


def compose_map(*maps: MapDescriptor) -> MapDescriptor:
    """compose_map(f, g) evaluates f(g(x)) (mathematical order)."""
    if len(maps) < 2:
        raise GermlabError("compose needs at least two maps")
    for outer, inner in zip(maps[:-1], maps[1:]):
        if outer.dim_in != inner.dim_out:
            raise GermlabError("composition dimensions do not chain")
    lips = [f.lip_upper for f in maps]
    lip = None if any(l is None for l in lips) else float(np.prod(lips))
    inverse = None
    if all(f.inverse is not None for f in maps):
        inv_chain = tuple(f.inverse for f in reversed(maps))
        inverse = MapDescriptor("compose", {"maps": inv_chain},
                                maps[0].dim_out, maps[-1].dim_in,
                                None, None)
    desc = MapDescriptor("compose", {"maps": tuple(maps)},
                         maps[-1].dim_in, maps[0].dim_out, lip, inverse)
    if inverse is not None:
        object.__setattr__(desc.inverse, "inverse", desc)
    return desc


def shear_map(axis: str, f: MapDescriptor, sign: int = 1) -> MapDescriptor:
    """Graph shear on R^{2n}: plus is (x, y) -> (x, y + sign f(x)), minus acts on x."""
    if axis not in ("plus", "minus"):
        raise GermlabError("shear axis must be 'plus' or 'minus'")
    if sign not in (1, -1):
        raise GermlabError("shear sign must be +1 or -1")
    if f.dim_in != f.dim_out:
        raise GermlabError("shear profile must map R^n to R^n")
    n = f.dim_in
    lip = None if f.lip_upper is None else 1.0 + f.lip_upper
    kind = "shear_plus" if axis == "plus" else "shear_minus"
    desc = MapDescriptor(kind, {"f": f, "sign": sign}, 2 * n, 2 * n, lip, None)
    inv = MapDescriptor(kind, {"f": f, "sign": -sign}, 2 * n, 2 * n, lip, None)
    object.__setattr__(desc, "inverse", inv)
    object.__setattr__(inv, "inverse", desc)
    return desc


def rescaled_map(f: MapDescriptor, n: int) -> MapDescriptor:
    """x -> n f(x/n); shares f's Lipschitz constants. Requires f(0) = 0."""
    if n < 1 or int(n) != n:
        raise GermlabError("rescaling index n must be a positive integer")
    origin = eval_map(f, np.zeros(f.dim_in))
    if float(np.max(np.abs(origin))) > 1e-12:
        raise GermlabError("rescaling needs f(0) = 0 (within 1e-12)")
    inverse = None
    if f.inverse is not None:
        inverse = MapDescriptor("rescaled", {"base": f.inverse, "n": int(n)},
                                f.dim_out, f.dim_in, f.inverse.lip_upper, None)
    desc = MapDescriptor("rescaled", {"base": f, "n": int(n)},
                         f.dim_in, f.dim_out, f.lip_upper, inverse)
    if inverse is not None:
        object.__setattr__(inverse, "inverse", desc)
    return desc


def pwl_map(xs, ys) -> MapDescriptor:
    """Piecewise-linear scalar profile R -> R with constant extrapolation."""
    xs = np.asarray(xs, dtype=float).reshape(-1)
    ys = np.asarray(ys, dtype=float).reshape(-1)
    if xs.size != ys.size or xs.size < 2:
        raise GermlabError("pwl needs matching xs/ys with at least two knots")
    if np.any(np.diff(xs) <= 0):
        raise GermlabError("pwl xs must be strictly increasing")
    slopes = np.diff(ys) / np.diff(xs)
    lip = float(np.max(np.abs(slopes))) if slopes.size else 0.0
    return MapDescriptor("pwl", {"xs": xs, "ys": ys}, 1, 1, lip, None)


def expr_map(src: str, dim_in: int, lip_samples: int = 512) -> MapDescriptor:
    """Scalar map from expression text; Lipschitz constant estimated by pair sampling."""
    tree = expr_parse(src)
    free = free_variables(tree)
    if free and max(free) >= dim_in:
        raise GermlabError(
            f"expression uses x{max(free) + 1} but dim_in is {dim_in}")
    desc = MapDescriptor("expr", {"src": src, "dim_in": int(dim_in), "tree": tree},
                         int(dim_in), 1, None, None)
    lip = _sampled_lipschitz(desc, lip_samples)
    return MapDescriptor("expr", desc.params, int(dim_in), 1, lip, None)


def _sampled_lipschitz(desc: MapDescriptor, samples: int) -> float | None:
    pts = ball_points(desc.dim_in, samples, seed=7)
    # near-diagonal pairs catch local slopes, far pairs catch secants
    jitter = ball_points(desc.dim_in, samples, seed=11) * 1e-4
    xs = np.vstack([pts, pts])
    ys = np.vstack([pts[::-1], pts + jitter])
    try:
        fx = eval_map(desc, xs)
        fy = eval_map(desc, ys)
    except EvalDomainError:
        return None
    gaps = row_norms(xs - ys)
    keep = gaps > 0
    vals = row_norms(fx - fy)[keep] / gaps[keep]
    return float(vals.max()) if vals.size else None


def extension_map(points, values, L: float, mode: str) -> MapDescriptor:
    """Extremal L-Lipschitz extension of anchor data, evaluated brute force.

    mode 'inf' gives the lower extension min_a(f(a) + L d(x, a)); 'sup' gives
    max_a(f(a) - L d(x, a)). Vector values extend componentwise, which
    inflates the constant by at most sqrt(dim_out).
    """
    pts = as_point_array(points, name="anchors")
    vals = np.asarray(values, dtype=float)
    if vals.ndim == 1:
        vals = vals.reshape(-1, 1)
    if vals.shape[0] != pts.shape[0]:
        raise GermlabError("anchor points and values must align")
    if mode not in ("inf", "sup"):
        raise GermlabError("extension mode must be 'inf' or 'sup'")
    if not (L > 0):
        raise GermlabError("Lipschitz constant must be positive")
    needed = anchor_lipschitz(pts, vals)
    if L < needed * (1 - 1e-12) - 1e-15:
        raise GermlabError(
            f"anchors violate L-compatibility: need L >= {needed:.6g}, got {L:.6g}")
    lip = float(L * np.sqrt(vals.shape[1]))
    return MapDescriptor("extension",
                         {"points": pts, "values": vals, "L": float(L), "mode": mode},
                         pts.shape[1], vals.shape[1], lip, None)


def anchor_lipschitz(points: np.ndarray, values: np.ndarray) -> float:
    """Smallest L compatible with the anchor data (componentwise, brute force)."""
    pts = as_point_array(points, name="anchors")
    vals = np.asarray(values, dtype=float)
    if vals.ndim == 1:
        vals = vals.reshape(-1, 1)
    if pts.shape[0] < 2:
        return 0.0
    dist = pairwise_distances(pts, pts)
    iu = np.triu_indices(pts.shape[0], k=1)
    gaps = dist[iu]
    if np.any(gaps == 0.0):
        dup = np.argwhere(dist + np.eye(len(pts)) == 0.0)
        raise GermlabError(f"coincident anchor points at indices {tuple(dup[0])}")
    worst = 0.0
    for c in range(vals.shape[1]):
        diffs = np.abs(vals[:, c, None] - vals[None, :, c])[iu]
        worst = max(worst, float(np.max(diffs / gaps)))
    return worst


# ---------------------------------------------------------------------------
# evaluation

def eval_map(f: MapDescriptor, x) -> np.ndarray:
    """Evaluate a descriptor; accepts (n,) or (k, n), returns matching shape."""
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 1
    pts = as_point_array(arr, name="input")
    if pts.shape[1] != f.dim_in:
        raise GermlabError(f"map expects dimension {f.dim_in}, got {pts.shape[1]}")
    out = _EVAL[f.kind](f.params, pts)
    return out[0] if single else out


def _eval_identity(params, x):
    return x.copy()


def _eval_affine(params, x):
    return x @ params["matrix"].T + params["offset"]


def _eval_stack(params, x):
    cols = [eval_map(c, x) for c in params["components"]]
    return np.stack([c.reshape(-1) for c in cols], axis=1)


def _eval_sum(params, x):
    out = eval_map(params["maps"][0], x)
    for f in params["maps"][1:]:
        out = out + eval_map(f, x)
    return out


def _eval_compose(params, x):
    out = x
    for f in reversed(params["maps"]):
        out = eval_map(f, out)
    return out


def _eval_shear_plus(params, x):
    n = params["f"].dim_in
    out = x.copy()
    out[:, n:] += params["sign"] * eval_map(params["f"], x[:, :n])
    return out


def _eval_shear_minus(params, x):
    n = params["f"].dim_in
    out = x.copy()
    out[:, :n] += params["sign"] * eval_map(params["f"], x[:, n:])
    return out


def _eval_rescaled(params, x):
    n = params["n"]
    return n * eval_map(params["base"], x / n)


def _eval_pwl(params, x):
    return np.interp(x[:, 0], params["xs"], params["ys"]).reshape(-1, 1)


def _eval_expr(params, x):
    return expr_evaluate(params["tree"], x).reshape(-1, 1)


def _eval_extension(params, x):
    pts, vals, L = params["points"], params["values"], params["L"]
    dists = pairwise_distances(x, pts)  # (q, k)
    if params["mode"] == "inf":
        out = np.min(vals[None, :, :] + L * dists[:, :, None], axis=1)
    else:
        out = np.max(vals[None, :, :] - L * dists[:, :, None], axis=1)
    # restriction exactness: a zero-distance anchor decides the value bit-for-bit
    hit_rows, hit_cols = np.nonzero(dists == 0.0)
    if hit_rows.size:
        out[hit_rows] = vals[hit_cols]
    return out


_EVAL = {
    "identity": _eval_identity,
    "affine": _eval_affine,
    "stack": _eval_stack,
    "sum": _eval_sum,
    "compose": _eval_compose,
    "shear_plus": _eval_shear_plus,
    "shear_minus": _eval_shear_minus,
    "rescaled": _eval_rescaled,
    "pwl": _eval_pwl,
    "expr": _eval_expr,
    "extension": _eval_extension,
}


def as_linear_matrix(f: MapDescriptor) -> np.ndarray | None:
    """The matrix of f when f is (a composition of) linear maps, else None."""
    if f.kind == "identity":
        return np.eye(f.dim_in)
    if f.kind == "affine":
        if float(np.max(np.abs(f.params["offset"]))) > 0.0:
            return None
        return np.asarray(f.params["matrix"], dtype=float)
    if f.kind == "compose":
        mats = [as_linear_matrix(g) for g in f.params["maps"]]
        if any(m is None for m in mats):
            return None
        out = mats[0]
        for m in mats[1:]:
            out = out @ m
        return out
    return None


# ---------------------------------------------------------------------------
# JSON wire format

def _params_to_json(kind: str, params: dict) -> dict:
    if kind == "identity":
        return {"dim": params["dim"]}
    if kind == "affine":
        return {"matrix": params["matrix"].tolist(), "offset": params["offset"].tolist()}
    if kind == "stack":
        return {"components": [c.to_json_dict() for c in params["components"]]}
    if kind in ("sum", "compose"):
        return {"maps": [m.to_json_dict() for m in params["maps"]]}
    if kind in ("shear_plus", "shear_minus"):
        return {"f": params["f"].to_json_dict(), "sign": params["sign"]}
    if kind == "rescaled":
        return {"base": params["base"].to_json_dict(), "n": params["n"]}
    if kind == "pwl":
        return {"xs": params["xs"].tolist(), "ys": params["ys"].tolist()}
    if kind == "expr":
        return {"src": params["src"], "dim_in": params["dim_in"]}
    if kind == "extension":
        return {"points": params["points"].tolist(),
                "values": params["values"].tolist(),
                "L": params["L"], "mode": params["mode"]}
    raise SchemaError(f"unknown map kind {kind!r}")


def _params_from_json(kind: str, params: dict) -> MapDescriptor:
    if kind == "identity":
        take_fields(params, ("dim",), where="identity params")
        return identity_map(int(params["dim"]))
    if kind == "affine":
        take_fields(params, ("matrix", "offset"), where="affine params")
        return affine_map(params["matrix"], params["offset"])
    if kind == "stack":
        take_fields(params, ("components",), where="stack params")
        return stack_map(*[MapDescriptor.from_json_dict(c) for c in params["components"]])
    if kind == "sum":
        take_fields(params, ("maps",), where="sum params")
        return sum_map(*[MapDescriptor.from_json_dict(m) for m in params["maps"]])
    if kind == "compose":
        take_fields(params, ("maps",), where="compose params")
        return compose_map(*[MapDescriptor.from_json_dict(m) for m in params["maps"]])
    if kind in ("shear_plus", "shear_minus"):
        take_fields(params, ("f", "sign"), where="shear params")
        axis = "plus" if kind == "shear_plus" else "minus"
        desc = shear_map(axis, MapDescriptor.from_json_dict(params["f"]), 1)
        return desc if int(params["sign"]) == 1 else desc.inverse
    if kind == "rescaled":
        take_fields(params, ("base", "n"), where="rescaled params")
        return rescaled_map(MapDescriptor.from_json_dict(params["base"]), int(params["n"]))
    if kind == "pwl":
        take_fields(params, ("xs", "ys"), where="pwl params")
        return pwl_map(params["xs"], params["ys"])
    if kind == "expr":
        take_fields(params, ("src", "dim_in"), where="expr params")
        return expr_map(str(params["src"]), int(params["dim_in"]))
    if kind == "extension":
        take_fields(params, ("points", "values", "L", "mode"), where="extension params")
        return extension_map(params["points"], params["values"],
                             float(params["L"]), str(params["mode"]))
    raise SchemaError(f"unknown map kind {kind!r}")
