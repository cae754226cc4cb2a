"""Arboreal hypersurfaces in R^(N-1) built from a signed forest.

Every forest vertex v_alpha owns one ambient coordinate x_alpha (canonical
order) and one stratum.  In PL mode the stratum is the corner polyhedron

    { x_alpha = 0,  sign * x_beta >= 0  for every chain edge below alpha }.

In smoothed mode the stratum is the zero set of a defining function G built
from the planar profile f by composing it down the chain: the deepest edge
contributes sigma * f(sigma x_parent, sigma x_vertex) and every earlier edge
wraps the result in another sigma * f(sigma x_ancestor, sigma g).  For a
depth-0 vertex G is the bare coordinate.  The recursion as written bottoms
out at the first edge, so that is where we stop; the gradient comes from the
chain rule and inherits the unit-length property of the signed distance f.

For a leafy source the forest is first extended above each marked leaf and
the marked leaves' own strata are suppressed, which is what produces sheets
with free boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
from scipy.spatial import cKDTree

from .errors import DegenerateNormalError, ValidationError
from .profile import SmoothingProfile, make_default_profile
from .trees import (
    LeafyForest,
    SignedForest,
    VertexChain,
    canonical_form,
    chain_to_root,
    leafy_extend,
)

__all__ = [
    "Stratum",
    "ArborealHypersurface",
    "LagrangianModelSample",
    "eval_g",
    "build_pl_strata",
    "build_smoothed",
    "membership",
    "conormal_direction",
    "sample_stratum",
    "sample_boundary_rim",
    "lagrangian_model",
]

DEFAULT_BOX_HALF_WIDTH = 3.0
NEWTON_TOL = 1e-8
NEWTON_MAX_STEPS = 50
MEMBERSHIP_TOL = 1e-6
GRAD_FLOOR = 1e-12


def _canonical_vertex_order(forest: SignedForest) -> list[int]:
    """Vertices in a reproducible order: by component encoding, then depth-first
    with children sorted by (sign, subtree encoding)."""
    order: list[int] = []
    comps = sorted(forest.components, key=lambda t: (canonical_form(t), t.root))
    for t in comps:
        def walk(v: int):
            order.append(v)
            kids = t.children(v)
            kids.sort(key=lambda c: (t.signs[(v, c)], _subtree_encoding(t, c), c))
            for c in kids:
                walk(c)

        walk(t.root)
    return order


def _subtree_encoding(t, v: int) -> str:
    parts = []
    for c in t.children(v):
        s = t.signs[(v, c)]
        parts.append(("+" if s > 0 else "-") + _subtree_encoding(t, c))
    parts.sort()
    return "(" + ",".join(parts) + ")"


# ---------------------------------------------------------------------------
# defining functions
# ---------------------------------------------------------------------------


def _eval_chain(
    chain: VertexChain,
    coord_of: dict[int, int],
    dim: int,
    profile: SmoothingProfile,
    pts: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Value and gradient of the chain's composed defining function."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    m = pts.shape[0]
    ids, signs = chain.vertices, chain.signs
    k = len(signs)
    if k == 0:
        c = coord_of[ids[0]]
        vals = pts[:, c].copy()
        grads = np.zeros((m, dim))
        grads[:, c] = 1.0
        return vals, grads
    # deepest edge first, then wrap downward toward the component root
    g = pts[:, coord_of[ids[k]]].copy()
    dg = np.zeros((m, dim))
    dg[:, coord_of[ids[k]]] = 1.0
    for j in range(k, 0, -1):
        s = float(signs[j - 1])
        a = pts[:, coord_of[ids[j - 1]]]
        fvals, fgrads = profile.evaluate(np.column_stack([s * a, s * g]))
        g = s * fvals
        dg = fgrads[:, 1:2] * dg
        dg[:, coord_of[ids[j - 1]]] += fgrads[:, 0]
    return g, dg


def eval_g(
    forest: SignedForest,
    alpha: int,
    profile: SmoothingProfile,
    point: np.ndarray,
    coord_of: Optional[dict[int, int]] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Defining function G of vertex alpha's smoothed stratum at given points."""
    if coord_of is None:
        order = _canonical_vertex_order(forest)
        coord_of = {v: i for i, v in enumerate(order)}
    chain = chain_to_root(forest, alpha)
    return _eval_chain(chain, coord_of, len(coord_of), profile, point)


# ---------------------------------------------------------------------------
# strata and hypersurfaces
# ---------------------------------------------------------------------------


@dataclass
class Stratum:
    """One co-oriented sheet with corners."""

    owner: int
    chain: VertexChain
    equality_coord: int
    #: (coordinate index, sign): the PL model requires sign * x_coord >= 0
    pl_constraints: list[tuple[int, int]]
    validity_box: np.ndarray
    #: point array -> (values, gradients) of the defining function
    smoothed_eval: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]
    #: per chain edge: point array -> (signed side value, gradient) of the
    #: ancestor sheet; the stratum's valid part has every side value >= 0
    side_functions: list[Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]] = field(
        default_factory=list
    )
    #: owner vertex of each side function's ancestor sheet
    side_owners: list[int] = field(default_factory=list)

    def evaluate(self, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return self.smoothed_eval(np.atleast_2d(np.asarray(pts, dtype=float)))

    def in_box(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        lo, hi = self.validity_box[:, 0], self.validity_box[:, 1]
        return np.all((pts >= lo) & (pts <= hi), axis=1)

    def side_values(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        if not self.side_functions:
            return np.ones((pts.shape[0], 0))
        return np.column_stack([fn(pts)[0] for fn in self.side_functions])


@dataclass
class ArborealHypersurface:
    dim: int
    strata: list[Stratum]
    source: Union[SignedForest, LeafyForest]
    mode: str  # "pl" | "smoothed"
    coord_of: dict[int, int]
    profile: Optional[SmoothingProfile] = None
    suppressed: frozenset[int] = frozenset()

    def stratum(self, owner: int) -> Stratum:
        for s in self.strata:
            if s.owner == owner:
                return s
        raise ValidationError(f"no stratum owned by vertex {owner}")


def _default_box(dim: int, half: float = DEFAULT_BOX_HALF_WIDTH) -> np.ndarray:
    return np.tile(np.array([-half, half]), (dim, 1))


def _pl_eval(coord: int, dim: int):
    def ev(pts: np.ndarray):
        pts = np.atleast_2d(pts)
        vals = pts[:, coord].copy()
        grads = np.zeros((pts.shape[0], dim))
        grads[:, coord] = 1.0
        return vals, grads

    return ev


def _build(
    forest: SignedForest,
    source,
    profile: Optional[SmoothingProfile],
    mode: str,
    suppressed: frozenset[int],
    box_half: float,
) -> ArborealHypersurface:
    order = _canonical_vertex_order(forest)
    coord_of = {v: i for i, v in enumerate(order)}
    dim = len(order)
    strata: list[Stratum] = []
    for v in order:
        if v in suppressed:
            continue
        chain = chain_to_root(forest, v)
        pl = [
            (coord_of[chain.vertices[j]], int(chain.signs[j]))
            for j in range(len(chain.signs))
        ]
        side_owners = [chain.vertices[j] for j in range(len(chain.signs))]
        if mode == "pl":
            ev = _pl_eval(coord_of[v], dim)

            def mk_pl_side(c, s):
                def fn(pts):
                    pts = np.atleast_2d(pts)
                    g = np.zeros((pts.shape[0], dim))
                    g[:, c] = s
                    return s * pts[:, c], g

                return fn

            sides = [mk_pl_side(c, s) for c, s in pl]
        else:
            ev = (
                lambda ch: lambda pts: _eval_chain(ch, coord_of, dim, profile, pts)
            )(chain)
            sides = []
            for j in range(len(chain.signs)):
                prefix = VertexChain(chain.vertices[: j + 1], chain.signs[:j])
                s = float(chain.signs[j])

                def mk_side(pre, sg):
                    def fn(pts):
                        v, g = _eval_chain(pre, coord_of, dim, profile, pts)
                        return sg * v, sg * g

                    return fn

                sides.append(mk_side(prefix, s))
        strata.append(
            Stratum(
                owner=v,
                chain=chain,
                equality_coord=coord_of[v],
                pl_constraints=pl,
                validity_box=_default_box(dim, box_half),
                smoothed_eval=ev,
                side_functions=sides,
                side_owners=side_owners,
            )
        )
    return ArborealHypersurface(
        dim=dim,
        strata=strata,
        source=source,
        mode=mode,
        coord_of=coord_of,
        profile=profile,
        suppressed=suppressed,
    )


def build_pl_strata(
    forest: SignedForest, box_half: float = DEFAULT_BOX_HALF_WIDTH
) -> ArborealHypersurface:
    """Piecewise-linear strata: x_alpha = 0 with the signed chain constraints."""
    return _build(forest, forest, None, "pl", frozenset(), box_half)


def build_smoothed(
    source: Union[SignedForest, LeafyForest],
    profile: Optional[SmoothingProfile] = None,
    box_half: float = DEFAULT_BOX_HALF_WIDTH,
) -> ArborealHypersurface:
    """Smoothed strata {G = 0} co-oriented by grad G.

    Leafy sources are extended above their marked leaves first; the marked
    leaves' strata are suppressed, so the extension strata keep a free
    boundary where the suppressed sheet would have been.
    """
    if profile is None:
        profile = make_default_profile()
    if isinstance(source, LeafyForest):
        forest = leafy_extend(source)
        suppressed = frozenset(source.marked)
    else:
        forest = source
        suppressed = frozenset()
    return _build(forest, source, profile, "smoothed", suppressed, box_half)


# ---------------------------------------------------------------------------
# queries
# ---------------------------------------------------------------------------


def membership(
    h: ArborealHypersurface, point: np.ndarray, tol: float = MEMBERSHIP_TOL
) -> list[tuple[int, float]]:
    """All strata whose defining function vanishes at the point within tol."""
    if tol <= 0:
        raise ValidationError("membership tolerance must be positive")
    point = np.atleast_2d(np.asarray(point, dtype=float))
    out = []
    for s in h.strata:
        vals, _ = s.evaluate(point)
        ok = np.abs(vals[0]) <= tol and bool(s.in_box(point)[0])
        if h.mode == "pl" and ok:
            ok = bool(np.all(s.side_values(point)[0] >= -tol))
        if ok:
            out.append((s.owner, float(vals[0])))
    return out


def conormal_direction(stratum: Stratum, point: np.ndarray, tol: float = MEMBERSHIP_TOL) -> np.ndarray:
    """Unit co-orienting normal grad G / |grad G| at a point on the stratum."""
    point = np.atleast_2d(np.asarray(point, dtype=float))
    vals, grads = stratum.evaluate(point)
    if abs(vals[0]) > tol:
        raise ValidationError("point is not on the stratum")
    n = np.linalg.norm(grads[0])
    if n < GRAD_FLOOR:
        raise DegenerateNormalError("defining gradient below numeric floor")
    return grads[0] / n


def _tangent_frame(normal: np.ndarray) -> np.ndarray:
    """(d-1, d) orthonormal basis of the hyperplane orthogonal to the normal."""
    d = normal.size
    _, _, vt = np.linalg.svd(normal.reshape(1, d))
    return vt[1:]


def _dedupe(points: np.ndarray, radius: float) -> np.ndarray:
    """Greedy thinning at the given radius, deterministic via lexicographic order."""
    if len(points) == 0:
        return np.zeros(0, dtype=int)
    order = np.lexsort(points.T[::-1])
    pts = points[order]
    tree = cKDTree(pts)
    alive = np.ones(len(pts), dtype=bool)
    for i in range(len(pts)):
        if not alive[i]:
            continue
        for j in tree.query_ball_point(pts[i], radius):
            if j > i:
                alive[j] = False
    return order[alive]


def sample_stratum(
    stratum: Stratum,
    spacing: float,
    newton_tol: float = NEWTON_TOL,
    max_steps: int = NEWTON_MAX_STEPS,
) -> tuple[np.ndarray, np.ndarray]:
    """Points on the stratum with orthonormal tangent frames.

    Grid seeds inside the validity box are Newton-projected along the
    defining gradient; converged points are kept if they satisfy the chain's
    side constraints, then thinned to roughly the requested spacing.

    Returns (points, frames) with frames of shape (m, d-1, d).
    """
    if spacing <= 0:
        raise ValidationError("spacing must be positive")
    box = stratum.validity_box
    dim = box.shape[0]
    axes = [np.arange(box[i, 0], box[i, 1] + 1e-9, spacing) for i in range(dim)]
    if any(len(a) == 0 for a in axes):
        return np.zeros((0, dim)), np.zeros((0, max(dim - 1, 0), dim))
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dim)
    vals, _ = stratum.evaluate(grid)
    seeds = grid[np.abs(vals) < 1.2 * spacing * np.sqrt(dim)]
    if len(seeds) == 0:
        return np.zeros((0, dim)), np.zeros((0, max(dim - 1, 0), dim))

    pts = seeds.copy()
    active = np.ones(len(pts), dtype=bool)
    for _ in range(max_steps):
        if not np.any(active):
            break
        v, g = stratum.evaluate(pts[active])
        n2 = np.einsum("ij,ij->i", g, g)
        bad = n2 < GRAD_FLOOR
        stepv = np.zeros_like(g)
        ok = ~bad
        stepv[ok] = (v[ok] / n2[ok])[:, None] * g[ok]
        moved = pts[active] - stepv
        idx = np.flatnonzero(active)
        pts[idx] = moved
        done = (np.abs(v) <= newton_tol) | bad
        active[idx[done]] = False

    v, _ = stratum.evaluate(pts)
    keep = np.abs(v) <= newton_tol
    keep &= stratum.in_box(pts)
    sides = stratum.side_values(pts)
    if sides.shape[1]:
        keep &= np.all(sides >= -1e-9, axis=1)
    pts = pts[keep]
    if len(pts) == 0:
        return np.zeros((0, dim)), np.zeros((0, max(dim - 1, 0), dim))
    sel = _dedupe(pts, spacing / 2.0)
    pts = pts[sel]

    _, grads = stratum.evaluate(pts)
    frames = np.zeros((len(pts), dim - 1, dim))
    for i, gr in enumerate(grads):
        n = np.linalg.norm(gr)
        if n < GRAD_FLOOR:
            continue
        frames[i] = _tangent_frame(gr / n)
    return pts, frames


def sample_boundary_rim(
    stratum: Stratum,
    side_index: int,
    spacing: float,
    newton_tol: float = NEWTON_TOL,
) -> np.ndarray:
    """Points on the stratum's boundary rim against one ancestor sheet.

    The rim is {G = 0, S_j = 0}; since the two sheets are tangent along it,
    the joint Newton system degenerates there.  Instead, points on the sheet
    slide along the tangent-projected gradient of the side function, which
    converges geometrically on the quadratic contact.
    """
    pts, _ = sample_stratum(stratum, spacing)
    if len(pts) == 0:
        return pts
    side_fn = stratum.side_functions[side_index]
    sv, _ = side_fn(pts)
    seeds = pts[np.abs(sv) < 1.5 * spacing]
    if len(seeds) == 0:
        return np.zeros((0, pts.shape[1]))
    x = seeds.copy()
    for _ in range(80):
        # reproject onto the sheet
        for _ in range(3):
            v, g = stratum.evaluate(x)
            n2 = np.einsum("ij,ij->i", g, g)
            n2 = np.where(n2 < GRAD_FLOOR, 1.0, n2)
            x = x - (v / n2)[:, None] * g
        s, ds = side_fn(x)
        if np.max(np.abs(s)) < 1e-9:
            break
        _, g = stratum.evaluate(x)
        gn = g / np.linalg.norm(g, axis=1, keepdims=True)
        dt = ds - np.einsum("ij,ij->i", ds, gn)[:, None] * gn
        m2 = np.einsum("ij,ij->i", dt, dt)
        ok = m2 > 1e-14
        step = np.zeros_like(x)
        step[ok] = (s[ok] / m2[ok])[:, None] * dt[ok]
        nrm = np.linalg.norm(step, axis=1, keepdims=True)
        step = np.where(nrm > 0.2, step / np.maximum(nrm, 1e-300) * 0.2, step)
        x = x - step
    v, _ = stratum.evaluate(x)
    s, _ = side_fn(x)
    keep = (np.abs(v) <= 10 * newton_tol) & (np.abs(s) <= 1e-7)
    keep &= stratum.in_box(x)
    others = stratum.side_values(x)
    if others.shape[1]:
        mask = np.ones(others.shape[1], dtype=bool)
        mask[side_index] = False
        if mask.any():
            keep &= np.all(others[:, mask] >= -1e-9, axis=1)
    x = x[keep]
    if len(x) == 0:
        return x
    return x[_dedupe(x, spacing / 3.0)]


# ---------------------------------------------------------------------------
# Lagrangian model
# ---------------------------------------------------------------------------


@dataclass
class LagrangianModelSample:
    """Labeled cloud in T*R^(N-1): zero section plus positive conormal rays."""

    base_dim: int
    points: np.ndarray  # (m, 2 * base_dim): base coordinates then fiber
    labels: list[str]
    conormals: np.ndarray  # (m, base_dim); zero rows on the zero section

    def split(self, label: str) -> np.ndarray:
        idx = [i for i, l in enumerate(self.labels) if l == label]
        return self.points[idx]


def lagrangian_model(
    h: ArborealHypersurface,
    spacing: float,
    ray_length: float = 2.0,
    base_half_width: float = 2.5,
) -> LagrangianModelSample:
    """Zero-section grid plus a positive conormal ray over every sheet sample."""
    if spacing <= 0:
        raise ValidationError("spacing must be positive")
    d = h.dim
    if d == 0:
        return LagrangianModelSample(0, np.zeros((1, 0)), ["zero-section"], np.zeros((1, 0)))
    axis = np.arange(-base_half_width, base_half_width + 1e-9, spacing)
    grid = np.stack(np.meshgrid(*([axis] * d), indexing="ij"), axis=-1).reshape(-1, d)
    pts = [np.hstack([grid, np.zeros_like(grid)])]
    labels = ["zero-section"] * len(grid)
    conormals = [np.zeros_like(grid)]
    ts = np.arange(spacing, ray_length + 1e-9, spacing)
    for s in h.strata:
        base, _ = sample_stratum(s, spacing)
        if len(base) == 0:
            continue
        inside = np.all(np.abs(base) <= base_half_width, axis=1)
        base = base[inside]
        _, grads = s.evaluate(base)
        norms = np.linalg.norm(grads, axis=1, keepdims=True)
        nu = grads / np.where(norms < GRAD_FLOOR, 1.0, norms)
        fib = ts[None, :, None] * nu[:, None, :]
        ray_pts = np.concatenate(
            [np.repeat(base[:, None, :], len(ts), axis=1), fib], axis=2
        ).reshape(-1, 2 * d)
        pts.append(ray_pts)
        labels.extend([f"conormal-of({s.owner})"] * len(ray_pts))
        conormals.append(np.repeat(nu, len(ts), axis=0))
    return LagrangianModelSample(
        d, np.vstack(pts), labels, np.vstack(conormals)
    )
