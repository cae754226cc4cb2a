"""Decide whether a sampled hypersurface arrangement is (generalized) arboreal.

Everything here runs on point clouds with stored tangent frames and
co-orientations; nothing touches defining functions.  The pipeline:

1. estimate per-point corner codimension on every sheet (one-sidedness of the
   local neighborhood in the stored tangent frame),
2. find attachments: boundary points of one sheet lying on another sheet with
   matching tangent planes; boundary points near no sheet are free boundary,
3. assemble the ancestor poset, check it is a forest of chains, extract cover
   edges, read signs off the co-orientations,
4. check the corner conditions: a codim-k corner must see exactly its k chain
   ancestors (k-1 with one free side for the generalized variant), and
   corners with disjoint tangent chains must not meet when the expected
   intersection dimension is negative,
5. rebuild the signed rooted tree (with marked leaves for free boundaries).

All geometric predicates run with explicit tolerances; sparse data raises the
inconclusive flag instead of guessing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from .errors import InconclusiveError, ValidationError
from .hypersurface import ArborealHypersurface, sample_boundary_rim, sample_stratum
from .trees import SignedRootedTree, canonical_form

__all__ = [
    "SheetSample",
    "Arrangement",
    "GermReport",
    "ClassifierConfig",
    "corner_stratification",
    "tangency_order",
    "check_arboreal",
    "check_generic_union",
    "arrangement_from_hypersurface",
    "four_corner_fixture",
]


@dataclass
class SheetSample:
    """One sampled sheet: points, orthonormal tangent frames, co-orientations."""

    sheet_id: int
    points: np.ndarray  # (m, n)
    frames: np.ndarray  # (m, n-1, n)
    conormals: np.ndarray  # (m, n), unit
    corner_codim: Optional[np.ndarray] = None  # filled by corner_stratification

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def spacing(self) -> float:
        """Coarse sample spacing; robust to locally refined boundary rims."""
        if len(self.points) < 2:
            return np.inf
        tree = cKDTree(self.points)
        d, _ = tree.query(self.points, k=2)
        return float(np.percentile(d[:, 1], 75))


@dataclass
class Arrangement:
    dim: int
    sheets: list[SheetSample]
    #: working box (dim, 2); boundary artifacts at its faces are ignored.
    #: Defaults to the data bounding box when absent.
    box: Optional[np.ndarray] = None

    def __post_init__(self):
        for s in self.sheets:
            if s.dim != self.dim:
                raise ValidationError("sheet dimension mismatch")


@dataclass
class ClassifierConfig:
    contact_dist: float = 5e-3  # boundary point counts as on another sheet below this
    tangent_angle: float = 3e-2  # attachment requires tangent agreement below this
    corner_radius_factor: float = 3.4  # neighborhood radius in units of spacing
    corner_margin: float = 0.3  # empty-halfspace slack, units of the radius
    min_neighbors: int = 3
    min_votes: int = 1  # attachments need this many agreeing boundary points
    third_sheet_clearance: float = 0.15  # pairwise checks stay this far from corners
    box_margin_factor: float = 2.0  # ignore boundary artifacts near the data bbox
    inconclusive_fraction: float = 0.15


@dataclass
class GermReport:
    verdict: str  # "arboreal" | "generalized" | "non_arboreal" | "inconclusive"
    tree: Optional[SignedRootedTree] = None
    marked: frozenset = frozenset()
    sheet_vertex: dict = field(default_factory=dict)
    reasons: list[str] = field(default_factory=list)
    witness: Optional[np.ndarray] = None
    details: dict = field(default_factory=dict)

    @property
    def is_arboreal(self) -> bool:
        return self.verdict in ("arboreal", "generalized")


# ---------------------------------------------------------------------------
# corner stratification
# ---------------------------------------------------------------------------


def corner_stratification(
    sheet: SheetSample, cfg: ClassifierConfig = ClassifierConfig()
) -> np.ndarray:
    """Per-point corner codimension estimate (0 interior, -1 inconclusive).

    A point is in a codim-k corner when its neighborhood, seen in the point's
    tangent frame, leaves k successive empty half-spaces: the offset centroid
    picks the candidate direction and the test is that no neighbor lies
    beyond a margin on the far side.
    """
    pts = sheet.points
    m, n = pts.shape
    sheet_dim = n - 1
    codim = np.zeros(m, dtype=int)
    if sheet_dim == 0 or m < cfg.min_neighbors + 1:
        codim[:] = 0 if sheet_dim == 0 else -1
        sheet.corner_codim = codim
        return codim
    h = sheet.spacing()
    r = cfg.corner_radius_factor * h
    tree = cKDTree(pts)
    neighbors = tree.query_ball_point(pts, r)
    for i in range(m):
        nb = [j for j in neighbors[i] if j != i]
        if len(nb) < cfg.min_neighbors:
            codim[i] = -1
            continue
        rel = pts[nb] - pts[i]
        coords = rel @ sheet.frames[i].T  # (k, sheet_dim)
        k = 0
        work = coords
        for _ in range(sheet_dim):
            mu = work.mean(axis=0)
            nmu = np.linalg.norm(mu)
            if nmu < 1e-12:
                break
            u = mu / nmu
            proj = work @ u
            if proj.min() >= -cfg.corner_margin * r:
                k += 1
                work = work - np.outer(proj, u)
            else:
                break
        codim[i] = k
    sheet.corner_codim = codim
    return codim


# ---------------------------------------------------------------------------
# tangency order
# ---------------------------------------------------------------------------


def _local_cloud(sheet: SheetSample, point: np.ndarray, radius: float):
    tree = cKDTree(sheet.points)
    idx = tree.query_ball_point(point, radius)
    return np.asarray(idx, dtype=int)


def tangency_order(
    sheet_i: SheetSample,
    sheet_j: SheetSample,
    point: np.ndarray,
    tol: float = 3e-2,
    fit_radius: Optional[float] = None,
) -> int:
    """Contact order of two sheets at a common point: 0 transverse, 1 tangent
    planes agree, 2 second fundamental forms agree, capped at 3."""
    point = np.asarray(point, dtype=float)
    if sheet_i is sheet_j:
        raise ValidationError("tangency order of a sheet against itself is degenerate")
    r = fit_radius or 4.0 * max(sheet_i.spacing(), sheet_j.spacing())
    ii = _local_cloud(sheet_i, point, r)
    jj = _local_cloud(sheet_j, point, r)
    if len(ii) < 3 or len(jj) < 3:
        raise InconclusiveError("not enough samples near the point to fit jets")
    ni = sheet_i.conormals[ii[np.argmin(np.linalg.norm(sheet_i.points[ii] - point, axis=1))]]
    nj = sheet_j.conormals[jj[np.argmin(np.linalg.norm(sheet_j.points[jj] - point, axis=1))]]
    ang = np.arccos(min(abs(float(ni @ nj)), 1.0))
    if ang > tol:
        return 0
    # common tangent frame from sheet_i's normal
    n = ni
    _, _, vt = np.linalg.svd(n.reshape(1, -1))
    T = vt[1:]  # (d-1, d)

    def quad_fit(cloud):
        rel = cloud - point
        x = rel @ T.T
        z = rel @ n
        cols = [np.ones(len(x))] + [x[:, a] for a in range(x.shape[1])]
        for a in range(x.shape[1]):
            for b in range(a, x.shape[1]):
                cols.append(x[:, a] * x[:, b])
        A = np.column_stack(cols)
        coef, *_ = np.linalg.lstsq(A, z, rcond=None)
        return coef[1 + x.shape[1]:]

    qi = quad_fit(sheet_i.points[ii])
    qj = quad_fit(sheet_j.points[jj])
    if np.max(np.abs(qi - qj)) > max(tol / r, 0.2):
        return 1
    return 2


# ---------------------------------------------------------------------------
# the main decision procedure
# ---------------------------------------------------------------------------


def _surface_distance(p: np.ndarray, sheet: SheetSample, tree: cKDTree) -> float:
    """Distance from a point to the sheet estimated off the nearest sample."""
    d, j = tree.query(p)
    q = sheet.points[j]
    nu = sheet.conormals[j]
    return max(abs(float((p - q) @ nu)), float(d) - sheet.spacing())


def check_arboreal(
    arr: Arrangement, cfg: ClassifierConfig = ClassifierConfig()
) -> GermReport:
    """Run the arboreality characterization on a sampled arrangement."""
    n = arr.dim
    sheets = arr.sheets
    reasons: list[str] = []
    details: dict = {}
    witness = None

    if len(sheets) == 0:
        tree = SignedRootedTree((0,), 0, (), {})
        return GermReport("arboreal", tree, frozenset(), {}, [], None, {})

    trees_ = [cKDTree(s.points) for s in sheets]
    spacings = [s.spacing() for s in sheets]

    # interior of a unique sheet: reject duplicated sheets outright
    for a in range(len(sheets)):
        for b in range(a + 1, len(sheets)):
            pa, pb = sheets[a], sheets[b]
            d, j = trees_[b].query(pa.points)
            close = d < cfg.contact_dist
            if np.count_nonzero(close) >= 0.5 * len(pa.points) and len(pa.points) > 2:
                par = np.abs(np.einsum("ij,ij->i", pa.conormals[close], pb.conormals[j[close]]))
                if np.median(par) > 0.99:
                    raise ValidationError(
                        f"sheets {pa.sheet_id} and {pb.sheet_id} coincide over their "
                        "interiors; every point must be interior to a unique sheet"
                    )

    # degenerate ambient dimensions: point sheets cannot attach or corner
    if n <= 1 or all(len(s.points) == 1 for s in sheets):
        ids = [s.sheet_id for s in sheets]
        tree, sheet_vertex = _assemble_tree(ids, {}, {}, set())
        return GermReport("arboreal", tree, frozenset(), sheet_vertex, [], None, {})

    for s in sheets:
        corner_stratification(s, cfg)

    if arr.box is not None:
        bbox_lo, bbox_hi = arr.box[:, 0], arr.box[:, 1]
    else:
        all_pts = np.vstack([s.points for s in sheets])
        bbox_lo, bbox_hi = all_pts.min(axis=0), all_pts.max(axis=0)

    def near_bbox(p: np.ndarray, h: float) -> bool:
        m = cfg.box_margin_factor * h
        return bool(np.any(p < bbox_lo + m) or np.any(p > bbox_hi - m))

    # --- attachment detection ------------------------------------------------
    ancestors: dict[int, set[int]] = {i: set() for i in range(len(sheets))}
    att_votes: dict[tuple[int, int], list[np.ndarray]] = {}
    free_boundary: dict[int, list[np.ndarray]] = {i: [] for i in range(len(sheets))}
    inconclusive = False

    for i, si in enumerate(sheets):
        if si.corner_codim is None or len(si.points) < 2:
            continue
        core = np.array([not near_bbox(p, spacings[i]) for p in si.points])
        if np.any(core) and np.mean(si.corner_codim[core] < 0) > cfg.inconclusive_fraction:
            inconclusive = True
        bidx = np.nonzero(si.corner_codim == 1)[0]
        for bi in bidx:
            p = si.points[bi]
            if near_bbox(p, spacings[i]):
                continue
            dists = [
                _surface_distance(p, sheets[j], trees_[j]) if j != i else np.inf
                for j in range(len(sheets))
            ]
            close = [j for j, d in enumerate(dists) if d < cfg.contact_dist]
            nearish = [
                j
                for j, d in enumerate(dists)
                if d < cfg.third_sheet_clearance and j not in close
            ]
            if len(close) == 1 and not nearish:
                j = close[0]
                _, qj = trees_[j].query(p)
                cosang = abs(float(si.conormals[bi] @ sheets[j].conormals[qj]))
                if np.arccos(min(cosang, 1.0)) <= cfg.tangent_angle:
                    att_votes.setdefault((i, j), []).append(p)
                else:
                    reasons.append(
                        f"condition (1): boundary of sheet {si.sheet_id} meets sheet "
                        f"{sheets[j].sheet_id} non-tangentially"
                    )
                    witness = p
            elif not close and not nearish:
                free_boundary[i].append(p)

    for (i, j), pts in att_votes.items():
        if len(pts) >= cfg.min_votes:
            ancestors[i].add(j)

    # transitive closure (attachment data is local; the poset is generated)
    changed = True
    while changed:
        changed = False
        for i in range(len(sheets)):
            for j in list(ancestors[i]):
                extra = ancestors[j] - ancestors[i]
                if extra:
                    ancestors[i] |= extra
                    changed = True

    # a non-tangential boundary meeting is already fatal
    if any(r.startswith("condition (1)") for r in reasons):
        return GermReport("non_arboreal", None, frozenset(), {}, reasons, witness, details)

    # --- chain condition ------------------------------------------------------
    for i in range(len(sheets)):
        anc = sorted(ancestors[i])
        for a in anc:
            for b in anc:
                if a != b and a not in ancestors[b] and b not in ancestors[a]:
                    reasons.append(
                        f"condition (1): sheet {sheets[i].sheet_id} attaches to "
                        f"incomparable sheets {sheets[a].sheet_id} and {sheets[b].sheet_id}"
                    )
                    return GermReport(
                        "non_arboreal", None, frozenset(), {}, reasons, None, details
                    )

    # --- corner counting (condition (1) / (1')) -------------------------------
    marked_sheets: set[int] = set()
    for i, si in enumerate(sheets):
        if si.corner_codim is None:
            continue
        for k in range(2, int(si.corner_codim.max(initial=0)) + 1):
            for bi in np.nonzero(si.corner_codim == k)[0]:
                p = si.points[bi]
                if near_bbox(p, spacings[i]):
                    continue
                close = [
                    j
                    for j in range(len(sheets))
                    if j != i and _surface_distance(p, sheets[j], trees_[j]) < cfg.contact_dist
                ]
                if len(close) == k and all(j in ancestors[i] for j in close):
                    continue
                if len(close) == k - 1 and all(j in ancestors[i] for j in close):
                    marked_sheets.add(i)  # one free side: generalized corner
                    continue
                reasons.append(
                    f"condition (1): codim-{k} corner of sheet {si.sheet_id} sees "
                    f"{len(close)} sheets instead of {k} nested ancestors"
                )
                return GermReport(
                    "non_arboreal", None, frozenset(), {}, reasons, p, details
                )

    if any(free_boundary[i] for i in range(len(sheets))):
        marked_sheets |= {i for i in range(len(sheets)) if free_boundary[i]}

    # --- condition (2): corner loci with disjoint chains must meet in the
    # expected dimension (empty when it is negative) ---------------------------
    corner_clusters = []
    for i, si in enumerate(sheets):
        if si.corner_codim is None:
            continue
        for k in range(1, int(si.corner_codim.max(initial=0)) + 1):
            pts = si.points[si.corner_codim == k]
            pts = pts[[not near_bbox(p, spacings[i]) for p in pts]] if len(pts) else pts
            if len(pts):
                chain_set = frozenset(
                    j
                    for j in range(len(sheets))
                    if j != i
                    and any(
                        _surface_distance(p, sheets[j], trees_[j]) < cfg.contact_dist
                        for p in pts[:: max(1, len(pts) // 8)]
                    )
                )
                corner_clusters.append((i, k, pts, chain_set))
    for a in range(len(corner_clusters)):
        for b in range(a + 1, len(corner_clusters)):
            ia, ka, pa, ca = corner_clusters[a]
            ib, kb, pb, cb = corner_clusters[b]
            if ia == ib:
                continue
            if (ca | {ia}) & (cb | {ib}):
                continue  # tangent chains overlap: condition (2) does not apply
            ta = cKDTree(pa)
            d, _ = ta.query(pb)
            meet = pb[d < max(spacings[ia], spacings[ib])]
            expected = n - ka - kb - 2
            if expected < 0 and len(meet) > 0:
                reasons.append(
                    f"condition (2): codim-{ka} corner of sheet {sheets[ia].sheet_id} and "
                    f"codim-{kb} corner of sheet {sheets[ib].sheet_id} have disjoint "
                    f"tangent chains but intersect (expected dimension {expected} < 0)"
                )
                return GermReport(
                    "non_arboreal", None, frozenset(), {}, reasons, meet[0], details
                )
            if expected >= 0 and len(meet) > 3:
                est_dim = _cloud_dimension(meet, max(spacings[ia], spacings[ib]))
                details[f"condition2_dim({sheets[ia].sheet_id},{sheets[ib].sheet_id})"] = (
                    est_dim,
                    expected,
                )

    # --- signs and tree assembly ----------------------------------------------
    if inconclusive and not att_votes:
        return GermReport(
            "inconclusive",
            None,
            frozenset(),
            {},
            ["sample density too low for corner estimates"],
            None,
            details,
        )

    parents: dict[int, int] = {}
    for i in range(len(sheets)):
        anc = ancestors[i]
        if anc:
            parents[i] = max(anc, key=lambda j: len(ancestors[j]))

    signs: dict[int, int] = {}
    for i, par in parents.items():
        contact = att_votes.get((i, par), [])
        ref = contact if contact else [sheets[i].points.mean(axis=0)]
        samples = []
        for p in ref:
            d, idx = trees_[i].query(p, k=min(24, len(sheets[i].points)))
            idx = np.atleast_1d(idx)
            for q in sheets[i].points[idx]:
                dq, jq = trees_[par].query(q)
                if dq > 10 * cfg.contact_dist:
                    side = float(
                        (q - sheets[par].points[jq]) @ sheets[par].conormals[jq]
                    )
                    samples.append(side)
        if not samples:
            d, jq = trees_[par].query(sheets[i].points)
            far = d > 10 * cfg.contact_dist
            if np.any(far):
                samples = list(
                    np.einsum(
                        "ij,ij->i",
                        sheets[i].points[far] - sheets[par].points[jq[far]],
                        sheets[par].conormals[jq[far]],
                    )
                )
        signs[i] = 1 if np.mean(samples) >= 0 else -1

    ids = [s.sheet_id for s in sheets]
    tree, sheet_vertex = _assemble_tree(ids, parents, signs, marked_sheets)
    marked_ids = frozenset(
        sheet_vertex[ids[i]] for i in marked_sheets
    )
    verdict = "generalized" if marked_sheets else "arboreal"
    return GermReport(verdict, tree, marked_ids, sheet_vertex, reasons, None, details)


def _cloud_dimension(pts: np.ndarray, h: float) -> int:
    """Crude intrinsic dimension of a cluster at resolution h."""
    if len(pts) <= 1:
        return 0
    c = pts - pts.mean(axis=0)
    sv = np.linalg.svd(c, compute_uv=False) / np.sqrt(len(pts))
    return int(np.sum(sv > 1.5 * h))


def _assemble_tree(
    ids: list[int],
    parents: dict[int, int],
    signs: dict[int, int],
    marked_sheets: set[int],
):
    """Build the recovered signed rooted tree.

    Sheets become vertices under a fresh root; a sheet with a free boundary
    stands for the extension sheet of a suppressed marked leaf, so it is
    replaced by a marked leaf at its position in the chain.
    """
    root = 0
    vid = {i: k + 1 for k, i in enumerate(range(len(ids)))}
    vertices = [root] + [vid[i] for i in range(len(ids))]
    edges = []
    smap = {}
    for i in range(len(ids)):
        if i in parents:
            p = vid[parents[i]]
            edges.append((p, vid[i]))
            smap[(p, vid[i])] = signs.get(i, 1)
        else:
            edges.append((root, vid[i]))
    tree = SignedRootedTree(tuple(vertices), root, tuple(edges), smap)
    sheet_vertex = {ids[i]: vid[i] for i in range(len(ids))}
    return tree, sheet_vertex


# ---------------------------------------------------------------------------
# arrangements from built hypersurfaces, unions, fixtures
# ---------------------------------------------------------------------------


def arrangement_from_hypersurface(
    h: ArborealHypersurface, spacing: float = 0.22
) -> Arrangement:
    """Sample every stratum, refine its boundary rims, and cross-seed each rim
    point into the ancestor sheet it lies on (with the ancestor's exact frame),
    so attachments are represented by co-located samples on both sheets.

    Rim and cross-seeded points take priority over interior samples when the
    clouds are thinned, so the attachment geometry is never pruned away.
    """
    interior: dict[int, np.ndarray] = {}
    protected: dict[int, list[np.ndarray]] = {s.owner: [] for s in h.strata}
    for s in h.strata:
        pts, _ = sample_stratum(s, spacing)
        interior[s.owner] = pts
        for side_index, anc in enumerate(s.side_owners):
            rim = sample_boundary_rim(s, side_index, spacing)
            if len(rim) == 0:
                continue
            protected[s.owner].append(rim)
            if anc in protected:
                protected[anc].append(rim)
    sheets = []
    for s in h.strata:
        prot = (
            np.vstack(protected[s.owner])
            if protected[s.owner]
            else np.zeros((0, h.dim))
        )
        base = interior.get(s.owner, np.zeros((0, h.dim)))
        if len(prot) and len(base):
            d, _ = cKDTree(prot).query(base)
            base = base[d > spacing / 3.0]
        pts = np.vstack([prot, base]) if len(prot) else base
        if len(pts) == 0:
            continue
        _, grads = s.evaluate(pts)
        norms = np.linalg.norm(grads, axis=1, keepdims=True)
        nu = grads / np.where(norms == 0, 1.0, norms)
        frames = np.zeros((len(pts), h.dim - 1, h.dim))
        for i, g in enumerate(nu):
            _, _, vt = np.linalg.svd(g.reshape(1, -1))
            frames[i] = vt[1:]
        sheets.append(SheetSample(s.owner, pts, frames, nu))
    box = h.strata[0].validity_box.copy() if h.strata else None
    return Arrangement(h.dim, sheets, box)


def check_generic_union(
    h1: ArborealHypersurface,
    h2: ArborealHypersurface,
    offset: np.ndarray,
    tol: float = 5e-3,
    spacing: float = 0.22,
    cfg: Optional[ClassifierConfig] = None,
) -> GermReport:
    """Translate the second hypersurface and classify the union."""
    offset = np.asarray(offset, dtype=float)
    if h1.dim != h2.dim:
        raise ValidationError("hypersurfaces live in different ambient dimensions")
    if np.linalg.norm(offset) > 0.2 + 1e-12:
        raise ValidationError("offsets above 0.2 are outside the supported regime")
    a1 = arrangement_from_hypersurface(h1, spacing)
    a2 = arrangement_from_hypersurface(h2, spacing)
    base = max((s.sheet_id for s in a1.sheets), default=0) + 1
    moved = [
        SheetSample(base + k, s.points + offset, s.frames, s.conormals)
        for k, s in enumerate(a2.sheets)
    ]
    cfg = cfg or ClassifierConfig(contact_dist=max(tol, 5e-3))
    return check_arboreal(Arrangement(h1.dim, a1.sheets + moved), cfg)


def four_corner_fixture(dim: int = 2, spacing: float = 0.1, extent: float = 1.0) -> Arrangement:
    """Four half-hyperplane sheets sharing one codim-2 locus.

    This is the product-style degenerate configuration: the sheets pair up
    into two coplanar couples, so opposite corners have disjoint tangent
    chains yet all meet along the same codim-2 set, which condition (2)
    forbids.  In dim 2 the sheets are four half-lines from the origin.
    """
    if dim < 2:
        raise ValidationError("fixture needs ambient dimension >= 2")
    t = np.arange(spacing, extent + 1e-9, spacing)
    rest = (
        [np.arange(-extent, extent + 1e-9, spacing)] * (dim - 2) if dim > 2 else []
    )
    sheets = []
    specs = [
        (0, +1, np.eye(dim)[1]),  # {x=0, y>=0}, co-oriented by e_x
        (0, -1, np.eye(dim)[1]),
        (1, +1, np.eye(dim)[0]),  # {y=0, x>=0}, co-oriented by e_y
        (1, -1, np.eye(dim)[0]),
    ]
    for sid, (axis, sgn, _) in enumerate(specs):
        other = 1 - axis
        cols = [t * sgn if k == other else np.zeros_like(t) for k in range(2)]
        base = np.column_stack(cols[:2])
        grids = [base[:, 0], base[:, 1], *[np.zeros(1)] * 0]
        if dim > 2:
            mesh = np.meshgrid(np.arange(len(t)), *[np.arange(len(r)) for r in rest], indexing="ij")
            pts = np.zeros((mesh[0].size, dim))
            pts[:, other] = (t * sgn)[mesh[0].ravel()]
            for k, r in enumerate(rest):
                pts[:, 2 + k] = r[mesh[1 + k].ravel()]
        else:
            pts = base
        nu = np.zeros((len(pts), dim))
        nu[:, axis] = 1.0
        frames = np.zeros((len(pts), dim - 1, dim))
        tangent_axes = [k for k in range(dim) if k != axis]
        for row, k in enumerate(tangent_axes):
            frames[:, row, k] = 1.0
        sheets.append(SheetSample(sid, pts, frames, nu))
    return Arrangement(dim, sheets)
