"""The planar smoothing profile f(a, b) used to bend hypersurface strata.

The zero set of f is a single embedded curve built in three pieces:

* a flat ray along ``{b = 0, a >= 1}``,
* a turn, integrated from a tangent-angle profile and scaled so that it ends
  exactly on ``{a = 0}`` with a vertical tangent, and
* an outgoing arc that bends into ``{a < 0}`` and leaves as a straight ray,
  so the curve meets ``{a = 0}`` at exactly one point.

The turn has three zones.  Both ends carry a cubic-contact taper capped by a
step that is flat to all orders: near the flat ray the tangent angle grows
like ``(s / l_heel)^3`` up to a small handover angle, and near the crossing
the angle measured from vertical decays the same way.  A single smooth step
covers the middle.  The cubic contact is what drives the attachment angle at
distance ``1e-3`` from either end's target line below ``1e-2`` radians (a
pure exponential-step profile saturates around ``2e-2``); the flat caps keep
the contacts C-infinity.  Both ends matter: deeper strata of a composed
hypersurface attach to their parent sheet along the heel, not the crossing.

f itself is the signed distance to this curve, positive on the side reached
from ``{b > 0, a >= 1}`` (the right-hand side of the traversal from large
``a``).  On the flat ray this gives f(a, b) = b exactly.  Beyond the reach of
the curve (|f| well above ``tolerance``) the min-distance extension changes
sign across the medial set; every contract holds in the band
``|f| < tolerance``.
"""

from __future__ import annotations

import os

import numpy as np
from scipy.spatial import cKDTree

from .errors import ValidationError
from .smoothing import step

__all__ = ["SmoothingProfile", "make_default_profile"]

_THETA_HAND = 0.006  # taper handover angle at both ends of the turn
_L_HEEL = 0.75  # pre-scale arclength of the heel taper
_L_CROSS = 0.75  # pre-scale arclength of the crossing taper
_L_MAIN = 0.62  # pre-scale arclength of the middle step
_TAU_FLAT = 5e-4  # all-orders-flat caps at both contacts
_EXT_TURN = np.pi / 4  # how far past vertical the outgoing arc rotates
_EXT_LEN = 1.0  # pre-scale arclength of the outgoing arc
_GRID = 16000  # integration subintervals per arc piece (even)


def _cumulative_simpson(y: np.ndarray, h: float) -> np.ndarray:
    """Cumulative integral at every node of a uniformly sampled integrand."""
    n = y.size
    out = np.zeros(n)
    pair = (h / 3.0) * (y[0:-2:2] + 4.0 * y[1::2] + y[2::2])
    out[2::2] = np.cumsum(pair)
    out[1::2] = out[0:-2:2] + (h / 12.0) * (5.0 * y[0:-2:2] + 8.0 * y[1::2] - y[2::2])
    return out


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("ARBOREAL_THREADS", "1")))
    except ValueError:
        return 1


class SmoothingProfile:
    """Signed-distance profile with analytic rays and a tabulated turn."""

    def __init__(self, sharpness: float = 1.0):
        if not 0.0 < sharpness <= 10.0:
            raise ValidationError("transition_sharpness must lie in (0, 10]")
        self.sharpness = float(sharpness)
        #: |f| below this is the certified submersion band around the zero set
        self.tolerance = 0.12

        taper_scale = self.sharpness ** (-1.0 / 3.0)
        l_heel = _L_HEEL * taper_scale
        l_cross = _L_CROSS * taper_scale
        s_c = l_heel + _L_MAIN + l_cross

        def tangent_angle(s: np.ndarray) -> np.ndarray:
            s = np.asarray(s, dtype=float)
            tau = s_c - s
            heel = _THETA_HAND * np.minimum(s / l_heel, 1.0) ** 3 * step(s / _TAU_FLAT)
            mid = (0.5 * np.pi - 2.0 * _THETA_HAND) * step((s - l_heel) / _L_MAIN)
            crossing = _THETA_HAND * (
                1.0 - np.minimum(tau / l_cross, 1.0) ** 3 * step(tau / _TAU_FLAT)
            ) * (tau <= l_cross)
            return heel + mid + crossing

        m = _GRID
        h = s_c / m
        s = np.linspace(0.0, s_c, m + 1)
        psi = tangent_angle(s)
        cumc = _cumulative_simpson(np.cos(psi), h)
        cums = _cumulative_simpson(np.sin(psi), h)
        lam = 1.0 / cumc[-1]  # scales the turn's horizontal extent to exactly 1
        self.turn_length = lam * s_c
        ax = 1.0 - lam * cumc
        bx = lam * cums
        ax[-1] = 0.0  # exact by construction; clamp the quadrature dust
        self.crossing_point = np.array([0.0, bx[-1]])

        # outgoing arc: psi from pi/2 down to pi/2 - _EXT_TURN
        u = np.linspace(0.0, 1.0, m + 1)
        psi2 = 0.5 * np.pi - _EXT_TURN * step(u)
        cumc2 = _cumulative_simpson(np.cos(psi2), 1.0 / m)
        cums2 = _cumulative_simpson(np.sin(psi2), 1.0 / m)
        ext_len = lam * _EXT_LEN
        ax2 = ax[-1] - ext_len * cumc2
        bx2 = bx[-1] + ext_len * cums2

        self._s = np.concatenate([lam * s, self.turn_length + ext_len * u[1:]])
        self._pts = np.column_stack(
            [np.concatenate([ax, ax2[1:]]), np.concatenate([bx, bx2[1:]])]
        )
        psis = np.concatenate([psi, psi2[1:]])
        # traversal direction (-cos psi, sin psi); right-hand normal (sin, cos)
        self._tans = np.column_stack([-np.cos(psis), np.sin(psis)])
        self._norms = np.column_stack([np.sin(psis), np.cos(psis)])
        self._tree = cKDTree(self._pts)
        self._end_pt = self._pts[-1]
        self._end_dir = self._tans[-1]

    # -- zero curve ---------------------------------------------------------
    def zero_curve(self) -> dict:
        """Arclength-parametrized polyline of {f = 0} with tangents/normals.

        s = 0 is the start of the turn at (1, 0); the flat ray continues to
        s < 0 and the outgoing ray past the end of the table.
        """
        return {
            "s": self._s.copy(),
            "points": self._pts.copy(),
            "tangents": self._tans.copy(),
            "normals": self._norms.copy(),
        }

    @property
    def crossing_tangent(self) -> np.ndarray:
        i = int(np.argmin(np.abs(self._s - self.turn_length)))
        return self._tans[i].copy()

    # -- evaluation ---------------------------------------------------------
    def evaluate(self, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Signed distance and gradient at an (m, 2) array of (a, b) points."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        m = pts.shape[0]

        # candidate 1: flat ray {(a, 0) : a >= 1}
        cp1 = np.column_stack([np.maximum(pts[:, 0], 1.0), np.zeros(m)])
        n1 = np.tile(np.array([0.0, 1.0]), (m, 1))

        # candidate 2: outgoing ray
        rel = pts - self._end_pt
        t2 = np.maximum(rel @ self._end_dir, 0.0)
        cp2 = self._end_pt + t2[:, None] * self._end_dir
        n2 = np.tile(np.array([self._end_dir[1], -self._end_dir[0]]), (m, 1))

        # candidate 3: tabulated arc, projected onto segments at the nearest node
        _, idx = self._tree.query(pts, k=1, workers=_workers())
        cp3 = np.empty_like(pts)
        n3 = np.empty_like(pts)
        best = np.full(m, np.inf)
        for off in (-1, 0):
            i0 = np.clip(idx + off, 0, len(self._pts) - 2)
            p0 = self._pts[i0]
            seg = self._pts[i0 + 1] - p0
            seglen2 = np.einsum("ij,ij->i", seg, seg)
            t = np.clip(np.einsum("ij,ij->i", pts - p0, seg) / seglen2, 0.0, 1.0)
            cand = p0 + t[:, None] * seg
            d = np.linalg.norm(pts - cand, axis=1)
            upd = d < best
            best[upd] = d[upd]
            cp3[upd] = cand[upd]
            nn = self._norms[i0] + t[:, None] * (self._norms[i0 + 1] - self._norms[i0])
            nn /= np.linalg.norm(nn, axis=1, keepdims=True)
            n3[upd] = nn[upd]

        d1 = np.linalg.norm(pts - cp1, axis=1)
        d2 = np.linalg.norm(pts - cp2, axis=1)
        dists = np.stack([d1, d2, best], axis=1)
        cps = np.stack([cp1, cp2, cp3], axis=1)
        ns = np.stack([n1, n2, n3], axis=1)
        pick = np.argmin(dists, axis=1)
        rows = np.arange(m)
        cp = cps[rows, pick]
        nrm = ns[rows, pick]
        dist = dists[rows, pick]

        w = pts - cp
        side = np.einsum("ij,ij->i", w, nrm)
        sign = np.where(side >= 0.0, 1.0, -1.0)
        vals = sign * dist
        safe = np.where(dist[:, None] == 0.0, 1.0, dist[:, None])
        grads = np.where(dist[:, None] > 1e-12, w / safe * sign[:, None], nrm)
        return vals, grads


def make_default_profile(transition_sharpness: float = 1.0) -> SmoothingProfile:
    """Build the standard profile; sharpness tightens the cubic taper."""
    return SmoothingProfile(transition_sharpness)
