"""Smooth steps, windows, and bumps that are flat to all orders at their ends.

Everything here is vectorized over numpy arrays and exposes analytic first
derivatives; higher derivatives are never needed in closed form (field
Jacobians are taken by finite differences downstream).
"""

from __future__ import annotations

import numpy as np

__all__ = ["step", "dstep", "Window"]


def _bexp(t: np.ndarray, kappa: float) -> np.ndarray:
    """exp(-kappa/t) for t > 0, zero otherwise (flat to all orders at 0)."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-kappa / t[pos])
    return out


def step(u, kappa: float = 1.0):
    """Monotone smooth step: 0 for u <= 0, 1 for u >= 1, flat at both ends."""
    u = np.asarray(u, dtype=float)
    b0 = _bexp(u, kappa)
    b1 = _bexp(1.0 - u, kappa)
    den = b0 + b1
    # den vanishes only where both branches are flat-zero, i.e. nowhere in (0,1).
    safe = den > 0
    out = np.where(u >= 1.0, 1.0, 0.0)
    out = np.where(safe, np.divide(b0, den, out=np.zeros_like(den), where=safe), out)
    out[u <= 0.0] = 0.0
    out[u >= 1.0] = 1.0
    return out


def dstep(u, kappa: float = 1.0):
    """Derivative of :func:`step`."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    mid = (u > 0.0) & (u < 1.0)
    if np.any(mid):
        um = u[mid]
        b0 = np.exp(-kappa / um)
        b1 = np.exp(-kappa / (1.0 - um))
        db0 = b0 * kappa / um**2
        db1 = b1 * kappa / (1.0 - um) ** 2
        den = b0 + b1
        out[mid] = (db0 * b1 + b0 * db1) / den**2
    return out


class Window:
    """Plateau window: 1 on [b, c], 0 outside (a, d), smooth monotone flanks.

    Degenerate flanks (a == b or c == d) produce a hard half-open edge and are
    not used by the library; both flanks are required to have positive width.
    """

    def __init__(self, a: float, b: float, c: float, d: float, kappa: float = 1.0):
        if not (a < b <= c < d):
            raise ValueError(f"window breakpoints must satisfy a<b<=c<d, got {(a, b, c, d)}")
        self.a, self.b, self.c, self.d = float(a), float(b), float(c), float(d)
        self.kappa = float(kappa)

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        lo = step((y - self.a) / (self.b - self.a), self.kappa)
        hi = step((self.d - y) / (self.d - self.c), self.kappa)
        return lo * hi

    def deriv(self, y):
        y = np.asarray(y, dtype=float)
        wa, wd = self.b - self.a, self.d - self.c
        lo = step((y - self.a) / wa, self.kappa)
        hi = step((self.d - y) / wd, self.kappa)
        dlo = dstep((y - self.a) / wa, self.kappa) / wa
        dhi = -dstep((self.d - y) / wd, self.kappa) / wd
        return dlo * hi + lo * dhi

    def support(self) -> tuple[float, float]:
        return (self.a, self.d)

    def __repr__(self):  # pragma: no cover
        return f"Window({self.a}, {self.b}, {self.c}, {self.d})"
