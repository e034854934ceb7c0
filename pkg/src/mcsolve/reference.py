"""Closed-form solutions and brute-force checks used to validate the solver.

Nothing here touches the collocation operators except
``frechet_fd_check``, which exists to test them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.optimize

from .errors import MCSolveError


class ExistenceError(MCSolveError, ValueError):
    """No graph solution exists for the requested parameters."""


def scherk(x, y):
    """Scherk's surface log(cos x / cos y), a minimal graph on |x|, |y| < pi/2."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(np.abs(x) >= math.pi / 2) or np.any(np.abs(y) >= math.pi / 2):
        raise ExistenceError("Scherk's surface is only a graph over |x|, |y| < pi/2")
    out = np.log(np.cos(x) / np.cos(y))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class RadialProfile:
    """Height as a function of radius with its first two derivatives."""

    func: Callable[[np.ndarray], np.ndarray]
    lo: float
    hi: float
    d1: Callable[[np.ndarray], np.ndarray]
    d2: Callable[[np.ndarray], np.ndarray]
    params: dict = field(default_factory=dict)

    def _check(self, r):
        r = np.asarray(r, dtype=float)
        tol = 1e-12 * max(1.0, self.hi)
        if np.any(r < self.lo - tol) or np.any(r > self.hi + tol):
            raise ValueError(f"radius outside [{self.lo}, {self.hi}]")
        return np.clip(r, self.lo, self.hi)

    def __call__(self, r):
        return self.func(self._check(r))

    def slope(self, r):
        return self.d1(self._check(r))

    def curvature(self, r):
        return self.d2(self._check(r))


def _catenoid_height(c: float, a: float, b: float) -> float:
    return c * (math.acosh(b / c) - math.acosh(a / c))


def catenoid_profile(a: float, b: float, h: float, rtol: float = 1e-12) -> RadialProfile:
    """Catenoid graph over a < r < b with height h at r = a and 0 at r = b.

    The profile is z(r) = c * (arccosh(b/c) - arccosh(r/c)) with the neck
    radius c <= a found by Brent's method (negative h is reflected).
    """
    if not 0 < a < b:
        raise ValueError("catenoid needs 0 < a < b")
    if h == 0:
        zero = lambda r: np.zeros_like(np.asarray(r, dtype=float))
        return RadialProfile(zero, a, b, zero, zero, {"c": math.inf, "d": 0.0, "sign": 0.0})
    sign = 1.0 if h > 0 else -1.0
    target = abs(h)
    h_max = _catenoid_height(a, a, b)
    if target > h_max:
        raise ExistenceError(f"height {h} exceeds the largest catenoid graph height {h_max:.10g}")
    lo = a * 1e-12
    if not _catenoid_height(lo, a, b) < target <= h_max:
        raise ExistenceError("root bracket does not straddle the requested height")
    c = a if target == h_max else scipy.optimize.brentq(
        lambda c: _catenoid_height(c, a, b) - target, lo, a, xtol=rtol * a * 1e-2, rtol=4 * np.finfo(float).eps
    )
    d = c * math.acosh(b / c)

    def z(r):
        return sign * (d - c * np.arccosh(r / c))

    def dz(r):
        return -sign * c / np.sqrt(r**2 - c**2)

    def d2z(r):
        return sign * c * r / (r**2 - c**2) ** 1.5

    return RadialProfile(z, a, b, dz, d2z, {"c": c, "d": d, "sign": sign})


def spherical_cap(gamma: float, radius: float = 1.0, h0: float = 1.0) -> RadialProfile:
    """Zero-gravity capillary surface in a disk with constant contact angle.

    A spherical cap of radius R / |cos gamma| whose height on the rim is h0;
    its mean curvature is 2H = 2 cos(gamma) / R.
    """
    if not 0.0 <= gamma <= math.pi:
        raise ValueError("contact angle must lie in [0, pi]")
    c = math.cos(gamma)
    two_h = 2.0 * c / radius
    if abs(c) < 1e-15:
        flat = lambda r: np.full_like(np.asarray(r, dtype=float), h0)
        zero = lambda r: np.zeros_like(np.asarray(r, dtype=float))
        return RadialProfile(flat, 0.0, radius, zero, zero, {"two_h": 0.0, "sphere_radius": math.inf})
    s = math.copysign(1.0, c)
    rc = radius / abs(c)
    top = h0 + s * math.sqrt(rc**2 - radius**2)

    def u(r):
        return top - s * np.sqrt(rc**2 - r**2)

    def du(r):
        return s * r / np.sqrt(rc**2 - r**2)

    def d2u(r):
        return s * rc**2 / (rc**2 - r**2) ** 1.5

    return RadialProfile(u, 0.0, radius, du, d2u, {"two_h": two_h, "sphere_radius": rc, "center_height": top})


def frechet_fd_check(spec, derivs, v, w, h: float = 1e-5) -> float:
    """Relative sup-norm gap between a central difference of N and L(v) w."""
    from .operators import frechet, residual

    v = np.asarray(getattr(v, "values", v), dtype=float)
    w = np.asarray(getattr(w, "values", w), dtype=float)
    fd = (residual(spec, derivs, v + h * w) - residual(spec, derivs, v - h * w)) / (2.0 * h)
    Lw = frechet(spec, derivs, v) @ w
    return float(np.max(np.abs(fd - Lw)) / (np.max(np.abs(Lw)) + 1e-14))
