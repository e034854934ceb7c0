"""Domain descriptions: rectangles, disks and annuli."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import GeometryError


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or not self.lo < self.hi:
            raise GeometryError(f"interval needs lo < hi, got [{self.lo}, {self.hi}]")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def half(self) -> float:
        return 0.5 * (self.hi - self.lo)


@dataclass(frozen=True)
class Rectangle:
    x: Interval
    y: Interval

    kind = "rectangle"
    polar = False
    components = ("left", "right", "bottom", "top")

    @classmethod
    def from_bounds(cls, a, b, c, d) -> "Rectangle":
        return cls(Interval(float(a), float(b)), Interval(float(c), float(d)))

    @property
    def area(self) -> float:
        return self.x.length * self.y.length

    @property
    def perimeter(self) -> float:
        return 2.0 * (self.x.length + self.y.length)

    def contains(self, x, y, tol=1e-12) -> bool:
        sx = tol * max(1.0, abs(self.x.lo), abs(self.x.hi))
        sy = tol * max(1.0, abs(self.y.lo), abs(self.y.hi))
        return (self.x.lo - sx <= x <= self.x.hi + sx) and (self.y.lo - sy <= y <= self.y.hi + sy)


@dataclass(frozen=True)
class Disk:
    radius: float = 1.0

    kind = "disk"
    polar = True
    components = ("rim",)

    def __post_init__(self):
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise GeometryError(f"disk radius must be positive, got {self.radius}")

    @property
    def area(self) -> float:
        return math.pi * self.radius**2

    @property
    def perimeter(self) -> float:
        return 2.0 * math.pi * self.radius

    def ring_radius(self, component: str) -> float:
        return self.radius

    def contains(self, x, y, tol=1e-12) -> bool:
        return math.hypot(x, y) <= self.radius * (1.0 + tol)


@dataclass(frozen=True)
class Annulus:
    a: float
    b: float

    kind = "annulus"
    polar = True
    components = ("inner", "outer")

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a > 0):
            raise GeometryError(f"annulus inner radius must be positive, got {self.a}")
        if not (math.isfinite(self.b) and self.b > self.a):
            raise GeometryError(f"annulus needs a < b, got a={self.a}, b={self.b}")

    @property
    def area(self) -> float:
        return math.pi * (self.b**2 - self.a**2)

    @property
    def perimeter(self) -> float:
        return 2.0 * math.pi * (self.a + self.b)

    def ring_radius(self, component: str) -> float:
        return self.a if component == "inner" else self.b

    def contains(self, x, y, tol=1e-12) -> bool:
        r = math.hypot(x, y)
        return self.a * (1.0 - tol) <= r <= self.b * (1.0 + tol)


Domain = Rectangle | Disk | Annulus
