"""Disks, catenoids and Y-catenoids spanning two coaxial circles.

Two circles of radius ``R`` at heights ``+-d`` bound a pair of flat disks,
up to two catenoids ``r = c cosh(x3 / c)`` and up to two Y-catenoids: two
catenoidal sheets ``r = lam cosh(|x3| / lam + h0)`` glued along a circle to
the horizontal disk of radius ``lam cosh(h0) = 2 lam / sqrt(3)``.  The
constant ``h0 = log(3)/2`` makes the sheets meet the disk at 120 degrees.

Roots are located by golden-section search for the minimum of the shape
function followed by bisection on either side, in the variable
``u = d / scale``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

H0 = 0.5 * math.log(3.0)
DISK_FACTOR = 2.0 / math.sqrt(3.0)  # cosh(H0)
TANGENCY_TOL = 1e-8
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class DiskPair:
    R: float
    d: float

    kind = "disk_pair"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "R": self.R, "d": self.d}


@dataclass(frozen=True)
class CatenoidSolution:
    c: float
    d: float
    R: float
    branch: str  # "fat" | "skinny"

    kind = "catenoid"

    def radius(self, x3):
        return self.c * np.cosh(np.asarray(x3) / self.c)

    @property
    def residual(self) -> float:
        return abs(self.R - self.c * math.cosh(self.d / self.c))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "c": self.c, "branch": self.branch, "residual": self.residual}


@dataclass(frozen=True)
class YCatenoidSolution:
    lam: float
    d: float
    R: float
    branch: str
    h0: float = H0

    kind = "y_catenoid"

    @property
    def disk_radius(self) -> float:
        return self.lam * math.cosh(self.h0)

    def radius(self, x3):
        return self.lam * np.cosh(np.abs(np.asarray(x3)) / self.lam + self.h0)

    @property
    def residual(self) -> float:
        return abs(self.R - self.lam * math.cosh(self.d / self.lam + self.h0))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "lambda": self.lam,
            "h0": self.h0,
            "disk_radius": self.disk_radius,
            "branch": self.branch,
            "residual": self.residual,
        }


@dataclass
class SpanningCensus:
    R: float
    d: float
    entries: list = field(default_factory=list)
    at_catenoid_tangency: bool = False
    at_ycatenoid_tangency: bool = False

    @property
    def catenoids(self) -> list[CatenoidSolution]:
        return [e for e in self.entries if isinstance(e, CatenoidSolution)]

    @property
    def y_catenoids(self) -> list[YCatenoidSolution]:
        return [e for e in self.entries if isinstance(e, YCatenoidSolution)]

    def to_dict(self) -> dict:
        return {
            "R": self.R,
            "d": self.d,
            "entries": [e.to_dict() for e in self.entries],
            "at_catenoid_tangency": self.at_catenoid_tangency,
            "at_ycatenoid_tangency": self.at_ycatenoid_tangency,
        }


# -- scalar root machinery ---------------------------------------------------


def golden_section_min(f, lo: float, hi: float, tol: float = 1e-12, max_iter: int = 500):
    """Minimiser of a unimodal ``f`` on ``[lo, hi]``."""
    a, b = lo, hi
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if b - a <= tol * max(1.0, abs(a) + abs(b)):
            break
        if f1 < f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
    x = 0.5 * (a + b)
    return x, f(x)


def bisect(f, lo: float, hi: float, max_iter: int = 400) -> float:
    """Root of ``f`` in ``[lo, hi]`` given a sign change, to machine precision."""
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ValueError("bisect: no sign change on bracket")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _shape(u: float, d: float, shift: float) -> float:
    """Boundary radius reached by the profile with neck scale d/u."""
    return d * math.cosh(u + shift) / u


def _min_u(shift: float) -> float:
    # minimiser of cosh(u + shift)/u solves u * tanh(u + shift) = 1
    return bisect(lambda u: u * math.tanh(u + shift) - 1.0, 1e-6, 50.0)


def critical_ratio(shift: float = 0.0) -> float:
    """Largest d/R admitting a solution; ``shift=0`` catenoid, ``shift=H0`` Y-catenoid."""
    u = _min_u(shift)
    return u / math.cosh(u + shift)


def _solve(R: float, d: float, shift: float):
    if not (R > 0 and d > 0):
        raise ValueError("R and d must be positive")
    g = lambda u: _shape(u, d, shift)  # noqa: E731
    # golden-section on a log-spaced bracket of the unimodal shape function
    logu, _ = golden_section_min(lambda s: g(math.exp(s)), math.log(1e-4), math.log(60.0), tol=1e-14)
    u_star = math.exp(logu)
    g_min = g(u_star)
    gap = g_min - R
    tangent = abs(gap) <= TANGENCY_TOL * R
    if gap > 0 and not tangent:
        return [], False
    if tangent and gap >= 0:
        return [(u_star, "fat")], True
    h = lambda u: g(u) - R  # noqa: E731
    lo = u_star
    while h(lo) < 0:
        lo *= 0.5
    hi = u_star
    while h(hi) < 0:
        hi = hi * 2.0 if hi < 1.0 else hi + 1.0
        if hi > 700:
            break
    u_fat = bisect(h, lo, u_star)
    if tangent:
        return [(u_fat, "fat")], True
    u_skinny = bisect(h, u_star, hi)
    # ascending in scale: skinny (large u) first
    return [(u_skinny, "skinny"), (u_fat, "fat")], False


def solve_catenoid(R: float, d: float) -> list[CatenoidSolution]:
    """Neck radii ``c`` with ``R = c cosh(d/c)``, ascending."""
    roots, _ = _solve(R, d, 0.0)
    return [CatenoidSolution(c=d / u, d=d, R=R, branch=b) for u, b in roots]


def solve_y_catenoid(R: float, d: float) -> list[YCatenoidSolution]:
    """Scales ``lam`` with ``R = lam cosh(d/lam + h0)``, ascending."""
    roots, _ = _solve(R, d, H0)
    return [YCatenoidSolution(lam=d / u, d=d, R=R, branch=b) for u, b in roots]


def enumerate_spanning_surfaces(R: float, d: float) -> SpanningCensus:
    """All minimal Plateau surfaces spanning the circle pair."""
    cat, cat_t = _solve(R, d, 0.0)
    ycat, ycat_t = _solve(R, d, H0)
    entries: list = [DiskPair(R=R, d=d)]
    entries += [CatenoidSolution(c=d / u, d=d, R=R, branch=b) for u, b in cat]
    entries += [YCatenoidSolution(lam=d / u, d=d, R=R, branch=b) for u, b in ycat]
    return SpanningCensus(
        R=R, d=d, entries=entries, at_catenoid_tangency=cat_t, at_ycatenoid_tangency=ycat_t
    )


def catenoid_band_area(c: float, d: float) -> float:
    """Area of ``c Cat`` between heights ``-d`` and ``d``."""
    t = d / c
    return 2.0 * math.pi * c * c * (t + math.sinh(t) * math.cosh(t))
