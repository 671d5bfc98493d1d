"""Hill intervals of F and the geodesic class each one carries."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence, NoHillInterval, UnboundedInterval
from .poly import SIMPLE_TOL, Polynomial, derivative, level_crossings, real_roots

MIN_LENGTH = 1e-9
GRID_POINTS = 101


class EndpointKind(str, enum.Enum):
    REGULAR = "Regular"
    CRITICAL = "Critical"
    UNBOUNDED = "Unbounded"


class GeoClass(str, enum.Enum):
    X_PERIODIC = "XPeriodic"
    ENDPOINT_CRITICAL = "EndpointCritical"
    HORIZONTAL_LINE = "HorizontalLine"
    ABNORMAL_POINT = "AbnormalPoint"


class LoopShape(str, enum.Enum):
    SMOOTH = "Smooth"
    NON_SMOOTH = "NonSmooth"


@dataclass(frozen=True)
class HillInterval:
    f: Polynomial
    lo: float
    hi: float
    lo_kind: EndpointKind
    hi_kind: EndpointKind
    geo_class: GeoClass

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi) and self.geo_class in (
            GeoClass.X_PERIODIC,
            GeoClass.ENDPOINT_CRITICAL,
        )

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x: float, slack: float = 0.0) -> bool:
        return self.lo - slack <= x <= self.hi + slack

    def shifted(self, c: float) -> "HillInterval":
        return HillInterval(self.f.translate(c), self.lo + c, self.hi + c,
                            self.lo_kind, self.hi_kind, self.geo_class)


def endpoint_kind(f: Polynomial, x: float, simple_tol: float = SIMPLE_TOL) -> EndpointKind:
    df = derivative(f)
    if abs(df(x)) > simple_tol * df.scale(x):
        return EndpointKind.REGULAR
    return EndpointKind.CRITICAL


def hill_intervals(f: Polynomial, simple_tol: float = SIMPLE_TOL) -> list[HillInterval]:
    """All maximal closed intervals with F^2 < 1 inside and F^2 = 1 on the boundary."""
    if f.is_constant():
        c = f.coeffs[0]
        if abs(c) < 1.0:
            return [HillInterval(f, -math.inf, math.inf, EndpointKind.UNBOUNDED,
                                 EndpointKind.UNBOUNDED, GeoClass.HORIZONTAL_LINE)]
        if abs(c) == 1.0:
            # the Hill "interval" is a single point, defined up to translation
            return [HillInterval(f, 0.0, 0.0, EndpointKind.CRITICAL,
                                 EndpointKind.CRITICAL, GeoClass.ABNORMAL_POINT)]
        raise NoHillInterval(f"|F| = {abs(c)} > 1 everywhere")

    # 1 - F^2 = (1 - F)(1 + F): isolate each factor separately
    pts = sorted(set(level_crossings(f, 1.0)) | set(level_crossings(f, -1.0)))
    out = []
    for a, b in zip(pts, pts[1:]):
        if b - a < MIN_LENGTH:
            continue
        m = 0.5 * (a + b)
        if f(m) ** 2 >= 1.0:
            continue
        _validate(f, a, b)
        lk, hk = endpoint_kind(f, a, simple_tol), endpoint_kind(f, b, simple_tol)
        both = lk is EndpointKind.REGULAR and hk is EndpointKind.REGULAR
        cls = GeoClass.X_PERIODIC if both else GeoClass.ENDPOINT_CRITICAL
        out.append(HillInterval(f, float(a), float(b), lk, hk, cls))
    if not out:
        raise NoHillInterval("F^2 >= 1 everywhere; no geodesic at this level set")
    return out


def _validate(f: Polynomial, a: float, b: float) -> None:
    grid = list(np.linspace(a, b, GRID_POINTS)[1:-1])
    df = derivative(f)
    if not df.is_zero():
        grid += [r for r in real_roots(df).locations if a < r < b]
    xs = np.asarray(grid)
    vals = f(xs) ** 2
    slack = 4 * np.finfo(float).eps * f.scale(xs) ** 2
    if np.any(vals >= 1.0 + slack):
        raise NoConvergence(f"interior check failed on [{a!r}, {b!r}]")


def first_x_periodic(intervals: list[HillInterval]) -> HillInterval | None:
    for h in intervals:
        if h.geo_class is GeoClass.X_PERIODIC:
            return h
    return None


def classify_loop(h: HillInterval) -> LoopShape:
    """Smoothness of the phase-plane loop alpha(F, I)."""
    if not h.bounded:
        raise UnboundedInterval(f"{h.geo_class.value} has no closed loop")
    if h.lo_kind is EndpointKind.REGULAR and h.hi_kind is EndpointKind.REGULAR:
        return LoopShape.SMOOTH
    return LoopShape.NON_SMOOTH


def nearest_interval(f: Polynomial, ref: HillInterval) -> HillInterval:
    """Hill interval of ``f`` closest to ``ref`` (used when F is perturbed)."""
    cands = [h for h in hill_intervals(f) if h.bounded]
    if not cands:
        raise NoHillInterval("no bounded Hill interval")
    return min(cands, key=lambda h: abs(h.lo - ref.lo) + abs(h.hi - ref.hi))
