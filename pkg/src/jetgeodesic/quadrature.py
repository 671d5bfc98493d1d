"""Tanh-sinh quadrature for integrals weighted by (1 - F^2)^(+-1/2) on a Hill interval.

The nodes are generated together with their distances to both ends of the
integration segment, computed without cancellation.  Near a Hill endpoint r
the radicand 1 - F^2 is evaluated from the Taylor expansion of F about r,
G(d) = F(r + d) - F(r), as -G (2 F(r) + G): this keeps full relative
accuracy at distances far below machine epsilon times |r|, which is what
lets the 1/sqrt endpoint singularities converge at the usual double
exponential rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import CriticalEndpoint, NoConvergence, UnboundedInterval
from .hill import EndpointKind, HillInterval
from .poly import Polynomial, horner

T_MAX = 4.6
MIN_LEVEL = 3
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_level: int = 12

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if not 4 <= self.max_level <= 20:
            raise ValueError("max_level must lie in [4, 20]")


DEFAULT_SPEC = QuadratureSpec()


def _level_nodes(level: int):
    """Nonnegative abscissae t of a level, their complements 1 - tanh(pi/2 sinh t), weights."""
    h = 2.0**-level
    if level == 0:
        t = np.arange(0.0, T_MAX, 1.0)
    else:
        t = np.arange(h, T_MAX, 2 * h)
    z = 0.5 * math.pi * np.sinh(t)
    comp = 2.0 / (1.0 + np.exp(2.0 * z))
    w = 0.5 * math.pi * np.cosh(t) * 4.0 / (np.exp(z) + np.exp(-z)) ** 2
    return t, comp, w


def tanh_sinh(phi: Callable, a: float, b: float, spec: QuadratureSpec = DEFAULT_SPEC):
    """Integrate phi over [a, b].

    ``phi(dl, dr)`` receives arrays of node offsets dl = x - a and dr = b - x
    and returns values of shape (n,) or (m, n).  Non-finite values mark
    skipped nodes.  Returns ``(value, error_estimate, level)``.
    """
    width = b - a
    half = 0.5 * width
    acc = None
    acc_abs = None
    prev = None
    last_err = math.nan
    for level in range(spec.max_level + 1):
        h = 2.0**-level
        t, comp, w = _level_nodes(level)
        d_near = half * comp
        d_far = width - d_near
        if level == 0:
            # t = 0 is counted once
            dl = np.concatenate([d_far, d_near[1:]])
            dr = np.concatenate([d_near, d_far[1:]])
            ww = np.concatenate([w, w[1:]]) * half
        else:
            dl = np.concatenate([d_far, d_near])
            dr = np.concatenate([d_near, d_far])
            ww = np.concatenate([w, w]) * half
        keep = (dl > 0) & (dr > 0)
        vals = np.asarray(phi(dl[keep], dr[keep]), dtype=float)
        wk = ww[keep]
        terms = vals * wk
        terms = np.where(np.isfinite(terms), terms, 0.0)
        s = terms.sum(axis=-1)
        s_abs = np.abs(terms).sum(axis=-1)
        acc = s if acc is None else acc + s
        acc_abs = s_abs if acc_abs is None else acc_abs + s_abs
        est = h * acc
        if prev is not None and level >= MIN_LEVEL:
            err = np.abs(est - prev)
            noise = 64 * _EPS * h * acc_abs
            bound = np.maximum(np.maximum(spec.abs_tol, spec.rel_tol * np.abs(est)), noise)
            if np.all(err <= bound):
                return (float(est) if np.ndim(est) == 0 else est), float(np.max(err)), level
            last_err = float(np.max(err))
        prev = est
    raise NoConvergence(f"tanh-sinh did not converge within {spec.max_level} levels "
                        f"(last difference {last_err:.3e})")


class Radicand:
    """Accurate F(x) and 1 - F(x)^2 on a Hill interval, in a chart centred on it.

    F is re-expanded exactly about the float midpoint c, and the endpoints
    are re-solved in the local coordinate y = x - c, where they carry full
    relative precision even when the interval is narrow compared with |c|.
    Near each endpoint the radicand is then built from the Taylor expansion
    of F about that endpoint.
    """

    def __init__(self, f: Polynomial, I: HillInterval):
        self.f = f
        self.c = c = I.midpoint
        self.local = f.translate(-c)  # y -> F(c + y)
        self._dlocal = self.local.derivative()
        self.lo = self._refine(I.lo - c)
        self.hi = self._refine(I.hi - c)
        self._left = self._expansion(self.lo)
        self._right = self._expansion(self.hi)

    def _refine(self, y: float) -> float:
        level = 1.0 if self.local(y) >= 0 else -1.0
        y0 = y
        for _ in range(8):
            d = self._dlocal(y)
            if d == 0.0:
                break
            step = (self.local(y) - level) / d
            y -= step
            if abs(step) <= 4 * _EPS * abs(y):
                break
        # a refinement that wanders off means the chart is not trustworthy
        return y if abs(y - y0) <= 1e-6 * (abs(y0) + 1e-300) + 1e-12 else y0

    def _expansion(self, r: float):
        shifted = self.local.translate(-r).coeffs
        level = 1.0 if self.local(r) >= 0 else -1.0
        return level, (0.0,) + shifted[1:]

    def to_local(self, x: float, I: HillInterval) -> float:
        if x == I.lo:
            return self.lo
        if x == I.hi:
            return self.hi
        return min(max(x - self.c, self.lo), self.hi)

    @staticmethod
    def _near(exp, d):
        level, g = exp
        gd = horner(g, d)
        return level + gd, -gd * (2.0 * level + gd)

    def __call__(self, d_lo, d_hi):
        """(y, F(c + y), 1 - F(c + y)^2) at local distance d_lo from lo and d_hi from hi."""
        left = d_lo <= d_hi
        y = np.where(left, self.lo + d_lo, self.hi - d_hi)
        fl, rl = self._near(self._left, d_lo)
        fr, rr = self._near(self._right, -d_hi)
        return y, np.where(left, fl, fr), np.where(left, rl, rr)


def integrate_weighted(g: Callable, f: Polynomial, I: HillInterval, a: float, b: float,
                       power: float, spec: QuadratureSpec = DEFAULT_SPEC, local: bool = False,
                       rad: Radicand | None = None):
    """int_a^b g(x) (1 - F(x)^2)**power dx for lo <= a <= b <= hi.

    ``g`` is applied to numpy arrays and may return shape (n,) or (m, n).
    With ``local`` it is called as ``g(y, fx)`` instead, where y = x - c is
    the offset from the interval midpoint c = I.midpoint and fx = F(x) comes
    from the endpoint expansions; both stay accurate on intervals that are
    narrow compared with |c|.  Nodes where rounding makes the radicand
    nonpositive are skipped.  A prebuilt ``rad`` for (f, I) may be passed to
    save its set-up cost over many calls.
    """
    if not I.bounded:
        raise UnboundedInterval(f"{I.geo_class.value} interval is not bounded")
    if not (I.lo <= a <= b <= I.hi):
        raise ValueError(f"[{a}, {b}] is not inside the Hill interval [{I.lo}, {I.hi}]")
    rad = rad if rad is not None else Radicand(f, I)
    ya, yb = rad.to_local(a, I), rad.to_local(b, I)
    off_lo, off_hi = ya - rad.lo, rad.hi - yb

    def values(y, fx):
        v = np.asarray(g(y, fx) if local else g(rad.c + y), dtype=float)
        return v if v.shape[-1:] == y.shape else np.broadcast_to(v, y.shape)

    if a == b:
        v = values(np.array([ya]), np.array([f(a)]))
        return 0.0 if v.shape == (1,) else np.zeros(v.shape[:-1])

    def phi(dl, dr):
        y, fx, r = rad(off_lo + dl, off_hi + dr)
        ok = r > 0
        wt = np.where(ok, np.where(ok, r, 1.0) ** power, np.nan)
        return values(y, fx) * wt

    value, _, _ = tanh_sinh(phi, ya, yb, spec)
    return value


def _require_regular(I: HillInterval) -> None:
    if not I.bounded:
        raise UnboundedInterval(f"{I.geo_class.value} interval is not bounded")
    if I.lo_kind is not EndpointKind.REGULAR or I.hi_kind is not EndpointKind.REGULAR:
        raise CriticalEndpoint(
            f"Hill interval [{I.lo}, {I.hi}] has a critical endpoint; the integral may diverge")


def integrate_singular(g: Callable, f: Polynomial, I: HillInterval,
                       spec: QuadratureSpec = DEFAULT_SPEC, local: bool = False):
    """int_I g(x) / sqrt(1 - F(x)^2) dx on an x-periodic Hill interval."""
    _require_regular(I)
    return integrate_weighted(g, f, I, I.lo, I.hi, -0.5, spec, local)


def integrate_regular(g: Callable, f: Polynomial, I: HillInterval,
                      spec: QuadratureSpec = DEFAULT_SPEC, local: bool = False):
    """int_I g(x) * sqrt(1 - F(x)^2) dx on any bounded Hill interval."""
    return integrate_weighted(g, f, I, I.lo, I.hi, 0.5, spec, local)
