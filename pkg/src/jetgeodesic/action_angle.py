"""Generating function, angle variables and the calibration diagnostics.

With h = 1/2 fixed, the Hamilton-Jacobi solution on one monotone arc of the
x-motion is

    S = s * A(x) + sum_i i! a_i theta_i,    A(x) = int_lo^x sqrt(1 - F^2),

with s = sign(p_x).  S is only a local function; along a trajectory it is
unwrapped by choosing the constant on each new arc so that S is continuous
at the turning point.  One full loop then adds Pi to S.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CriticalEndpoint, NoHillInterval, OutsideHill, PerturbationLeavesClass
from .flow import State, Trajectory
from .hill import GeoClass, HillInterval, hill_intervals
from .holonomy import adiabatic_invariant, perturbed_interval, period
from .poly import Polynomial, derivative
from .quadrature import DEFAULT_SPEC, QuadratureSpec, Radicand, integrate_weighted

TURN_EXCLUSION = 1e-3


def _theta_term(f: Polynomial, thetas) -> float:
    """sum_i i! a_i theta_i = sum_i p_theta_i theta_i."""
    th = np.asarray(thetas, dtype=float)
    if th.shape[-1] != f.k + 1:
        raise ValueError(f"expected {f.k + 1} theta coordinates, got {th.shape[-1]}")
    p = np.array([math.factorial(i) * a for i, a in enumerate(f.coeffs)])
    return th @ p


class _Arcs:
    """Partial integrals from the left endpoint, sharing one Radicand.

    area(x)   = int_lo^x sqrt(1 - F^2)
    twist(x)  = (int_lo^x x^i F / sqrt(1 - F^2))_i
    The far half of I is integrated from the right end and subtracted from
    the full integral, so both ends are always handled as endpoints.
    """

    def __init__(self, f: Polynomial, I: HillInterval, spec: QuadratureSpec = DEFAULT_SPEC):
        if not I.bounded:
            raise CriticalEndpoint(f"{I.geo_class.value} interval has no bounded arc")
        self.f, self.I, self.spec = f, I, spec
        self.rad = Radicand(f, I)
        self.half_area = self._area(I.lo, I.hi)
        self._full_twist = None

    def clamp(self, x: float) -> float:
        return min(max(float(x), self.I.lo), self.I.hi)

    def _area(self, a, b):
        return integrate_weighted(lambda x: 1.0, self.f, self.I, a, b, 0.5, self.spec, rad=self.rad)

    def area(self, x: float) -> float:
        x = self.clamp(x)
        if x <= self.I.midpoint:
            return self._area(self.I.lo, x)
        return self.half_area - self._area(x, self.I.hi)

    def _twist(self, a, b):
        k = self.f.k
        c = self.rad.c
        g = lambda y, fx: np.vstack([(c + y) ** i * fx for i in range(k + 1)])
        return integrate_weighted(g, self.f, self.I, a, b, -0.5, self.spec, local=True, rad=self.rad)

    def twist(self, x: float) -> np.ndarray:
        if self._full_twist is None:
            self._full_twist = self._twist(self.I.lo, self.I.hi)
        x = self.clamp(x)
        if x <= self.I.midpoint:
            return self._twist(self.I.lo, x)
        return self._full_twist - self._twist(x, self.I.hi)


def _check_inside(I: HillInterval, x: float) -> None:
    slack = 1e-12 * max(1.0, abs(x))
    if not I.contains(x, slack):
        raise OutsideHill(f"x = {x} lies outside the Hill interval [{I.lo}, {I.hi}]")


def generating_function(f: Polynomial, I: HillInterval, x: float, branch: int = 1,
                        thetas=None, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """S(x, theta) = branch * int_lo^x sqrt(1 - F^2) + sum_i i! a_i theta_i on one arc."""
    _check_inside(I, x)
    th = np.zeros(f.k + 1) if thetas is None else thetas
    if I.geo_class is GeoClass.HORIZONTAL_LINE:
        return branch * math.sqrt(1.0 - f.coeffs[0] ** 2) * x + _theta_term(f, th)
    return branch * _Arcs(f, I, spec).area(x) + _theta_term(f, th)


def angle_phi_h(f: Polynomial, I: HillInterval, x: float, branch: int = 1,
                spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Angle with d(phi) = p_x dx / Pi, measured from the left endpoint around the loop.

    The upper arc (branch +) covers [0, 1/2], the lower arc (1/2, 1].
    """
    if I.geo_class is not GeoClass.X_PERIODIC:
        raise CriticalEndpoint(f"{I.geo_class.value} interval has no smooth loop")
    _check_inside(I, x)
    arcs = _Arcs(f, I, spec)
    frac = arcs.area(x) / (2.0 * arcs.half_area)
    return frac if branch > 0 else 1.0 - frac


def angle_phi_time(sample: State, L: float, t0: float = 0.0) -> float:
    """Angle conjugate to Pi: elapsed time over the x-period."""
    return (sample.t - t0) / L


@dataclass(frozen=True)
class TraceSample:
    t: float
    S: float
    phi_h_area: float
    phi_time: float
    phi_i: tuple[float, ...]
    near_turn: bool = False


@dataclass(frozen=True)
class ActionAngleTrace:
    samples: list[TraceSample]
    branch_flips: int

    @property
    def t(self) -> np.ndarray:
        return np.array([s.t for s in self.samples])

    @property
    def S(self) -> np.ndarray:
        return np.array([s.S for s in self.samples])

    @property
    def phi_h_area(self) -> np.ndarray:
        return np.array([s.phi_h_area for s in self.samples])

    @property
    def phi_time(self) -> np.ndarray:
        return np.array([s.phi_time for s in self.samples])

    @property
    def phi_i(self) -> np.ndarray:
        return np.array([s.phi_i for s in self.samples])

    @property
    def steady(self) -> np.ndarray:
        """Samples away from turning points, where phi_i is well conditioned."""
        return np.array([not s.near_turn for s in self.samples])


def _branches(f: Polynomial, x, p):
    """sign(p_x), with the direction of travel taken from -F F' where p_x = 0."""
    df = derivative(f)
    s = np.sign(p)
    rest = s == 0
    s[rest] = np.sign(-f(x[rest]) * df(x[rest]))
    s[s == 0] = 1.0
    return s


def _turning_times(t, p, s):
    """Linear estimates of the times where p_x changes sign between samples."""
    out = []
    for n in np.nonzero(s[1:] != s[:-1])[0]:
        dp = p[n + 1] - p[n]
        w = 0.0 if dp == 0 else -p[n] / dp
        out.append(t[n] + min(max(w, 0.0), 1.0) * (t[n + 1] - t[n]))
    return np.array(out)


def _unwrap(values, s, edge_value):
    """s_n * values_n plus the constant that keeps the sum continuous at turns.

    Crossing from branch s_old to s_new at a turn x_turn keeps continuity when
    the constant grows by (s_old - s_new) * value(x_turn); a turn on the upper
    arc (s_old = +1) happens at hi, otherwise at lo.
    """
    const = np.zeros_like(values[0])
    out = np.empty_like(values)
    for n in range(len(s)):
        if n > 0 and s[n] != s[n - 1]:
            const = const + (s[n - 1] - s[n]) * edge_value(s[n - 1])
        out[n] = s[n] * values[n] + const
    return out


def _interval_of(f: Polynomial, x0: float) -> HillInterval:
    for h in hill_intervals(f):
        if h.contains(x0, 1e-9 * max(1.0, abs(x0))):
            return h
    raise OutsideHill(f"x = {x0} lies in no Hill interval")


def unwrapped_generating_function(f: Polynomial, traj: Trajectory, I: HillInterval | None = None,
                                  spec: QuadratureSpec = DEFAULT_SPEC):
    """S along ``traj``, continuous across turning points.  Returns (S, branches)."""
    x, p = traj.x, traj.p_x
    I = I if I is not None else _interval_of(f, x[0])
    s = _branches(f, x, p)
    theta = _theta_term(f, traj.thetas)
    if I.geo_class is GeoClass.HORIZONTAL_LINE:
        return s * math.sqrt(1.0 - f.coeffs[0] ** 2) * x + theta, s
    arcs = _Arcs(f, I, spec)
    area = np.array([arcs.area(v) for v in x])
    return _unwrap(area, s, lambda s_old: arcs.half_area if s_old > 0 else 0.0) + theta, s


def action_angle_trace(f: Polynomial, I: HillInterval, traj: Trajectory,
                       spec: QuadratureSpec = DEFAULT_SPEC) -> ActionAngleTrace:
    """S, both angle conventions and phi_i sampled along an x-periodic trajectory."""
    if I.geo_class is not GeoClass.X_PERIODIC:
        raise CriticalEndpoint(f"{I.geo_class.value} interval has no smooth loop")
    arcs = _Arcs(f, I, spec)
    x = traj.x
    S, s = unwrapped_generating_function(f, traj, I, spec)
    Pi = 2.0 * arcs.half_area
    L = period(f, I)
    theta_part = _theta_term(f, traj.thetas)
    phi_h = (S - theta_part) / Pi

    twist = np.array([arcs.twist(v) for v in x])
    full = arcs.twist(I.hi)
    w = _unwrap(twist, s, lambda s_old: full if s_old > 0 else np.zeros_like(full))
    fact = np.array([float(math.factorial(i)) for i in range(f.k + 1)])
    phi_i = -w + fact * traj.thetas

    t0 = traj.t[0]
    steady = away_from_turns(traj.t, traj.p_x, s) & (traj.p_x != 0)
    samples = [TraceSample(float(traj.t[n]), float(S[n]), float(phi_h[n]),
                           float((traj.t[n] - t0) / L), tuple(float(v) for v in phi_i[n]),
                           not bool(steady[n]))
               for n in range(len(x))]
    return ActionAngleTrace(samples, int(np.count_nonzero(s[1:] != s[:-1])))


def away_from_turns(t, p, s, gap: float = TURN_EXCLUSION) -> np.ndarray:
    """Mask of samples at least ``gap`` in time from every turning point."""
    turns = _turning_times(t, p, s)
    if turns.size == 0:
        return np.ones(t.shape, dtype=bool)
    return np.min(np.abs(t[:, None] - turns[None, :]), axis=1) >= gap


def calibration_check(f: Polynomial, traj: Trajectory, I: HillInterval | None = None,
                      spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """max |dS/dt - 1| along ``traj``, away from turning points.

    The derivative is taken by second-order finite differences of the
    unwrapped generating function.  Samples at the start or at p_x = 0 on
    the first sample are excluded via the turning-point gap.
    """
    t = traj.t
    if t.size < 3:
        raise ValueError("calibration needs at least three samples")
    S, s = unwrapped_generating_function(f, traj, I, spec)
    dS = np.gradient(S, t)
    keep = away_from_turns(t, traj.p_x, s)
    keep &= np.abs(traj.p_x) > 0  # a start at rest is itself a turning point
    if not np.any(keep):
        return 0.0
    return float(np.max(np.abs(dS[keep] - 1.0)))


def dPi_dh(f: Polynomial, I: HillInterval, eps: float = 1e-5,
           spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """dPi/dh at h = 1/2 by central differences; should equal L.

    Pi(h) = 2 int sqrt(2h - F^2) = sqrt(2h) * Pi_G with G = F / sqrt(2h), on
    the Hill interval of G continuing I.
    """
    if I.geo_class is not GeoClass.X_PERIODIC:
        raise CriticalEndpoint(f"{I.geo_class.value} interval is not x-periodic")
    if not 0 < eps < 0.5:
        raise ValueError("energy step must lie in (0, 1/2)")
    vals = []
    for h in (0.5 + eps, 0.5 - eps):
        r = math.sqrt(2.0 * h)
        g = Polynomial(tuple(a / r for a in f.coeffs))
        try:
            Ig = perturbed_interval(g, I)
        except NoHillInterval as exc:
            raise PerturbationLeavesClass(str(exc)) from exc
        vals.append(r * adiabatic_invariant(g, Ig, spec))
    return (vals[0] - vals[1]) / (2.0 * eps)
