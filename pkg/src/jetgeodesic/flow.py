"""Reduced geodesic flow on the level set p_theta_i = i! a_i.

Hamilton's equations of H = (p_x^2 + P_2^2) / 2 with P_2 = F(x) on the level
set reduce to

    x' = p_x,   p_x' = -F(x) F'(x),   theta_i' = x^i F(x) / i!

and are integrated with the Dormand-Prince 5(4) pair.  The p_theta are
constants of motion and are never carried as state.

The integration runs in the chart y = x - x(0), with F re-expanded exactly
about the start, so F stays accurate when |x| is large compared with the
width of the Hill interval.  The local error of x is weighted by |F'|,
since an error dx moves the energy by 2 F F' dx.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import BadInitialEnergy, IntegratorError, StepSizeUnderflow
from .hill import HillInterval
from .poly import Polynomial, derivative

ENERGY_TOL = 1e-9

# Dormand & Prince (1980), with Hairer's dense-output coefficients
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])
_D = np.array([-12715105075 / 11282082432, 0.0, 87487479700 / 32700410799,
               -10690763975 / 1880347072, 701980252875 / 199316789632,
               -1453857185 / 822651844, 69997945 / 29380423])


@dataclass(frozen=True)
class State:
    t: float
    x: float
    p_x: float
    thetas: tuple[float, ...]

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.p_x, *self.thetas])

    @classmethod
    def from_array(cls, t: float, y) -> "State":
        return cls(float(t), float(y[0]), float(y[1]), tuple(float(v) for v in y[2:]))


def energy_defect(f: Polynomial, x, p_x):
    """p_x^2 + F(x)^2 - 1, zero on the arc-length shell h = 1/2."""
    return p_x * p_x + f(x) ** 2 - 1.0


@dataclass(frozen=True)
class StepStats:
    accepted: int
    rejected: int
    max_energy_drift: float


@dataclass
class Trajectory:
    f: Polynomial
    samples: list[State]
    step_stats: StepStats
    drift: np.ndarray | None = None  # |p_x^2 + F^2 - 1| per sample, evaluated in the chart
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def _col(self, name):
        if name not in self._cache:
            if name == "thetas":
                self._cache[name] = np.array([s.thetas for s in self.samples])
            else:
                self._cache[name] = np.array([getattr(s, name) for s in self.samples])
        return self._cache[name]

    @property
    def t(self) -> np.ndarray:
        return self._col("t")

    @property
    def x(self) -> np.ndarray:
        return self._col("x")

    @property
    def p_x(self) -> np.ndarray:
        return self._col("p_x")

    @property
    def thetas(self) -> np.ndarray:
        return self._col("thetas")

    @property
    def energy_drift(self) -> np.ndarray:
        if self.drift is not None:
            return self.drift
        return np.abs(energy_defect(self.f, self.x, self.p_x))


def level_set_momenta(f: Polynomial) -> np.ndarray:
    """p_theta_i = i! a_i."""
    return np.array([math.factorial(i) * a for i, a in enumerate(f.coeffs)])


def _rhs_factory(f: Polynomial, c: float = 0.0):
    """Vector field in the chart y = x - c; F is expanded about c."""
    loc = f.translate(-c) if c != 0.0 else f
    dloc = derivative(loc)
    inv_fact = np.array([1.0 / math.factorial(i) for i in range(f.k + 1)])
    exps = np.arange(f.k + 1)

    def rhs(y):
        fx = loc(y[0])
        out = np.empty_like(y)
        out[0] = y[1]
        out[1] = -fx * dloc(y[0])
        out[2:] = (c + y[0]) ** exps * inv_fact * fx
        return out

    return rhs, loc, dloc


def vector_field(f: Polynomial, s: State) -> np.ndarray:
    """(x', p_x', theta_0', ..., theta_k') at state ``s``."""
    return _rhs_factory(f)[0](s.as_array())


def _exact_value(f: Polynomial, x: float) -> Fraction:
    xf = Fraction(x)
    acc = Fraction(0)
    for a in reversed(f.coeffs):
        acc = acc * xf + Fraction(a)
    return acc


def shell_momentum(f: Polynomial, x: float) -> float | None:
    """|p_x| = sqrt(1 - F(x)^2) with F(x) evaluated exactly; None outside the shell."""
    r = 1 - _exact_value(f, x) ** 2
    return None if r < 0 else math.sqrt(r)


def initial_state(f: Polynomial, I: HillInterval, x0: float | None = None,
                  direction: int = 1, thetas=None) -> State:
    """On-shell start inside ``I``.

    The default is the left endpoint at rest.  When the float nearest the
    endpoint lies a hair outside the Hill interval, the start moves inward
    by a few ulps and gets the tiny momentum that puts it on the shell.
    """
    th = tuple(thetas) if thetas is not None else (0.0,) * (f.k + 1)
    if x0 is None:
        x = I.lo
        for _ in range(256):
            p = shell_momentum(f, x)
            if p is not None:
                return State(0.0, x, p, th)
            x = math.nextafter(x, I.hi)
        raise ValueError("no float start on the energy shell near the left endpoint")
    if not I.contains(x0):
        raise ValueError(f"x0={x0} lies outside the Hill interval")
    p = shell_momentum(f, x0)
    if p is None:
        raise ValueError(f"F(x0)^2 > 1 at x0={x0}")
    return State(0.0, float(x0), math.copysign(p, direction), th)


def _initial_step(rhs, y0, k0, tol):
    scale = tol + tol * np.abs(y0)
    d0 = np.sqrt(np.mean((y0 / scale) ** 2))
    d1 = np.sqrt(np.mean((k0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    k1 = rhs(y0 + h0 * k0)
    d2 = np.sqrt(np.mean(((k1 - k0) / scale) ** 2)) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1)


def integrate(f: Polynomial, s0: State, t_end: float, tol: float = 1e-10,
              n_samples: int | None = 512, sample_times=None,
              max_steps: int = 1_000_000) -> Trajectory:
    """Integrate the geodesic flow from ``s0`` to ``t_end``.

    Samples are taken by dense output at ``sample_times`` (absolute times) or,
    by default, at ``n_samples`` equispaced times including both ends.  The
    final sample is always an accepted step, not an interpolant.
    """
    if len(s0.thetas) != f.k + 1:
        raise ValueError(f"expected {f.k + 1} theta coordinates, got {len(s0.thetas)}")
    c = s0.x
    rhs, loc, dloc = _rhs_factory(f, c)
    defect0 = s0.p_x**2 + loc(0.0) ** 2 - 1.0
    if abs(defect0) > ENERGY_TOL:
        raise BadInitialEnergy(f"p_x^2 + F(x)^2 - 1 = {defect0:.3e} at the start")
    if t_end < s0.t:
        raise ValueError("t_end must not precede the initial time")
    if sample_times is None:
        if t_end == s0.t:
            sample_times = np.array([s0.t])
        else:
            sample_times = np.linspace(s0.t, t_end, max(2, n_samples or 2))
    ts = np.asarray(sample_times, dtype=float)
    if np.any(np.diff(ts) <= 0) or ts[0] < s0.t or ts[-1] > t_end:
        raise ValueError("sample times must be strictly increasing within [t0, t_end]")

    t = s0.t
    y = s0.as_array()
    y[0] = 0.0
    out = []

    def emit(tt, yy):
        out.append((tt, yy.copy()))

    j = 0
    while j < len(ts) and ts[j] == t:
        emit(t, y)
        j += 1
    accepted = rejected = 0
    if t_end > t:
        k = np.empty((7, y.size))
        k[0] = rhs(y)
        h = min(_initial_step(rhs, y, k[0], tol), t_end - t)
        hmin_rel = 64 * np.finfo(float).eps
        fac_max = 10.0
        while t < t_end:
            if accepted + rejected > max_steps:
                raise IntegratorError(f"exceeded {max_steps} steps")
            last = t + h >= t_end
            if last:
                h = t_end - t
            elif h <= hmin_rel * max(1.0, abs(t)):
                raise StepSizeUnderflow(f"step size underflow at t={t:.6g}, x={y[0]:.6g}")
            for s in range(1, 7):
                k[s] = rhs(y + h * (np.asarray(_A[s]) @ k[:s]))
            y_new = y + h * (_B[:6] @ k[:6])
            k[6] = rhs(y_new)
            err_vec = h * (_E @ k)
            scale = tol + tol * np.maximum(np.abs(y), np.abs(y_new))
            scale[0] /= max(1.0, abs(dloc(y_new[0])))
            err = float(np.max(np.abs(err_vec / scale)))
            if err <= 1.0:
                t_new = t_end if last else t + h
                # dense output on (t, t_new]
                if j < len(ts) and ts[j] <= t_new:
                    ydiff = y_new - y
                    bspl = h * k[0] - ydiff
                    r4 = ydiff - h * k[6] - bspl
                    r5 = h * (_D @ k)
                    while j < len(ts) and ts[j] <= t_new:
                        if ts[j] == t_new:
                            yj = y_new
                        else:
                            th = (ts[j] - t) / h
                            th1 = 1.0 - th
                            yj = y + th * (ydiff + th1 * (bspl + th * (r4 + th1 * r5)))
                        emit(ts[j], yj)
                        j += 1
                t, y = t_new, y_new
                k[0] = k[6]
                accepted += 1
                fac = fac_max if err == 0 else min(fac_max, 0.9 * err ** -0.2)
                h = h * max(0.2, fac)
                fac_max = 10.0
            else:
                rejected += 1
                h = h * max(0.2, 0.9 * err ** -0.2)
                fac_max = 1.0
    ys = np.array([v[1] for v in out])
    drift = np.abs(ys[:, 1] ** 2 + loc(ys[:, 0]) ** 2 - 1.0)
    samples = [State(float(tt), float(c + v[0]), float(v[1]), tuple(float(w) for w in v[2:]))
               for tt, v in out]
    return Trajectory(f, samples, StepStats(accepted, rejected, float(drift.max())), drift)
