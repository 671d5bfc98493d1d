"""Period, area, holonomy increments and the Gram certificate for an x-periodic pair (F, I).

For an x-periodic Hill interval I of F:

    L         = 2 int_I dx / sqrt(1 - F^2)                 (x-period)
    Pi        = 2 int_I sqrt(1 - F^2) dx                   (area of the loop)
    dtheta_i  = (2 / i!) int_I x^i F dx / sqrt(1 - F^2)    (holonomy)
    G_ij      = int_I x^(i+j) dx / sqrt(1 - F^2)           (Gram matrix)

and L = Pi + sum_i i! a_i dtheta_i.  Because G is positive definite,
G a = (i! dtheta_i / 2)_i cannot vanish for a != 0, so no geodesic returns
to its starting point.
"""

from __future__ import annotations

import enum
import math
from fractions import Fraction
from dataclasses import asdict, dataclass

import numpy as np
from numpy.polynomial import chebyshev
from scipy.linalg import solve_triangular

from .errors import CriticalEndpoint, InconsistentComputation, NoHillInterval, PerturbationLeavesClass
from .hill import GeoClass, HillInterval, nearest_interval
from .linalg import jacobi_eigenvalues
from .poly import Polynomial
from .quadrature import QuadratureSpec, integrate_regular, integrate_singular

CERT_SPEC = QuadratureSpec(rel_tol=1e-13, abs_tol=1e-15, max_level=14)
IDENTITY_TOL = 1e-8
GRAM_TOL = 1e-8


class Verdict(str, enum.Enum):
    NOT_PERIODIC = "NotPeriodic"
    DEGENERATE_INPUT = "DegenerateInput"


def _factorials(k: int) -> np.ndarray:
    return np.array([float(math.factorial(i)) for i in range(k + 1)])


def _require_x_periodic(I: HillInterval) -> None:
    if I.geo_class is not GeoClass.X_PERIODIC:
        raise CriticalEndpoint(
            f"interval [{I.lo}, {I.hi}] is {I.geo_class.value}; period and holonomy are undefined")


def _recentre(c: float, local) -> list[Fraction]:
    """Origin moments from moments about c: sum_j C(m, j) c^(m-j) local_j, exactly."""
    cf = Fraction(c)
    loc = [Fraction(float(v)) for v in local]
    return [sum(math.comb(m, j) * cf ** (m - j) * loc[j] for j in range(m + 1))
            for m in range(len(loc))]


@dataclass(frozen=True)
class _LocalIntegrals:
    """Integrals against 1/sqrt(1 - F^2) in the chart y = x - c, one node set.

    eta_j = int y^j,  nu_j = int y^j F,  cheb_m = int T_m(y / r),
    with c the midpoint and r the half-width of I.
    """
    c: float
    r: float
    eta: np.ndarray
    nu: np.ndarray
    cheb: np.ndarray


def _local_integrals(f: Polynomial, I: HillInterval, n_eta: int, n_nu: int, n_cheb: int,
                     spec: QuadratureSpec) -> _LocalIntegrals:
    _require_x_periodic(I)
    c, r = I.midpoint, 0.5 * I.width
    eye = np.eye(max(n_cheb, 1))

    def g(y, fx):
        rows = [y**j for j in range(n_eta)]
        rows += [y**j * fx for j in range(n_nu)]
        rows += [chebyshev.chebval(y / r, eye[m]) for m in range(n_cheb)]
        return np.vstack(rows)

    v = integrate_singular(g, f, I, spec, local=True)
    return _LocalIntegrals(c, r, v[:n_eta], v[n_eta:n_eta + n_nu], v[n_eta + n_nu:])


def period(f: Polynomial, I: HillInterval, spec: QuadratureSpec = CERT_SPEC) -> float:
    """x-period L, twice the time needed to cross the Hill interval once."""
    _require_x_periodic(I)
    return 2.0 * integrate_singular(lambda x: 1.0, f, I, spec)


def _holonomy_exact(f: Polynomial, loc: _LocalIntegrals) -> list[Fraction]:
    # dtheta_i = (2 / i!) int x^i F / sqrt(1 - F^2)
    return [2 * m / math.factorial(i) for i, m in enumerate(_recentre(loc.c, loc.nu))]


def holonomy(f: Polynomial, I: HillInterval, spec: QuadratureSpec = CERT_SPEC) -> np.ndarray:
    """Increments dtheta_0..dtheta_k of the theta coordinates over one x-period."""
    loc = _local_integrals(f, I, 0, f.k + 1, 0, spec)
    return np.array([float(v) for v in _holonomy_exact(f, loc)])


def adiabatic_invariant(f: Polynomial, I: HillInterval, spec: QuadratureSpec = CERT_SPEC) -> float:
    """Area Pi enclosed by the phase-plane loop {p_x^2 + F^2 = 1, x in I}."""
    return 2.0 * integrate_regular(lambda x: 1.0, f, I, spec)


def moments(f: Polynomial, I: HillInterval, n: int, spec: QuadratureSpec = CERT_SPEC) -> np.ndarray:
    """int_I x^m dx / sqrt(1 - F^2) for m = 0..n-1."""
    loc = _local_integrals(f, I, n, 0, 0, spec)
    return np.array([float(v) for v in _recentre(loc.c, loc.eta)])


def _hankel(mu) -> np.ndarray:
    k = (len(mu) - 1) // 2
    return np.array([[float(mu[i + j]) for j in range(k + 1)] for i in range(k + 1)])


def gram_matrix(f: Polynomial, I: HillInterval, spec: QuadratureSpec = CERT_SPEC) -> np.ndarray:
    """G_ij = <x^i, x^j>_F, a Hankel matrix of moments (symmetric by construction)."""
    return _hankel(moments(f, I, 2 * f.k + 1, spec))


def _chebyshev_to_monomial(k: int, center: float, radius: float) -> np.ndarray:
    """Row j holds the monomial coefficients (in x) of T_j((x - center) / radius)."""
    rows = []
    for j in range(k + 1):
        t = np.zeros(k + 1)
        t[: j + 1] = chebyshev.cheb2poly(np.eye(k + 1)[j])[: j + 1]
        scaled = Polynomial(tuple(c * radius**-m for m, c in enumerate(t)))
        rows.append(scaled.translate(center).coeffs)
    return np.array(rows)


def _lambda_min_from(k: int, loc: _LocalIntegrals) -> float:
    cm = loc.cheb
    j = np.arange(k + 1)
    # T_j T_l = (T_{j+l} + T_{|j-l|}) / 2
    gc = 0.5 * (cm[np.add.outer(j, j)] + cm[np.abs(np.subtract.outer(j, j))])
    chol = np.linalg.cholesky(gc)
    n = _chebyshev_to_monomial(k, loc.c, loc.r)  # T-basis -> monomials, i.e. C^{-1}
    m = solve_triangular(chol, n, lower=True)
    return 1.0 / jacobi_eigenvalues(m.T @ m)[-1]


def gram_lambda_min(f: Polynomial, I: HillInterval, spec: QuadratureSpec = CERT_SPEC) -> float:
    """Smallest eigenvalue of the monomial Gram matrix, to high relative accuracy.

    The monomial Gram matrix is a Hankel moment matrix and is badly
    conditioned for narrow intervals away from the origin.  Write monomials
    in the Chebyshev basis of I, x^i = sum_j C_ij T_j, so that G = C Gc C^T
    with Gc = L L^T well conditioned.  Then G^{-1} = M^T M with M = L^{-1} C^{-1},
    and the largest eigenvalue of M^T M is computed accurately by Jacobi.
    """
    k = f.k
    return _lambda_min_from(k, _local_integrals(f, I, 0, 0, 2 * k + 1, spec))


@dataclass(frozen=True)
class PeriodReport:
    coefficients: tuple[float, ...]
    interval: tuple[float, float]
    L: float
    Pi: float
    delta_theta: tuple[float, ...]
    delta_theta_gram: tuple[float, ...]
    gram: tuple[tuple[float, ...], ...]
    lambda_min: float
    margin: float
    identity_residual: float
    gram_residual: float
    verdict: Verdict

    def to_dict(self) -> dict:
        d = asdict(self)
        d["interval"] = list(self.interval)
        d["coefficients"] = list(self.coefficients)
        d["delta_theta"] = list(self.delta_theta)
        d["delta_theta_gram"] = list(self.delta_theta_gram)
        d["gram"] = [list(row) for row in self.gram]
        d["verdict"] = self.verdict.value
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PeriodReport":
        return cls(
            coefficients=tuple(float(v) for v in d["coefficients"]),
            interval=(float(d["interval"][0]), float(d["interval"][1])),
            L=float(d["L"]),
            Pi=float(d["Pi"]),
            delta_theta=tuple(float(v) for v in d["delta_theta"]),
            delta_theta_gram=tuple(float(v) for v in d["delta_theta_gram"]),
            gram=tuple(tuple(float(v) for v in row) for row in d["gram"]),
            lambda_min=float(d["lambda_min"]),
            margin=float(d["margin"]),
            identity_residual=float(d["identity_residual"]),
            gram_residual=float(d["gram_residual"]),
            verdict=Verdict(d["verdict"]),
        )


def _degenerate_report(f: Polynomial, I: HillInterval) -> PeriodReport:
    nan = math.nan
    n = f.k + 1
    return PeriodReport(f.coeffs, (I.lo, I.hi), nan, nan, (nan,) * n, (nan,) * n,
                        tuple((nan,) * n for _ in range(n)), nan, nan, nan, nan,
                        Verdict.DEGENERATE_INPUT)


def certify(f: Polynomial, I: HillInterval, spec: QuadratureSpec = CERT_SPEC) -> PeriodReport:
    """Assemble L, Pi, dtheta, G and cross-check them.

    Raises InconsistentComputation if the quadrature holonomy disagrees with
    G a, if L != Pi + sum i! a_i dtheta_i, or if dtheta comes out (numerically)
    zero; none of these can happen for exact arithmetic on valid input.
    """
    if I.geo_class in (GeoClass.HORIZONTAL_LINE, GeoClass.ABNORMAL_POINT) or f.is_constant():
        return _degenerate_report(f, I)
    _require_x_periodic(I)
    a = np.array(f.coeffs)
    fact = _factorials(f.k)

    L = period(f, I, spec)
    Pi = adiabatic_invariant(f, I, spec)
    loc = _local_integrals(f, I, 2 * f.k + 1, f.k + 1, 2 * f.k + 1, spec)
    lam = _lambda_min_from(f.k, loc)

    # cross-checks are summed exactly from the integrals so that the
    # cancellation among origin monomials on far-out intervals costs nothing
    dt_exact = _holonomy_exact(f, loc)
    mu = _recentre(loc.c, loc.eta)
    aq = [Fraction(v) for v in f.coeffs]
    n = f.k + 1
    ga = [sum(aq[i] * mu[i + l] for i in range(n)) for l in range(n)]
    lhs = [math.factorial(l) * dt_exact[l] / 2 for l in range(n)]
    G = _hankel(mu)
    dtheta = np.array([float(v) for v in dt_exact])
    dtheta_gram = np.array([float(2 * v / math.factorial(l)) for l, v in enumerate(ga)])
    scale = np.abs(G) @ np.abs(a)
    gram_res = max(float(abs(lhs[l] - ga[l])) / (scale[l] if scale[l] > 0 else 1.0)
                   for l in range(n))
    if gram_res > GRAM_TOL:
        raise InconsistentComputation(
            f"quadrature holonomy and G a disagree (relative residual {gram_res:.3e})")

    s_exact = sum(math.factorial(i) * aq[i] * dt_exact[i] for i in range(n))
    ident = float(Fraction(L) - Fraction(Pi) - s_exact)
    if abs(ident) > IDENTITY_TOL * L:
        raise InconsistentComputation(f"L - Pi - sum i! a_i dtheta_i = {ident:.3e}")

    if not lam > 0:
        raise InconsistentComputation(f"Gram matrix not positive definite (lambda_min={lam})")
    # |i! dtheta_i / 2|_2 = |G a|_2 >= lambda_min |a|_2, and the max norm is at least |.|_2 / sqrt(k + 1)
    margin = float(2.0 * lam * np.linalg.norm(a) / (math.sqrt(n) * fact.max()))
    biggest = float(np.max(np.abs(dtheta)))
    if biggest == 0.0 or biggest < margin * (1.0 - 1e-6):
        raise InconsistentComputation(
            f"max |dtheta| = {biggest:.3e} is below the Gram lower bound {margin:.3e}")

    return PeriodReport(
        coefficients=f.coeffs,
        interval=(I.lo, I.hi),
        L=float(L),
        Pi=float(Pi),
        delta_theta=tuple(float(v) for v in dtheta),
        delta_theta_gram=tuple(float(v) for v in dtheta_gram),
        gram=tuple(tuple(float(v) for v in row) for row in G),
        lambda_min=float(lam),
        margin=margin,
        identity_residual=ident,
        gram_residual=gram_res,
        verdict=Verdict.NOT_PERIODIC,
    )


def perturbed_interval(f: Polynomial, ref: HillInterval) -> HillInterval:
    """The x-periodic Hill interval of ``f`` continuing ``ref``, or PerturbationLeavesClass."""
    try:
        h = nearest_interval(f, ref)
    except NoHillInterval as exc:
        raise PerturbationLeavesClass(str(exc)) from exc
    moved = abs(h.lo - ref.lo) + abs(h.hi - ref.hi)
    if h.geo_class is not GeoClass.X_PERIODIC or moved > 0.5 * ref.width:
        raise PerturbationLeavesClass(
            f"perturbation moved the Hill interval [{ref.lo}, {ref.hi}] to "
            f"[{h.lo}, {h.hi}] ({h.geo_class.value})")
    return h


def dPi_da(f: Polynomial, I: HillInterval, i: int, eps: float = 1e-5,
           spec: QuadratureSpec = CERT_SPEC) -> float:
    """-dPi/da_i by central differences; should equal i! dtheta_i.

    The step in a_i is eps / max(1, |x|)^i over I, so F itself moves by at
    most eps and intervals far from the origin stay in place.
    """
    _require_x_periodic(I)
    if eps <= 0:
        raise ValueError("finite-difference step must be positive")
    if not 0 <= i <= f.k:
        raise IndexError(f"coefficient index {i} outside 0..{f.k}")
    step = eps / max(1.0, abs(I.lo), abs(I.hi)) ** i
    vals = []
    for sgn in (1.0, -1.0):
        c = list(f.coeffs)
        c[i] += sgn * step
        fp = Polynomial(tuple(c))
        vals.append(adiabatic_invariant(fp, perturbed_interval(fp, I), spec))
    return -(vals[0] - vals[1]) / (2.0 * step)
