"""Polynomials in ascending-coefficient form and real-root isolation.

Root isolation runs on an exact rational copy of the float coefficients:
Sturm sequences are built with :class:`fractions.Fraction` arithmetic and
evaluated exactly at dyadic points, so the root *counts* are never subject
to rounding.  Only the final polish is done in binary64.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import IdenticallyZero, NoConvergence

SIMPLE_TOL = 1e-8
RESIDUAL_TOL = 1e-14


@dataclass(frozen=True)
class Polynomial:
    """F(x) = sum_i coeffs[i] * x**i on J^k, with k = len(coeffs) - 1.

    Trailing zeros are kept: a polynomial of degree < k is still a valid
    level set on J^k.
    """

    coeffs: tuple[float, ...]

    def __post_init__(self):
        c = tuple(float(v) for v in self.coeffs)
        if len(c) == 0:
            raise ValueError("a polynomial needs at least one coefficient")
        if not all(math.isfinite(v) for v in c):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_roots(cls, roots: Sequence[float], lead: float = 1.0) -> "Polynomial":
        c = np.polynomial.polynomial.polyfromroots(roots) * lead
        return cls(tuple(c))

    @property
    def k(self) -> int:
        return len(self.coeffs) - 1

    def degree(self) -> int:
        """Largest i with a nonzero coefficient; -1 for the zero polynomial."""
        for i in range(self.k, -1, -1):
            if self.coeffs[i] != 0.0:
                return i
        return -1

    def is_zero(self) -> bool:
        return self.degree() < 0

    def is_constant(self) -> bool:
        return self.degree() <= 0

    def __call__(self, x):
        return horner(self.coeffs, x)

    def derivative(self) -> "Polynomial":
        return derivative(self)

    def translate(self, x0: float) -> "Polynomial":
        return translate(self, x0)

    def scale(self, x=1.0):
        """sum_i |a_i| max(1, |x|)**i, the magnitude Horner's rule works against."""
        m = np.maximum(1.0, np.abs(x))
        return horner(tuple(abs(c) for c in self.coeffs), m)

    def __add__(self, other: "Polynomial") -> "Polynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = np.zeros(n)
        a[: len(self.coeffs)] += self.coeffs
        a[: len(other.coeffs)] += other.coeffs
        return Polynomial(tuple(a))

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial(tuple(np.convolve(self.coeffs, other.coeffs)))

    def __neg__(self) -> "Polynomial":
        return Polynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)


def horner(coeffs: Sequence[float], x):
    x = np.asarray(x, dtype=float) if not isinstance(x, float) else x
    acc = 0.0 * x
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def eval_poly(f: Polynomial, x: float) -> float:
    return horner(f.coeffs, x)


def derivative(f: Polynomial) -> Polynomial:
    if f.k == 0:
        return Polynomial((0.0,))
    return Polynomial(tuple(i * f.coeffs[i] for i in range(1, f.k + 1)))


def translate(f: Polynomial, x0: float) -> Polynomial:
    """Coefficients of F(x - x0), same degree bound.

    The binomial expansion is carried out exactly in rationals and rounded
    once, so each coefficient is correct to half an ulp even when the
    a_i x0^i terms cancel heavily.
    """
    if x0 == 0.0:
        return f
    shift = -Fraction(float(x0))
    a = [Fraction(c) for c in f.coeffs]
    out = []
    for j in range(f.k + 1):
        out.append(float(sum(a[i] * math.comb(i, j) * shift ** (i - j) for i in range(j, f.k + 1))))
    return Polynomial(tuple(out))


def one_minus_square(f: Polynomial) -> Polynomial:
    """Q = 1 - F^2, the radicand of the fundamental equation at h = 1/2."""
    sq = np.convolve(f.coeffs, f.coeffs)
    sq = -sq
    sq[0] += 1.0
    return Polynomial(tuple(sq))


@dataclass(frozen=True)
class Root:
    location: float
    simple: bool


@dataclass(frozen=True)
class RootList:
    roots: tuple[Root, ...]

    def __len__(self):
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)

    def __getitem__(self, i):
        return self.roots[i]

    @property
    def locations(self) -> list[float]:
        return [r.location for r in self.roots]


# ---------------------------------------------------------------------------
# exact polynomial arithmetic (ascending lists of Fraction / int)


def _trim(p: list) -> list:
    while p and p[-1] == 0:
        p.pop()
    return p


def _exact(coeffs: Sequence) -> list[Fraction]:
    return _trim([Fraction(c) for c in coeffs])


def _primitive(p: list) -> list[int]:
    """Integer multiple of p with positive content 1 (sign preserved)."""
    den = 1
    for c in p:
        if isinstance(c, Fraction):
            den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [int(c * den) for c in p]
    g = 0
    for c in ints:
        g = math.gcd(g, c)
    return [c // g for c in ints] if g else ints


def _deriv(p: list[int]) -> list[int]:
    return _primitive([i * p[i] for i in range(1, len(p))]) if len(p) > 1 else []


def _prem(a: list[int], b: list[int]) -> list[int]:
    """Pseudo-remainder with a *positive* multiplier |lc(b)|**(deg a - deg b + 1)."""
    a = list(a)
    lb = b[-1]
    mult = abs(lb)
    sgn = 1 if lb > 0 else -1
    nb = len(b)
    while len(a) >= nb and a:
        c = a[-1] * sgn
        shift = len(a) - nb
        a = [x * mult for x in a]
        for i, bi in enumerate(b):
            a[shift + i] -= c * bi
        a.pop()
        _trim(a)
    return a


def _sign_at(p: list[int], x: Fraction) -> int:
    """Exact sign of an integer polynomial at a rational point."""
    n, d = x.numerator, x.denominator
    deg = len(p) - 1
    acc = p[deg]
    dpow = 1
    for i in range(deg - 1, -1, -1):
        dpow *= d
        acc = acc * n + p[i] * dpow
    return (acc > 0) - (acc < 0)


def _sturm_chain(p: list[int]) -> list[list[int]]:
    chain = [p, _deriv(p)]
    while len(chain[-1]) > 1:
        r = _prem(chain[-2], chain[-1])
        if not r:
            break
        chain.append(_primitive([-c for c in r]))
    return chain


def _variations(chain: list[list[int]], x: Fraction) -> int:
    signs = [s for s in (_sign_at(q, x) for q in chain) if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _exact_div(a: list[int], b: list[int]) -> list[int]:
    """Quotient a / b, known to be exact over the rationals; returned primitive."""
    a = [Fraction(x) for x in a]
    q = [Fraction(0)] * (len(a) - len(b) + 1)
    while len(a) >= len(b) and a:
        c = a[-1] / b[-1]
        shift = len(a) - len(b)
        q[shift] = c
        for i, bi in enumerate(b):
            a[shift + i] -= c * bi
        a.pop()
        _trim(a)
    if a:
        raise ArithmeticError("inexact polynomial division")
    return _primitive(_trim(q))


def _squarefree(p: list[int]) -> list[int]:
    a, b = p, _deriv(p)
    while b:
        r = _prem(a, b)
        a, b = b, (_primitive(r) if r else [])
    if len(a) <= 1:
        return p
    return _exact_div(p, a)


def _cauchy_bound(p: list[int]) -> Fraction:
    lead = abs(p[-1])
    b = 1 + Fraction(max(abs(c) for c in p[:-1]), lead) if len(p) > 1 else Fraction(1)
    # round up to a power of two so bisection points stay dyadic
    e = max(0, b.numerator.bit_length() - b.denominator.bit_length() + 2)
    return Fraction(2**e)


def _isolate(sqf: list[int], rel_width: Fraction = Fraction(1, 2**30)) -> list[tuple[Fraction, Fraction]]:
    """Disjoint intervals (a, b] each holding exactly one root of ``sqf``.

    A degenerate interval with a == b means the root is exactly that rational.
    """
    chain = _sturm_chain(sqf)
    p0 = chain[0]
    bound = _cauchy_bound(sqf)
    lo, hi = -bound, bound
    out = []
    stack = [(lo, hi, _variations(chain, lo), _variations(chain, hi))]
    while stack:
        a, b, va, vb = stack.pop()
        count = va - vb
        if count <= 0:
            continue
        if count == 1:
            if _sign_at(p0, b) == 0:
                out.append((b, b))
                continue
            # shrink exactly until the width is small relative to the location;
            # sign(b) != 0 here, while a may itself be a root found earlier
            sb = _sign_at(p0, b)
            while b - a > rel_width * max(1, abs(a), abs(b)):
                m = (a + b) / 2
                sm = _sign_at(p0, m)
                if sm == 0:
                    a = b = m
                    break
                if sm == sb:
                    b = m
                else:
                    a = m
            out.append((a, b))
            continue
        m = (a + b) / 2
        vm = _variations(chain, m)
        stack.append((m, b, vm, vb))
        stack.append((a, m, va, vm))
    out.sort()
    return out


def _newton_polish(p: np.ndarray, a: float, b: float, sb: int, max_iter: int = 60) -> float:
    """Safeguarded Newton/bisection on a bracket where ``p`` changes sign.

    ``sb`` is the exact sign of p at b.  Float values of p next to the root
    can have the wrong sign, so the bracket is oriented by ``sb`` alone.
    """
    dp = np.polynomial.polynomial.polyder(p)
    x = 0.5 * (a + b)
    for _ in range(max_iter):
        fx = horner(p, x)
        if fx == 0.0:
            return x
        if (fx > 0) == (sb > 0):
            b = x
        else:
            a = x
        d = horner(dp, x)
        step = fx / d if d != 0.0 else np.inf
        xn = x - step
        if not (a < xn < b):
            xn = 0.5 * (a + b)
        if xn == x or abs(xn - x) <= 2.0 * np.finfo(float).eps * abs(x):
            return xn
        x = xn
    return x


_FLOAT_MAX = Fraction(np.finfo(float).max)


def _roots_exact(p: list[Fraction]) -> list[float]:
    """Distinct real roots of an exact polynomial, to binary64 precision."""
    if len(p) <= 1:
        return []
    sqf = _squarefree(_primitive(p))
    big = max(abs(c) for c in sqf)
    pf = np.array([float(Fraction(c, big)) for c in sqf])
    out = []
    for a, b in _isolate(sqf):
        if max(abs(a), abs(b)) > _FLOAT_MAX:
            raise NoConvergence("a root lies outside the floating-point range")
        if a == b:
            out.append(float(a))
        else:
            out.append(_newton_polish(pf, float(a), float(b), _sign_at(sqf, b)))
    return out


def real_roots(q: Polynomial, simple_tol: float = SIMPLE_TOL) -> RootList:
    """All distinct real roots of ``q``, with a simplicity flag.

    A root is flagged simple when ``|q'(r)| > simple_tol * scale(q', r)``.
    """
    p = _exact(q.coeffs)
    if not p:
        raise IdenticallyZero("cannot isolate the roots of the zero polynomial")
    return _classify(q, _roots_exact(p), simple_tol)


def _classify(q: Polynomial, locs: list[float], simple_tol: float) -> RootList:
    dq = derivative(q)
    roots = []
    for r in locs:
        resid = abs(q(r))
        if resid > RESIDUAL_TOL * q.scale(r):
            raise NoConvergence(f"root polish stalled at x={r!r}, |q(x)|={resid:.3e}")
        roots.append(Root(r, bool(abs(dq(r)) > simple_tol * dq.scale(r))))
    return RootList(tuple(roots))


def level_crossings(f: Polynomial, level: float) -> list[float]:
    """Distinct real solutions of F(x) = level, computed on exact coefficients."""
    p = [Fraction(c) for c in f.coeffs]
    p[0] -= Fraction(level)
    p = _trim(p)
    if not p:
        raise IdenticallyZero("F is identically equal to the level")
    return _roots_exact(p)
