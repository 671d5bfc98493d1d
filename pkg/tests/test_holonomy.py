import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jetgeodesic.errors import CriticalEndpoint
from jetgeodesic.hill import hill_intervals
from jetgeodesic.holonomy import (PeriodReport, Verdict, adiabatic_invariant, certify, dPi_da,
                                  gram_lambda_min, gram_matrix, holonomy, moments, period)
from jetgeodesic.instances import suite
from jetgeodesic.poly import Polynomial, translate

from .oracles import mp_hill_integral

PI = math.pi
INSTANCES = suite(seed=19, count=40)


def intervals(f):
    return hill_intervals(f)


def test_period_examples(harmonic):
    f, I = harmonic
    assert period(f, I) == pytest.approx(2 * PI, rel=1e-12)
    g = Polynomial((0.0, 0.5))
    assert period(g, intervals(g)[0]) == pytest.approx(4 * PI, rel=1e-12)
    q = Polynomial((-1.0, 0.0, 2.0))
    with pytest.raises(CriticalEndpoint):
        period(q, intervals(q)[1])


def test_holonomy_and_area_examples(harmonic):
    f, I = harmonic
    dt = holonomy(f, I)
    assert abs(dt[0]) < 1e-12 and dt[1] == pytest.approx(PI, rel=1e-12)
    assert adiabatic_invariant(f, I) == pytest.approx(PI, rel=1e-12)
    q = Polynomial((-1.0, 0.0, 2.0))
    assert adiabatic_invariant(q, intervals(q)[1]) == pytest.approx(4 / 3, rel=1e-10)


def test_shifted_identity_against_oracle():
    f = Polynomial((-1.0, 1.0))
    (I,) = intervals(f)
    dt = holonomy(f, I)
    assert (I.lo, I.hi) == (0.0, 2.0)
    assert abs(dt[0]) < 1e-12
    assert dt[1] == pytest.approx(PI, abs=1e-12)  # u = x - 1 turns it into 2 int u^2 / sqrt(1 - u^2)
    rep = certify(f, I)
    assert abs(rep.identity_residual) <= 1e-8 * rep.L


@pytest.mark.parametrize("f,I", INSTANCES[:6])
def test_holonomy_against_oracle(f, I):
    dt = holonomy(f, I)
    L = period(f, I)
    for i in sorted({0, 1, f.k}):
        ref = 2 * mp_hill_integral(f.coeffs, I.lo, I.hi, lambda x, fx: x**i * fx) / math.factorial(i)
        assert dt[i] == pytest.approx(ref, rel=1e-10, abs=1e-12 * L)


def test_odd_symmetry_kills_dtheta0():
    f = Polynomial((0.0, 0.7, 0.0, 0.2))  # odd, interval symmetric
    I = [h for h in intervals(f) if h.lo < 0 < h.hi][0]
    assert abs(holonomy(f, I)[0]) < 1e-12


def test_gram_examples(harmonic):
    f, I = harmonic
    G = gram_matrix(f, I)
    assert np.allclose(G, [[PI, 0], [0, PI / 2]], rtol=1e-12, atol=1e-14)
    assert gram_lambda_min(f, I) == pytest.approx(PI / 2, rel=1e-12)
    for g, J in INSTANCES[:5]:
        G = gram_matrix(g, J)
        assert G[0, 0] == pytest.approx(period(g, J) / 2, rel=1e-12)
        assert np.array_equal(G, G.T)


def test_moments_are_hankel_entries(harmonic):
    f, I = harmonic
    mu = moments(f, I, 5)
    assert np.allclose(mu, [PI, 0, PI / 2, 0, 3 * PI / 8], atol=1e-13)


@pytest.mark.parametrize("f,I", INSTANCES[:8])
def test_lambda_min_matches_dense_solver_when_well_conditioned(f, I):
    G = gram_matrix(f, I)
    lam = gram_lambda_min(f, I)
    ev = np.linalg.eigvalsh(G)
    if ev[0] > 0 and ev[-1] / ev[0] < 1e8:
        assert lam == pytest.approx(ev[0], rel=1e-6)
    assert lam > 0


def test_certify_harmonic(harmonic):
    f, I = harmonic
    r = certify(f, I)
    assert r.L == pytest.approx(2 * PI, rel=1e-12)
    assert r.Pi == pytest.approx(PI, rel=1e-12)
    assert r.delta_theta[1] == pytest.approx(PI, rel=1e-12)
    assert r.lambda_min == pytest.approx(PI / 2, rel=1e-12)
    assert abs(r.identity_residual) < 1e-12
    assert r.verdict is Verdict.NOT_PERIODIC


def test_certify_degenerate_and_critical():
    c = Polynomial((0.3,))
    assert certify(c, intervals(c)[0]).verdict is Verdict.DEGENERATE_INPUT
    q = Polynomial((-1.0, 0.0, 2.0))
    for h in intervals(q):
        with pytest.raises(CriticalEndpoint):
            certify(q, h)


@given(st.sampled_from(INSTANCES))
@settings(max_examples=25)
def test_certificate_invariants(inst):
    f, I = inst
    r = certify(f, I)
    fact = np.array([math.factorial(i) for i in range(f.k + 1)])
    a = np.array(f.coeffs)
    G = np.array(r.gram)
    assert np.array_equal(G, G.T)
    assert r.lambda_min > 0
    assert abs(r.identity_residual) <= 1e-8 * r.L
    ga = G @ a
    scale = np.abs(G) @ np.abs(a)
    assert np.all(np.abs(fact * np.array(r.delta_theta) / 2 - ga) <= 1e-8 * scale)
    assert max(abs(v) for v in r.delta_theta) >= r.margin * (1 - 1e-6) > 0
    assert r.verdict is Verdict.NOT_PERIODIC


@given(st.sampled_from(INSTANCES[:12]), st.floats(-2, 2))
@settings(max_examples=15)
def test_translation_covariance(inst, c):
    f, I = inst
    g = translate(f, c)
    J = min(intervals(g), key=lambda h: abs(h.lo - I.lo - c) + abs(h.hi - I.hi - c))
    r, s = certify(f, I), certify(g, J)
    assert s.L == pytest.approx(r.L, rel=1e-9)
    assert s.Pi == pytest.approx(r.Pi, rel=1e-9)
    # x -> x + c mixes the monomials: i! dtheta'_i / 2 = sum_j C(i, j) c^(i-j) j! dtheta_j / 2
    half = [math.factorial(j) * v / 2 for j, v in enumerate(r.delta_theta)]
    for i in range(f.k + 1):
        mixed = sum(math.comb(i, j) * c ** (i - j) * half[j] for j in range(i + 1))
        scale = sum(math.comb(i, j) * abs(c) ** (i - j) * r.L * max(1, abs(I.lo), abs(I.hi)) ** j
                    for j in range(i + 1))
        assert abs(math.factorial(i) * s.delta_theta[i] / 2 - mixed) <= 1e-8 * scale


def test_report_roundtrip(harmonic):
    r = certify(*harmonic)
    assert PeriodReport.from_dict(r.to_dict()) == r


def test_dPi_da_examples(harmonic):
    f, I = harmonic
    assert dPi_da(f, I, 1) == pytest.approx(PI, rel=1e-4)
    assert abs(dPi_da(f, I, 0)) < 1e-4
    with pytest.raises(ValueError):
        dPi_da(f, I, 1, eps=0.0)
    with pytest.raises(IndexError):
        dPi_da(f, I, 2)


@pytest.mark.parametrize("f,I", INSTANCES[:6])
def test_dPi_da_matches_holonomy(f, I):
    dt = holonomy(f, I)
    L = period(f, I)
    for i in range(f.k + 1):
        exact = math.factorial(i) * dt[i]
        assert dPi_da(f, I, i) == pytest.approx(exact, rel=1e-4, abs=1e-4 * L)
