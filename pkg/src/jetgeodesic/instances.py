"""Seeded random level sets with an x-periodic Hill interval."""

from __future__ import annotations

import numpy as np

from .errors import JetGeodesicError
from .hill import HillInterval, first_x_periodic, hill_intervals
from .poly import Polynomial

COEFF_RANGE = 2.0


def random_polynomial(rng: np.random.Generator, degree: int) -> Polynomial:
    return Polynomial(tuple(rng.uniform(-COEFF_RANGE, COEFF_RANGE, degree + 1)))


def x_periodic_interval(f: Polynomial) -> HillInterval | None:
    try:
        return first_x_periodic(hill_intervals(f))
    except JetGeodesicError:
        return None


def random_x_periodic(rng: np.random.Generator, degree: int,
                      max_tries: int = 1000) -> tuple[Polynomial, HillInterval]:
    for _ in range(max_tries):
        f = random_polynomial(rng, degree)
        I = x_periodic_interval(f)
        if I is not None:
            return f, I
    raise RuntimeError(f"no x-periodic instance of degree {degree} in {max_tries} draws")


def suite(seed: int, count: int, degrees=range(1, 9)) -> list[tuple[Polynomial, HillInterval]]:
    """``count`` x-periodic instances cycling through ``degrees``."""
    rng = np.random.default_rng(seed)
    degrees = list(degrees)
    return [random_x_periodic(rng, degrees[n % len(degrees)]) for n in range(count)]
