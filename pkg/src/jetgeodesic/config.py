"""Scenario configuration files (JSON)."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ConfigError
from .poly import Polynomial
from .quadrature import QuadratureSpec

MIN_SAMPLES_PER_PERIOD = 16
DEFAULT_SWEEP_DEGREE = 8


@dataclass(frozen=True)
class ScenarioConfig:
    """One level set F = sum a_i x^i on J^k plus numerical settings.

    ``coefficients`` may be omitted for sweeps, where ``k`` is the largest
    random degree.  ``quadrature`` of None means the certification default.
    """
    k: int
    coefficients: tuple[float, ...] | None = None
    interval_hint: tuple[float, float] | None = None
    quadrature: QuadratureSpec | None = None
    ode_tol: float = 1e-10
    samples_per_period: int = 512
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 0:
            raise ConfigError(f"k must be a nonnegative integer, got {self.k!r}")
        if self.coefficients is not None:
            if len(self.coefficients) != self.k + 1:
                raise ConfigError(
                    f"expected k + 1 = {self.k + 1} coefficients, got {len(self.coefficients)}")
            if not all(math.isfinite(c) for c in self.coefficients):
                raise ConfigError("coefficients must be finite")
        if self.interval_hint is not None:
            lo, hi = self.interval_hint
            if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
                raise ConfigError(f"interval_hint must be finite with lo <= hi, got {self.interval_hint}")
        if not (self.ode_tol > 0 and math.isfinite(self.ode_tol)):
            raise ConfigError("ode_tol must be positive")
        if self.samples_per_period < MIN_SAMPLES_PER_PERIOD:
            raise ConfigError(f"samples_per_period must be at least {MIN_SAMPLES_PER_PERIOD}")

    @property
    def polynomial(self) -> Polynomial:
        if self.coefficients is None:
            raise ConfigError("config has no coefficients")
        return Polynomial(self.coefficients)

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        try:
            coeffs = d.get("coefficients")
            if coeffs is not None:
                coeffs = tuple(_real(v, "coefficients") for v in coeffs)
            k = d.get("k")
            if k is None:
                k = len(coeffs) - 1 if coeffs is not None else DEFAULT_SWEEP_DEGREE
            if isinstance(k, bool) or not isinstance(k, int):
                raise ConfigError(f"k must be an integer, got {k!r}")
            hint = d.get("interval_hint")
            if hint is not None:
                if len(hint) != 2:
                    raise ConfigError("interval_hint must be [lo, hi]")
                hint = (_real(hint[0], "interval_hint"), _real(hint[1], "interval_hint"))
            quad = d.get("quadrature")
            if quad is not None:
                quad = QuadratureSpec(**quad)
            return cls(
                k=k,
                coefficients=coeffs,
                interval_hint=hint,
                quadrature=quad,
                ode_tol=_real(d.get("ode_tol", 1e-10), "ode_tol"),
                samples_per_period=_int(d.get("samples_per_period", 512), "samples_per_period"),
                seed=_int(d.get("seed", 0), "seed"),
            )
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"malformed config: {exc}") from exc

    @classmethod
    def load(cls, path) -> "ScenarioConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(d)


def _real(v, name: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{name} must be numeric, got {v!r}")
    return float(v)


def _int(v, name: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{name} must be an integer, got {v!r}")
    return v
