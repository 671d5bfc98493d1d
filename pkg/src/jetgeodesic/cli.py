"""Command-line front end.

Exit codes: 0 ok, 1 config, 2 no Hill interval, 3 critical endpoint or
unbounded interval, 4 inconsistent computation, 5 integrator failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import io
from .config import DEFAULT_SWEEP_DEGREE, ScenarioConfig
from .errors import ConfigError, CriticalEndpoint, JetGeodesicError
from .flow import State, initial_state, integrate
from .hill import EndpointKind, GeoClass, HillInterval, classify_loop, first_x_periodic, hill_intervals
from .holonomy import CERT_SPEC, certify, period
from .instances import COEFF_RANGE, x_periodic_interval
from .poly import Polynomial
from .quadrature import QuadratureSpec, Radicand


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # usage errors are config errors (exit 1), not the no-Hill code 2
        self.print_usage(sys.stderr)
        self.exit(ConfigError.exit_code, f"{self.prog}: error: {message}\n")


def _interval_dict(h: HillInterval) -> dict:
    d = {
        "lo": h.lo,
        "hi": h.hi,
        "lo_kind": h.lo_kind.value,
        "hi_kind": h.hi_kind.value,
        "geo_class": h.geo_class.value,
    }
    if h.bounded:
        d["loop"] = classify_loop(h).value
    return d


def select_interval(cfg: ScenarioConfig, f: Polynomial | None = None) -> HillInterval:
    """Interval closest to the hint, else the first x-periodic one, else the first one."""
    f = f if f is not None else cfg.polynomial
    hs = hill_intervals(f)
    if cfg.interval_hint is not None:
        lo, hi = cfg.interval_hint
        overlapping = [h for h in hs if h.lo <= hi and lo <= h.hi]
        if not overlapping:
            raise ConfigError(f"interval_hint [{lo}, {hi}] meets no Hill interval")
        return min(overlapping, key=lambda h: abs(h.lo - lo) + abs(h.hi - hi))
    return first_x_periodic(hs) or hs[0]


def _emit(text: str, out) -> None:
    if out:
        io.write_text(out, text)
    else:
        sys.stdout.write(text)


def cmd_hill(cfg: ScenarioConfig, out=None) -> dict:
    f = cfg.polynomial
    hs = hill_intervals(f)
    for h in hs:
        print(f"[{h.lo!r}, {h.hi!r}]  lo={h.lo_kind.value}  hi={h.hi_kind.value}  {h.geo_class.value}")
    report = {"coefficients": list(f.coeffs), "intervals": [_interval_dict(h) for h in hs]}
    if out:
        io.write_text(out, io.dumps(report))
    return report


def _spec(cfg: ScenarioConfig, tol: float | None) -> QuadratureSpec:
    spec = cfg.quadrature or CERT_SPEC
    if tol is not None:
        spec = QuadratureSpec(tol, min(spec.abs_tol, tol), spec.max_level)
    return spec


def cmd_certify(cfg: ScenarioConfig, out=None, tol: float | None = None) -> dict:
    f = cfg.polynomial
    rep = certify(f, select_interval(cfg, f), _spec(cfg, tol)).to_dict()
    _emit(io.dumps(rep), out)
    return rep


def default_start(f: Polynomial, h: HillInterval) -> State:
    """Left endpoint at rest; lines start at x = 0 moving right; critical ends are avoided."""
    k1 = f.k + 1
    if h.geo_class is GeoClass.HORIZONTAL_LINE:
        return State(0.0, 0.0, math.sqrt(1.0 - f.coeffs[0] ** 2), (0.0,) * k1)
    if h.geo_class is GeoClass.ABNORMAL_POINT:
        return State(0.0, h.lo, 0.0, (0.0,) * k1)
    if h.lo_kind is EndpointKind.REGULAR:
        return initial_state(f, h)
    if h.hi_kind is EndpointKind.REGULAR:
        return State(0.0, h.hi, 0.0, (0.0,) * k1)
    return initial_state(f, h, x0=h.midpoint, direction=1)


def _trajectory(cfg: ScenarioConfig, t_end: float | None, tol: float | None, periods: float = 1.0):
    f = cfg.polynomial
    h = select_interval(cfg, f)
    L = period(f, h) if h.geo_class is GeoClass.X_PERIODIC else None
    if t_end is None:
        if L is None:
            raise ConfigError(f"{h.geo_class.value} interval has no period; pass --t-end")
        t_end = periods * L
    if t_end < 0 or not math.isfinite(t_end):
        raise ConfigError("--t-end must be finite and nonnegative")
    per = t_end / L if L else 1.0
    n = max(2, math.ceil(cfg.samples_per_period * per - 1e-9))
    traj = integrate(f, default_start(f, h), t_end, tol=tol or cfg.ode_tol, n_samples=n)
    return f, h, traj


def cmd_geodesic(cfg: ScenarioConfig, t_end=None, out=None, tol=None):
    _, _, traj = _trajectory(cfg, t_end, tol)
    _emit(io.trajectory_csv(traj), out)
    return traj


def _sweep_instance(args):
    coeffs, = args
    f = Polynomial(coeffs)
    row = {"degree": f.degree()}
    try:
        I = x_periodic_interval(f)
        r = certify(f, I)
    except (JetGeodesicError, ArithmeticError, np.linalg.LinAlgError) as exc:
        row.update(verdict=None, error=f"{type(exc).__name__}: {exc}")
        return row
    row.update(L=r.L, Pi=r.Pi, lambda_min=r.lambda_min, identity_residual=r.identity_residual,
               verdict=r.verdict.value)
    return row


def sweep_polynomials(seed: int, count: int, max_degree: int) -> list[Polynomial]:
    """Degrees uniform in 1..max_degree, coefficients uniform in [-2, 2]."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        d = int(rng.integers(1, max_degree + 1))
        out.append(Polynomial(tuple(float(v) for v in rng.uniform(-COEFF_RANGE, COEFF_RANGE, d + 1))))
    return out


def cmd_sweep(cfg: ScenarioConfig, count: int, seed: int, jobs: int = 1, out=None) -> dict:
    if count < 1:
        raise ConfigError("--count must be at least 1")
    if jobs < 1:
        raise ConfigError("--jobs must be at least 1")
    max_degree = max(1, cfg.k)
    polys = sweep_polynomials(seed, count, max_degree)
    kept = [(n, f) for n, f in enumerate(polys) if x_periodic_interval(f) is not None]
    work = [(f.coeffs,) for _, f in kept]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_sweep_instance, work, chunksize=max(1, len(work) // (4 * jobs))))
    else:
        results = [_sweep_instance(w) for w in work]
    rows = []
    for (n, f), r in zip(kept, results):
        rows.append({"index": n, "coefficients": list(f.coeffs), **r})
    ok = [r for r in rows if r.get("verdict") is not None]
    failed = [r for r in rows if r.get("verdict") is None]
    for r in failed:
        print(f"instance {r['index']}: {r['error']}", file=sys.stderr)
    summary = {
        "seed": seed,
        "count": count,
        "max_degree": max_degree,
        "attempted": count,
        "kept": len(rows),
        "failures": len(failed),
        "aggregate": {
            "min_lambda_min": min((r["lambda_min"] for r in ok), default=None),
            "max_identity_residual": max((abs(r["identity_residual"]) for r in ok), default=None),
            "max_relative_identity_residual": max((abs(r["identity_residual"]) / r["L"] for r in ok),
                                                  default=None),
            "all_not_periodic": all(r["verdict"] == "NotPeriodic" for r in ok),
        },
        "rows": rows,
    }
    _emit(io.dumps(summary), out)
    return summary


def phase_loop(f: Polynomial, h: HillInterval, n: int = 400):
    """Closed polyline of the loop {p_x^2 + F^2 = 1} over I, upper arc then lower arc."""
    if h.geo_class is not GeoClass.X_PERIODIC:
        raise CriticalEndpoint(f"{h.geo_class.value} interval has no smooth loop")
    rad = Radicand(f, h)
    u = 0.5 * (1.0 - np.cos(np.linspace(0.0, math.pi, n)))
    span = rad.hi - rad.lo
    _, _, r = rad(u * span, (1.0 - u) * span)
    p = np.sqrt(np.maximum(r, 0.0))
    x = rad.c + rad.lo + u * span
    xs = np.concatenate([x, x[::-1]])
    ps = np.concatenate([p, -p[::-1]])
    return xs, ps


def cmd_plot(cfg: ScenarioConfig, kind: str, out=None, t_end=None, tol=None) -> str:
    f = cfg.polynomial
    if kind == "phase":
        h = select_interval(cfg, f)
        xs, ps = phase_loop(f, h)
        svg = io.svg_plot([(xs, ps)], f"phase loop on [{h.lo:.6g}, {h.hi:.6g}]", "x", "p_x")
    elif kind == "projection":
        h = select_interval(cfg, f)
        if h.geo_class is not GeoClass.X_PERIODIC:
            print(f"warning: {h.geo_class.value} interval, the projection is an open curve",
                  file=sys.stderr)
            if t_end is None:
                t_end = 10.0
        _, _, traj = _trajectory(cfg, t_end, tol)
        svg = io.svg_plot([(traj.x, traj.thetas[:, 0])], "projection to the (x, theta_0) plane",
                          "x", "theta_0")
    else:
        raise ConfigError(f"unknown plot kind {kind!r}")
    _emit(svg, out)
    return svg


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="jetgeodesic", description="Geodesics on jet space J^k: Hill intervals, "
                "geodesic flow, period and holonomy certificates.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, config_required=True):
        sp.add_argument("--config", required=config_required, help="scenario JSON file")
        sp.add_argument("--out", help="output file (default: stdout)")
        return sp

    common(sub.add_parser("hill", help="list Hill intervals"))
    sp = common(sub.add_parser("certify", help="period report for one x-periodic interval"))
    sp.add_argument("--tol", type=float, help="quadrature relative tolerance")
    sp = common(sub.add_parser("geodesic", help="integrate one geodesic to CSV"))
    sp.add_argument("--t-end", type=float, help="end time (default: one x-period)")
    sp.add_argument("--tol", type=float, help="ODE tolerance")
    sp = common(sub.add_parser("sweep", help="certify seeded random instances"), config_required=False)
    sp.add_argument("--count", type=int, default=100)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--jobs", type=int, default=1)
    sp = common(sub.add_parser("plot", help="SVG of the phase loop or (x, theta_0) projection"))
    sp.add_argument("--kind", choices=("phase", "projection"), default="phase")
    sp.add_argument("--t-end", type=float)
    sp.add_argument("--tol", type=float)
    return p


def run(args) -> int:
    if args.command == "sweep" and args.config is None:
        cfg = ScenarioConfig(k=DEFAULT_SWEEP_DEGREE)
    else:
        cfg = ScenarioConfig.load(args.config)
    if args.command == "hill":
        cmd_hill(cfg, args.out)
    elif args.command == "certify":
        cmd_certify(cfg, args.out, args.tol)
    elif args.command == "geodesic":
        cmd_geodesic(cfg, args.t_end, args.out, args.tol)
    elif args.command == "sweep":
        seed = args.seed if args.seed is not None else cfg.seed
        cmd_sweep(cfg, args.count, seed, args.jobs, args.out)
    elif args.command == "plot":
        cmd_plot(cfg, args.kind, args.out, args.t_end, args.tol)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except JetGeodesicError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
