"""How the one-period flow checks depend on the ODE tolerance.

For each tolerance, integrates one x-period from three on-shell starts on
every instance of a seeded suite and reports the worst return error in x and
p_x, the worst holonomy mismatch against quadrature, the worst energy drift
and the spread of the holonomy across starts.
"""

import argparse
import time

import numpy as np

from jetgeodesic.flow import initial_state, integrate
from jetgeodesic.holonomy import holonomy, period
from jetgeodesic.instances import suite


def one_period_errors(f, I, tol):
    L = period(f, I)
    dt = holonomy(f, I)
    starts = [initial_state(f, I),
              initial_state(f, I, x0=I.lo + 0.3 * I.width, direction=1),
              initial_state(f, I, x0=I.lo + 0.7 * I.width, direction=-1)]
    w = np.zeros(5)
    incs = []
    for s0 in starts:
        tr = integrate(f, s0, L, tol=tol, n_samples=2)
        e = tr.samples[-1]
        inc = np.array(e.thetas) - np.array(s0.thetas)
        incs.append(inc)
        w[:4] = np.maximum(w[:4], [abs(e.x - s0.x), abs(e.p_x - s0.p_x),
                                   np.max(np.abs(inc - dt)), tr.step_stats.max_energy_drift])
    w[4] = max(np.max(np.abs(incs[0] - v)) for v in incs[1:])
    return w


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--count", type=int, default=100)
    ap.add_argument("--tols", type=float, nargs="+", default=[1e-8, 1e-10, 1e-12])
    args = ap.parse_args()
    cases = suite(args.seed, args.count)
    print(f"{'tol':>8} {'x':>9} {'p_x':>9} {'dtheta':>9} {'drift':>9} {'spread':>9} {'>1e-6':>6} {'sec':>6}")
    for tol in args.tols:
        t0 = time.perf_counter()
        errs = np.array([one_period_errors(f, I, tol) for f, I in cases])
        bad = int(np.sum(np.any(errs > [1e-6, 1e-6, 1e-6, 1e-8, 1e-6], axis=1)))
        w = errs.max(axis=0)
        print(f"{tol:>8.0e} " + " ".join(f"{v:>9.2e}" for v in w) + f" {bad:>6} {time.perf_counter() - t0:>6.1f}")


if __name__ == "__main__":
    main()
