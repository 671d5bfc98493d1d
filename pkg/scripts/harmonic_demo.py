"""Harmonic level set F = x on J^1: certificate, one period of the flow, figures.

Writes report.json, trajectory.csv, phase.svg and projection.svg to --out.
"""

import argparse
import math
from pathlib import Path

from jetgeodesic import io
from jetgeodesic.action_angle import action_angle_trace, calibration_check
from jetgeodesic.cli import phase_loop
from jetgeodesic.flow import initial_state, integrate
from jetgeodesic.hill import hill_intervals
from jetgeodesic.holonomy import certify
from jetgeodesic.poly import Polynomial


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/harmonic")
    ap.add_argument("--samples", type=int, default=512)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    f = Polynomial((0.0, 1.0))
    (I,) = hill_intervals(f)
    rep = certify(f, I)
    io.write_text(out / "report.json", io.dumps(rep.to_dict()))
    print(f"L = {rep.L:.15f}  (2 pi = {2 * math.pi:.15f})")
    print(f"Pi = {rep.Pi:.15f}  dtheta = {rep.delta_theta}  lambda_min = {rep.lambda_min:.15f}")

    traj = integrate(f, initial_state(f, I), rep.L, n_samples=args.samples)
    io.write_text(out / "trajectory.csv", io.trajectory_csv(traj))
    end = traj.samples[-1]
    print(f"after one period: x = {end.x:.3e}, p_x = {end.p_x:.3e}, theta = {end.thetas}")
    print(f"max energy drift {traj.step_stats.max_energy_drift:.2e}")

    trace = action_angle_trace(f, I, traj)
    print(f"calibration max |dS/dt - 1| = {calibration_check(f, traj, I):.2e}")
    print(f"phi_h gains {trace.phi_h_area[-1] - trace.phi_h_area[0]:.12f} over the loop")

    xs, ps = phase_loop(f, I)
    io.write_text(out / "phase.svg", io.svg_plot([(xs, ps)], "phase loop, F = x", "x", "p_x"))
    io.write_text(out / "projection.svg",
                  io.svg_plot([(traj.x, traj.thetas[:, 0])], "(x, theta_0) projection", "x", "theta_0"))
    print(f"wrote {out}/")


if __name__ == "__main__":
    main()
