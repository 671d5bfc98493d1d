"""Certificates on a seeded random suite, summarised by degree.

Prints, per degree, the smallest lambda_min, the worst relative identity and
Gram residuals, and the worst certification margin.  Optionally writes a
scatter of log10 lambda_min against interval width.
"""

import argparse
import math
import time
from collections import defaultdict

import numpy as np

from jetgeodesic import io
from jetgeodesic.holonomy import certify
from jetgeodesic.instances import suite


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--count", type=int, default=200)
    ap.add_argument("--svg", help="write a lambda_min scatter here")
    args = ap.parse_args()

    t0 = time.perf_counter()
    rows = defaultdict(list)
    widths, lams = [], []
    for f, I in suite(args.seed, args.count):
        r = certify(f, I)
        rows[f.degree()].append((r.lambda_min, abs(r.identity_residual) / r.L, r.gram_residual, r.margin))
        widths.append(I.width)
        lams.append(r.lambda_min)
    elapsed = time.perf_counter() - t0

    print(f"{'deg':>3} {'n':>4} {'min lambda_min':>15} {'max ident/L':>12} {'max gram res':>12} {'min margin':>12}")
    for d in sorted(rows):
        a = np.array(rows[d])
        print(f"{d:>3} {len(a):>4} {a[:, 0].min():>15.3e} {a[:, 1].max():>12.2e} "
              f"{a[:, 2].max():>12.2e} {a[:, 3].min():>12.3e}")
    print(f"{args.count} certificates in {elapsed:.1f} s")

    if args.svg:
        pts = (np.log10(widths), np.log10(lams))
        order = np.argsort(pts[0])
        svg = io.svg_plot([(pts[0][order], pts[1][order])], "smallest Gram eigenvalue vs interval width",
                          "log10 width", "log10 lambda_min")
        io.write_text(args.svg, svg)
        print(f"wrote {args.svg}")
    return 0 if all(math.isfinite(v) and v > 0 for v in lams) else 1


if __name__ == "__main__":
    raise SystemExit(main())
