"""Shoot a radial solution and tabulate M(r), dM/dr and the lower bound."""

import argparse

import numpy as np

from llab.fields import log_grid, shoot
from llab.functionals import monotonicity_curve
from llab.params import SystemParams


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N", type=float, default=12)
    ap.add_argument("--p", type=float, default=3)
    ap.add_argument("--alpha", type=float, default=0)
    ap.add_argument("--beta", type=float, default=0)
    ap.add_argument("--a", type=float, default=1.0)
    ap.add_argument("--b", type=float, default=0.1)
    ap.add_argument("--r-max", type=float, default=10.0)
    ap.add_argument("--points", type=int, default=4001)
    ap.add_argument("--rows", type=int, default=20)
    args = ap.parse_args()
    P = SystemParams(args.N, args.p, args.alpha, args.beta)
    res = shoot(P, args.a, args.b, log_grid(1e-3, args.r_max, args.points))
    print(f"# terminated={res.terminated} r_end={res.termination_radius:.6g}")
    rep = monotonicity_curve(res.field)
    ok = np.isfinite(rep.dMdr)
    idx = np.flatnonzero(ok)[:: max(1, ok.sum() // args.rows)]
    print(f"{'r':>12} {'M':>16} {'dM/dr':>16} {'bound':>16}")
    for i in idx:
        print(f"{rep.radii[i]:12.5e} {rep.M[i]:16.8e} {rep.dMdr[i]:16.8e} {rep.rhs_bound[i]:16.8e}")
    slack = rep.dMdr[ok] - rep.rhs_bound[ok]
    print(f"# min(dM/dr - bound) = {slack.min():.6e}")


if __name__ == "__main__":
    main()
