"""Stability test of the homogeneous singular solution against the bump family."""

import argparse

from llab.critdim import critical_dimension, threshold_functions
from llab.params import SystemParams
from llab.verify import witness_search


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N", type=float, nargs="+", default=[10, 12, 16, 19, 24])
    ap.add_argument("--p", type=float, default=3)
    ap.add_argument("--alpha", type=float, default=0)
    ap.add_argument("--beta", type=float, default=0)
    args = ap.parse_args()
    root = critical_dimension(SystemParams(args.N[0], args.p, args.alpha, args.beta)).root
    print(f"# n_crit = {root:.10f}")
    for N in args.N:
        P = SystemParams(N, args.p, args.alpha, args.beta)
        t = threshold_functions(N, P)
        found, rep = witness_search(P)
        q = rep.rhs / rep.lhs
        print(f"N={N:g} f={t.f:.4f} F={t.F:.4f} witness={found} rhs/lhs={q:.6f}")


if __name__ == "__main__":
    main()
