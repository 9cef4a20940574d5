"""Critical dimensions and earlier bounds over a grid of (p, alpha, beta)."""

import argparse

from llab.critdim import critical_dimension
from llab.errors import BracketError, NoRootError
from llab.params import Exponents


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", default="1.5,2,3,5,9,17")
    ap.add_argument("--alpha", default="0,1.5")
    ap.add_argument("--beta", default="0,0.5,2")
    args = ap.parse_args()
    vals = lambda s: [float(x) for x in s.split(",")]
    print(f"{'p':>6} {'alpha':>6} {'beta':>6} {'n_crit':>14} {'cowan':>10} {'fazly':>10}")
    for p in vals(args.p):
        for a in vals(args.alpha):
            for b in vals(args.beta):
                try:
                    r = critical_dimension(Exponents(p, a, b))
                except (BracketError, NoRootError) as exc:
                    print(f"{p:6g} {a:6g} {b:6g} {type(exc).__name__}")
                    continue
                cw, fz = ("-" if x is None else f"{x:.4f}" for x in (r.cowan_bound, r.fazly_bound))
                print(f"{p:6g} {a:6g} {b:6g} {r.root:14.10f} {cw:>10} {fz:>10}")


if __name__ == "__main__":
    main()
