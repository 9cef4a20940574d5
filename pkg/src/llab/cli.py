"""Command-line entry point: ``llab <subcommand> ...``.

Exit codes: 0 success, 1 failed check or numerical error, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields as dc_fields

from . import critdim as cd
from .errors import BracketError, NoRootError, ParameterError, ParseError, RangeError
from .fields import bump_field, field_to_csv, log_grid, shoot, singular_field
from .functionals import monotonicity_curve
from .params import Exponents, SystemParams, classify_regime, derive

SWEEP_COLUMNS = ("p", "alpha", "beta")
CRITDIM_HEADER = "p,alpha,beta,bracket_lo,bracket_hi,n_crit,cowan,fazly"
SWEEP_HEADER = "p,alpha,beta,N,bracket_lo,bracket_hi,n_crit,cowan,fazly,regime,status"


def fmt(x):
    """17 significant digits, scientific; empty for None."""
    return "" if x is None else f"{x:.16e}"


@dataclass(frozen=True)
class SweepRow:
    p: float
    alpha: float
    beta: float


def parse_sweep(text: str) -> list:
    """Rows of a ``p,alpha,beta`` CSV; '#' lines and blank lines are skipped."""
    rows = []
    header = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        cells = [c.strip() for c in next(csv.reader([line]))]
        if header is None:
            if sorted(cells) != sorted(SWEEP_COLUMNS):
                missing = [c for c in SWEEP_COLUMNS if c not in cells] or cells
                raise ParseError(lineno, missing[0], f"header must name p,alpha,beta, got {line!r}")
            header = cells
            continue
        if len(cells) != len(header):
            col = header[min(len(cells), len(header) - 1)]
            raise ParseError(lineno, col, f"expected {len(header)} fields, got {len(cells)}")
        values = {}
        for name, cell in zip(header, cells):
            try:
                v = float(cell)
            except ValueError:
                raise ParseError(lineno, name, f"not a number: {cell!r}") from None
            if not math.isfinite(v):
                raise ParseError(lineno, name, f"not finite: {cell!r}")
            values[name] = v
        for name, ok, rule in (("p", values["p"] > 1, "p must exceed 1"),
                               ("alpha", values["alpha"] > -4, "alpha must exceed -4"),
                               ("beta", values["beta"] >= 0, "beta must be nonnegative")):
            if not ok:
                raise ParseError(lineno, name, f"{rule}, got {values[name]!r}")
        rows.append(SweepRow(values["p"], values["alpha"], values["beta"]))
    if header is None:
        raise ParseError(1, "p", "missing header p,alpha,beta")
    return rows


def _critdim_cells(e, tol=1e-12):
    res = cd.critical_dimension(e, tol)
    return res, [fmt(res.bracket_lo), fmt(res.bracket_hi), fmt(res.root), fmt(res.cowan_bound),
                 fmt(res.fazly_bound)]


def _sweep_task(args):
    """One input row times all N values, as finished CSV lines."""
    (p, alpha, beta), n_values = args
    e = Exponents(p, alpha, beta)
    lead = [fmt(p), fmt(alpha), fmt(beta)]
    try:
        res, cells = _critdim_cells(e)
        status = "ok"
    except (BracketError, NoRootError) as exc:
        res, cells, status = None, [""] * 5, type(exc).__name__
    if not n_values:
        return [",".join(lead + [""] + cells + ["", status])]
    lines = []
    for N in n_values:
        regime, row_status = "", status
        if res is not None:
            try:
                regime = str(classify_regime(SystemParams(N, p, alpha, beta), res.root))
            except ParameterError:
                row_status = "ParameterError"
        lines.append(",".join(lead + [fmt(N)] + cells + [regime, row_status]))
    return lines


def _jobs(value):
    if value is None:
        value = os.environ.get("LLAB_JOBS", "1")
    try:
        jobs = int(value)
    except ValueError:
        raise ParseError(0, "--jobs", f"not an integer: {value!r}") from None
    if jobs < 1:
        raise ParseError(0, "--jobs", "must be at least 1")
    return jobs


def cmd_sweep(args, out):
    with open(args.input, encoding="utf-8") as fh:
        rows = parse_sweep(fh.read())
    n_values = []
    if args.n_values:
        for item in args.n_values.split(","):
            try:
                n_values.append(float(item))
            except ValueError:
                raise ParseError(0, "--n-values", f"not a number: {item!r}") from None
    jobs = _jobs(args.jobs)
    tasks = [((r.p, r.alpha, r.beta), n_values) for r in rows]
    if jobs == 1:
        results = [_sweep_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_task, tasks))  # map keeps input order
    with open(args.output, "w", encoding="utf-8", newline="") as fh:
        fh.write(SWEEP_HEADER + "\n")
        for lines in results:
            for line in lines:
                fh.write(line + "\n")
    print(f"wrote {sum(len(x) for x in results)} rows to {args.output}", file=out)
    return 0


def cmd_critdim(args, out):
    e = Exponents(args.p, args.alpha, args.beta)
    _, cells = _critdim_cells(e, args.tol)
    print(CRITDIM_HEADER, file=out)
    print(",".join([fmt(args.p), fmt(args.alpha), fmt(args.beta)] + cells), file=out)
    return 0


def cmd_classify(args, out):
    P = SystemParams(args.N, args.p, args.alpha, args.beta)
    root = cd.critical_dimension(P).root
    print(classify_regime(P, root), file=out)
    print(f"n_crit,{fmt(root)}", file=out)
    d = derive(P)
    for f in dc_fields(d):
        print(f"{f.name},{fmt(getattr(d, f.name))}", file=out)
    return 0


def _parse_modes(text):
    """``k:amplitude:center:width`` entries separated by ';'."""
    modes = []
    for item in text.split(";"):
        if not item.strip():
            continue
        parts = item.split(":")
        if len(parts) != 4:
            raise ParseError(0, "--modes", f"expected k:amplitude:center:width, got {item!r}")
        try:
            modes.append((int(parts[0]), float(parts[1]), float(parts[2]), float(parts[3])))
        except ValueError:
            raise ParseError(0, "--modes", f"bad number in {item!r}") from None
    return modes


def _params(args):
    return SystemParams(args.N, args.p, args.alpha, args.beta)


def cmd_monotone(args, out):
    P = _params(args)
    grid = log_grid(args.r_min, args.r_max, args.points)
    meta = [f"field={args.field}"]
    if args.field == "singular":
        field = singular_field(P, grid)
    elif args.field == "bump":
        field = bump_field(_parse_modes(args.modes), P, grid)
    else:
        res = shoot(P, args.a, args.b, grid)
        field = res.field
        meta.append(f"terminated={res.terminated} termination_radius={fmt(res.termination_radius)}")
    rep = monotonicity_curve(field)
    text = "".join(f"# {m}\n" for m in meta) + rep.to_csv()
    _write(args.out, text, out)
    return 0


def cmd_shoot(args, out):
    P = _params(args)
    res = shoot(P, args.a, args.b, log_grid(args.r_min, args.r_max, args.points))
    comment = f"terminated={res.terminated} termination_radius={fmt(res.termination_radius)}"
    _write(args.out, field_to_csv(res.field, [comment]), out)
    print(comment, file=out)
    return 0


def cmd_verify(args, out):
    from .verify import run_all

    results = run_all(args.quick, out=lambda s: print(s, file=out, flush=True))
    return 0 if all(r.passed for r in results) else 1


def _write(path, text, out):
    if path in (None, "-"):
        out.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def build_parser():
    ap = argparse.ArgumentParser(prog="llab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def exps(p, with_N=False):
        if with_N:
            p.add_argument("--N", type=float, required=True)
        p.add_argument("--p", type=float, required=True)
        p.add_argument("--alpha", type=float, required=True)
        p.add_argument("--beta", type=float, required=True)

    p = sub.add_parser("critdim", help="critical dimension for (p, alpha, beta)")
    exps(p)
    p.add_argument("--tol", type=float, default=1e-12)
    p.set_defaults(func=cmd_critdim)

    p = sub.add_parser("classify", help="dimension regime and derived constants")
    exps(p, True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("monotone", help="M(r) curve as CSV")
    exps(p, True)
    p.add_argument("--field", choices=("singular", "bump", "shoot"), required=True)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--b", type=float, default=0.1)
    p.add_argument("--modes", default="0:1:1:0.5", help="k:amplitude:center:width;...")
    p.add_argument("--r-min", type=float, default=1e-3)
    p.add_argument("--r-max", type=float, default=2.0)
    p.add_argument("--points", type=int, default=2001)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_monotone)

    p = sub.add_parser("shoot", help="radial solution from u(0)=a, v(0)=b")
    exps(p, True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--r-max", type=float, required=True)
    p.add_argument("--r-min", type=float, default=1e-3)
    p.add_argument("--points", type=int, default=2001)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_shoot)

    p = sub.add_parser("verify", help="run the numerical check suite")
    p.add_argument("--quick", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="critical dimensions for every row of a CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--n-values", default="")
    p.add_argument("--jobs", default=None, help="worker processes (default $LLAB_JOBS or 1)")
    p.set_defaults(func=cmd_sweep)
    return ap


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        return args.func(args, out)
    except (ParseError, ParameterError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (BracketError, NoRootError, RangeError, ArithmeticError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
