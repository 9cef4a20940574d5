"""Registry of the end-to-end numerical checks run by ``llab verify``.

Each check returns a ``CheckResult``; ``quick=True`` trims random sample
counts and grid sizes where that does not change what is being tested.
"""

from __future__ import annotations

import math
import os
import tempfile
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import critdim as cd
from .errors import BracketError
from .fields import bump_field, log_bump_field, log_grid, shoot, singular_field, companion_v
from .functionals import (
    energy_identity_residual,
    hardy_rellich_ratio,
    mode_quadratic,
    monotonicity_curve,
    pohozaev_residual,
    scaling_gap,
    stability_rayleigh,
    system_residual,
)
from .identities import lemma21_check, lemma22_check, random_poly
from .params import Exponents, RegimeTag, SystemParams, classify_regime, derive
from .zonal import eigenvalue

SEED = 20240531

# stability witness search: bumps in r, then bumps in ln r with the
# Rellich-optimal power weight (the r-bumps alone are too localized)
WITNESS_CENTERS = (0.5, 1.0, 2.0, 4.0)
WITNESS_WIDTHS = (0.25, 0.5, 1.0)
WITNESS_LOG_WIDTHS = (1.0, 2.0, 4.0)

SHOT = dict(N=12, p=3, alpha=0, beta=0, a=1.0, b=0.1)


@dataclass(frozen=True)
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'} [{self.number:2d}] {self.name}: {self.detail}"


def _rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def random_exponents(rng, n, p_range=(1.2, 9.0), alpha_range=(-3.5, 4.0), beta_max=3.0):
    out = []
    for _ in range(n):
        out.append(Exponents(float(rng.uniform(*p_range)), float(rng.uniform(*alpha_range)),
                             float(rng.uniform(0, beta_max))))
    return out


def random_singular_params(rng, n):
    """Valid (N, p, α, β) with N-2-λ > 0 and N-4-μ > 0."""
    out = []
    while len(out) < n:
        e = random_exponents(rng, 1)[0]
        N = float(rng.uniform(5, 40))
        if e.beta > (N - 4) / 2 or N - 2 - e.lam <= 0 or N - 4 - e.mu <= 0:
            continue
        out.append(e.with_dimension(N))
    return out


def random_window_params(rng, n):
    """Valid params with 4+β+2λ < N < N_crit."""
    out = []
    while len(out) < n:
        e = random_exponents(rng, 1)[0]
        res = cd.critical_dimension(e)
        lo = max(res.bracket_lo, 5.0, 4 + 2 * e.beta)
        if lo >= res.root:
            continue
        N = float(rng.uniform(lo, res.root))
        if N <= lo or N >= res.root:
            continue
        out.append(e.with_dimension(N))
    return out


def random_bumps(rng, n, k_max=2):
    """Random single- or two-mode bump specs inside [0.03, 10]."""
    specs = []
    for _ in range(n):
        modes = []
        for _ in range(int(rng.integers(1, 3))):
            c = float(rng.uniform(0.3, 5.0))
            modes.append((int(rng.integers(0, k_max + 1)), float(rng.choice([-1, 1]) * rng.uniform(0.1, 2.0)),
                          c, float(rng.uniform(0.05, 0.9) * c)))
        specs.append(modes)
    return specs


def witness_search(params, grid_r=None, grid_log=None):
    """First test function ζ in the documented family with p∫|x|^α|u_Γ|^{p-1}ζ² > ∫|Δζ|²/|x|^β.

    Returns (description, report) or (None, best report seen).
    """
    grid_r = grid_r or log_grid(1e-2, 1e2, 4001)
    grid_log = grid_log or log_grid(1e-3, 1e3, 4001)
    u = singular_field(params, grid_r)
    best = None
    for c in WITNESS_CENTERS:
        for w in WITNESS_WIDTHS:
            if c - w <= grid_r.radii[2]:
                continue  # support reaches the origin, not a compactly supported test function
            rep = stability_rayleigh(u, bump_field([(0, 1.0, c, w)], params, grid_r))
            if rep.lhs > rep.rhs:
                return f"bump c={c} w={w}", rep
            if best is None or rep.rhs / rep.lhs < best.rhs / best.lhs:
                best = rep
    u = singular_field(params, grid_log)
    for L in WITNESS_LOG_WIDTHS:
        rep = stability_rayleigh(u, log_bump_field([(0, 1.0, 1.0, L)], params, grid_log))
        if rep.lhs > rep.rhs:
            return f"log-bump c=1 L={L}", rep
        if rep.rhs / rep.lhs < best.rhs / best.lhs:
            best = rep
    return None, best


# the checks ------------------------------------------------------------------------

def check_endpoint_gaps(quick=False):
    rng = np.random.default_rng(SEED + 1)
    worst = 0.0
    for e in random_exponents(rng, 40 if quick else 200):
        g = cd.endpoint_gaps(e)
        lo, hi = cd.bracket(e)
        tl, th = cd.threshold_functions(lo, e), cd.threshold_functions(hi, e)
        worst = max(worst,
                    _rel(tl.f - tl.F, g.left_gap),
                    _rel(th.f - th.F, g.right_gap_formula),
                    _rel(tl.g - tl.G, g.g_gap),
                    _rel(tl.f_prime - tl.F_prime, g.f_prime_gap))
    return worst <= 1e-10, f"max relative gap mismatch {worst:.2e} (tol 1e-10)"


def _cubic_oracle():
    roots = np.roots([1.0, -4.0, -384.0, 2304.0])
    real = sorted(x.real for x in roots if abs(x.imag) < 1e-12 and 8 < x.real < 30)
    return real[0]


def check_critical_dimension(quick=False):
    res = cd.critical_dimension(Exponents(3, 0, 0))
    oracle = _cubic_oracle()
    ok = abs(res.root - 18.16) <= 0.05 and abs(res.root - oracle) <= 1e-9 * oracle
    ok &= res.bracket_lo == 8 and res.bracket_hi == 30
    bad = []
    for p in (2, 3, 5, 9):
        for a in (0, 1, 2):
            for b in (0, 1, 2):
                try:
                    r = cd.critical_dimension(Exponents(p, a, b))
                    if not (r.gap_lo > 0 > r.gap_hi and r.bracket_lo < r.root < r.bracket_hi):
                        bad.append((p, a, b))
                except BracketError:
                    bad.append((p, a, b))
    ok &= not bad
    return ok, f"N(3,0,0) = {res.root:.10f}, cubic oracle {oracle:.10f}; bad endpoint signs: {bad or 'none'}"


def check_literature_bounds(quick=False):
    margins = []
    for p in (2, 3, 5, 9):
        margins.append(cd.critical_dimension(Exponents(p, 0, 0)).root - cd.cowan_bound(p))
        for a in (0, 1, 2):
            margins.append(cd.critical_dimension(Exponents(p, a, a)).root - cd.fazly_bound(p, a))
    m = min(margins)
    return m > 1e-6, f"smallest margin over earlier bounds {m:.6f}"


def check_singular_solution(quick=False):
    rng = np.random.default_rng(SEED + 4)
    grid = log_grid(1e-2, 1e2, 512)
    worst = worst_f = 0.0
    for P in random_singular_params(rng, 20):
        u = singular_field(P, grid)
        worst = max(worst, *system_residual(u, companion_v(u)))
        worst_f = max(worst_f, _rel(cd.threshold_functions(P.N, P).f, P.p * derive(P).gamma_coef))
    ok = worst <= 1e-10 and worst_f <= 1e-14
    P12, P19 = SystemParams(12, 3, 0, 0), SystemParams(19, 3, 0, 0)
    t12, t19 = cd.threshold_functions(12, P12), cd.threshold_functions(19, P19)
    root = cd.critical_dimension(P12).root
    ok &= t12.f > t12.F and t19.f <= t19.F and 12 < root < 19
    found, rep = witness_search(P12)
    ok &= found is not None
    # stable side: no random bump violates the stability inequality
    g19 = log_grid(1e-2, 1e2, 2001 if quick else 4001)
    u19 = singular_field(P19, g19)
    worst19 = math.inf
    for modes in random_bumps(rng, 10 if quick else 50):
        r = stability_rayleigh(u19, bump_field(modes, P19, g19))
        worst19 = min(worst19, (r.rhs - r.lhs) / r.scale)
    ok &= worst19 >= -1e-8
    return ok, (f"PDE residual {worst:.1e}, f=pΓ {worst_f:.1e}; N=12 f={t12.f:g}>F={t12.F:g} witness: {found}; "
                f"N=19 f={t19.f:g}<=F={t19.F:g}, min (rhs-lhs)/scale {worst19:.3f}")


def check_monotonicity_singular(quick=False):
    P = SystemParams(12, 3, 0, 0)
    u = singular_field(P, log_grid(0.5, 2.0, 2000))
    rep = monotonicity_curve(u)
    M1 = monotonicity_curve(u, [1.0]).M[0]
    dev = float(np.max(np.abs(rep.M - M1)) / (1 + abs(M1)))
    bound = float(np.max(np.abs(rep.rhs_bound)))
    ok = dev <= 1e-6 and bound <= 1e-12 * (1 + abs(M1))
    worst = 0.0
    g = log_grid(0.05, 20.0, 1201 if quick else 2401)
    fields = [singular_field(P, g), bump_field([(0, 1.0, 1.0, 0.5), (2, 0.4, 1.3, 0.6)], P, g)]
    for f in fields:
        for kappa in (0.5, 2.0):
            r = g.radii[g.count // 2] / kappa
            M = monotonicity_curve(f, [kappa * r]).M[0]
            worst = max(worst, scaling_gap(f, kappa, r) / (1 + abs(M)))
    ok &= worst <= 1e-8
    return ok, f"max|M-M(1)|/(1+|M(1)|) = {dev:.1e}, M(1) = {M1:.6f}; max bound {bound:.1e}; scaling gap {worst:.1e}"


def _shot_margin(refine):
    P = SystemParams(SHOT["N"], SHOT["p"], SHOT["alpha"], SHOT["beta"])
    res = shoot(P, SHOT["a"], SHOT["b"], log_grid(1e-3, 10.0, 4001), refine=refine)
    r = res.field.grid.radii
    radii = r[(r >= 0.1) & (r <= 0.9 * res.termination_radius)]
    rep = monotonicity_curve(res.field, radii)
    tol = 1e-6 * (1 + float(np.max(np.abs(rep.M))))
    return float(np.min(rep.dMdr - rep.rhs_bound + tol)), res, rep


def check_monotonicity_shot(quick=False):
    P = SystemParams(12, 3, 0, 0)
    C = derive(P).c_const
    margin, res, rep = _shot_margin(1)
    ok = margin >= 0 and C == 44
    detail = (f"C = {C:g}, blow-up at r = {res.termination_radius:.4f} ({res.terminated}), "
              f"{rep.radii.size} radii, min(dM/dr - bound + tol) = {margin:.3e}")
    if not quick:
        margin2, _, _ = _shot_margin(2)
        ok &= margin2 >= 0
        detail += f", halved step {margin2:.3e}"
    return ok, detail


def check_identity_residuals(quick=False):
    P = SystemParams(12, 3, 0, 0)
    sing = singular_field(P, log_grid(1e-2, 1e2, 4001))
    res = [pohozaev_residual(sing, 1.0).relative, energy_identity_residual(sing, 1.0).relative]
    shot_field = shoot(P, 1.0, 0.1, log_grid(1e-3, 8.0, 4001)).field
    res_shot = [pohozaev_residual(shot_field, 1.0).relative,
                energy_identity_residual(shot_field, 1.0).relative]
    ok = max(res) <= 1e-8 and max(res_shot) <= 1e-6
    ratios = []
    for n in (257, 1001):
        coarse = singular_field(P, log_grid(1e-2, 1e2, n)) if n == 257 else \
            shoot(P, 1.0, 0.1, log_grid(1e-3, 8.0, n)).field
        fine = singular_field(P, log_grid(1e-2, 1e2, 2 * n - 1)) if n == 257 else \
            shoot(P, 1.0, 0.1, log_grid(1e-3, 8.0, 2 * n - 1)).field
        for fn in (pohozaev_residual, energy_identity_residual):
            ratios.append(fn(coarse, 1.0).relative / fn(fine, 1.0).relative)
    ok &= min(ratios) >= 8
    return ok, (f"singular {max(res):.1e}, shot {max(res_shot):.1e}; "
                f"refinement ratios {', '.join(f'{x:.1f}' for x in ratios)}")


def check_fourth_order_identity(quick=False):
    rng = np.random.default_rng(SEED + 8)
    n = 20 if quick else 100
    nonzero = sum(not lemma21_check(random_poly(rng), random_poly(rng)).is_zero() for _ in range(n))
    return nonzero == 0, f"{n} random pairs, {nonzero} nonzero differences"


def check_weighted_ibp(quick=False):
    worst = 0.0
    for N, b in ((12, 0), (12, 2), (9, 1)):
        P = SystemParams(N, 3, 0, b)
        for zeta in ([1], [0, 0, 1], [0, 0, 0, 0, 1]):
            rep = lemma22_check(zeta, P)
            worst = max(worst, rep.eq21.relative, rep.eq22.relative)
    return worst <= 1e-8, f"max relative residual {worst:.1e}"


def check_mode_positivity(quick=False):
    rng = np.random.default_rng(SEED + 10)
    fails = 0
    worst_root = 0.0
    for P in random_window_params(rng, 15 if quick else 50):
        if any(mode_quadratic(P, eigenvalue(k, P.N)) <= 0 for k in range(51)):
            fails += 1
        root = cd.critical_dimension(P).root
        at_root = P.exponents.with_dimension(root)
        worst_root = max(worst_root, abs(mode_quadratic(at_root, 0.0)) / cd.threshold_functions(root, P).F)
    return fails == 0 and worst_root <= 1e-9, f"{fails} failing params; max |Q(0)|/F at the root {worst_root:.1e}"


def check_hardy_rellich(quick=False):
    rng = np.random.default_rng(SEED + 11)
    worst = math.inf
    g = log_grid(1e-2, 1e2, 2001 if quick else 4001)
    for N, b in ((12, 0), (12, 2)):
        P = SystemParams(N, 3, 0, b)
        for modes in random_bumps(rng, 10 if quick else 50):
            rep = hardy_rellich_ratio(bump_field(modes, P, g))
            worst = min(worst, (rep.rhs - rep.lhs) / rep.scale)
    return worst >= -1e-8, f"min (rhs-lhs)/scale = {worst:.4f}"


def check_regimes(quick=False):
    root = cd.critical_dimension(Exponents(3, 0, 0)).root
    got = [classify_regime(SystemParams(N, 3, 0, 0), root) for N in (7, 8, 12)]
    want = [RegimeTag.BelowHyperbola, RegimeTag.OnHyperbola, RegimeTag.Window]
    return got == want, ", ".join(str(t) for t in got)


def sweep_fixture_rows():
    """36 (p, α, β) rows: p in {1.5, 2, 3, 5, 9, 17} x α in {0, 1.5} x β in {0, 0.5, 2}."""
    return [(p, a, b) for p in (1.5, 2, 3, 5, 9, 17) for a in (0, 1.5) for b in (0, 0.5, 2)]


def check_determinism(quick=False):
    from .cli import main

    with tempfile.TemporaryDirectory() as tmp:
        src = os.path.join(tmp, "rows.csv")
        with open(src, "w", encoding="utf-8") as fh:
            fh.write("p,alpha,beta\n")
            for row in sweep_fixture_rows():
                fh.write(",".join(repr(float(x)) for x in row) + "\n")
        outs = []
        for jobs in (1, 4):
            dst = os.path.join(tmp, f"out{jobs}.csv")
            code = main(["sweep", "--input", src, "--output", dst, "--n-values", "8,12,19", "--jobs", str(jobs)])
            if code != 0:
                return False, f"sweep with --jobs {jobs} exited {code}"
            with open(dst, "rb") as fh:
                outs.append(fh.read())
    return outs[0] == outs[1], f"{len(outs[0])} bytes, identical={outs[0] == outs[1]}"


CHECKS: list[tuple[int, str, Callable]] = [
    (1, "endpoint gap identities", check_endpoint_gaps),
    (2, "critical dimension", check_critical_dimension),
    (3, "earlier nonexistence bounds", check_literature_bounds),
    (4, "singular solution", check_singular_solution),
    (5, "monotonicity on homogeneous fields and scaling", check_monotonicity_singular),
    (6, "derivative bound on a shot solution", check_monotonicity_shot),
    (7, "Pohozaev and energy residuals", check_identity_residuals),
    (8, "pointwise fourth-order identity", check_fourth_order_identity),
    (9, "weighted integration-by-parts identities", check_weighted_ibp),
    (10, "mode positivity in the window", check_mode_positivity),
    (11, "Hardy-Rellich inequality", check_hardy_rellich),
    (12, "dimension regimes", check_regimes),
    (13, "sweep determinism", check_determinism),
]


def run_check(number, quick=False) -> CheckResult:
    for n, name, fn in CHECKS:
        if n == number:
            try:
                ok, detail = fn(quick)
            except Exception as exc:  # a crash is a failed check, reported as such
                ok, detail = False, f"{type(exc).__name__}: {exc}"
            return CheckResult(n, name, bool(ok), detail)
    raise KeyError(number)


def run_all(quick=False, out=print):
    results = []
    for n, _, _ in CHECKS:
        res = run_check(n, quick)
        out(res.line())
        results.append(res)
    return results
