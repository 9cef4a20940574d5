"""Integral functionals of zonal fields: energy, the monotonicity quantity M(r),
Pohozaev and energy-identity residuals, stability and Hardy–Rellich quotients.

Every integral over a ball or annulus is a tensor quadrature: Simpson in ln r
on the field's grid times Gauss–Legendre in the polar angle.  d/dr factors
are centred five-point differences of the radius functions they act on.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .critdim import threshold_functions
from .errors import RangeError, StencilError, SupportError
from .fields import Field, rescale
from .params import derive
from .quadrature import central_d_dr, cumulative_t, integrate_t

TERM_NAMES = ("energy", "potential", "sphere", "d_sphere", "d_homog", "tangential", "d_tangential")


@dataclass(frozen=True)
class ResidualReport:
    lhs: float
    rhs: float
    residual: float
    scale: float
    relative: float
    truncation: float = 0.0

    @classmethod
    def build(cls, lhs, rhs, scale=None, truncation=0.0):
        lhs, rhs = float(lhs), float(rhs)
        s = max(abs(lhs), abs(rhs), 1e-300) if scale is None else max(float(scale), 1e-300)
        return cls(lhs, rhs, lhs - rhs, s, abs(lhs - rhs) / s, float(truncation))


@dataclass(frozen=True, eq=False)
class MonotonicityReport:
    radii: np.ndarray
    M: np.ndarray
    dMdr: np.ndarray
    rhs_bound: np.ndarray
    terms: np.ndarray  # (7, len(radii)) in the order of TERM_NAMES

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("r,M,dMdr,rhsBound," + ",".join(f"term{i + 1}" for i in range(7)) + "\n")
        for j in range(self.radii.size):
            row = [self.radii[j], self.M[j], self.dMdr[j], self.rhs_bound[j], *self.terms[:, j]]
            buf.write(",".join(f"{x:.16e}" for x in row) + "\n")
        return buf.getvalue()


# pointwise ingredients ---------------------------------------------------------

class _Pointwise:
    """u, its radial derivatives, Δu, ∂_rΔu and ∂_φu on (radii, angular nodes)."""

    def __init__(self, field: Field):
        P = field.params
        N = P.N
        r = field.grid.radii[:, None]
        psi = field.basis.psi
        nu = np.array([m.eigenvalue for m in field.modes])[:, None]
        f0, f1, f2, f3 = (field.profiles(j) for j in range(4))
        rr = field.grid.radii[None, :]
        lap = f2 + (N - 1) * f1 / rr - nu * f0 / rr**2
        lap_r = f3 + (N - 1) * (f2 / rr - f1 / rr**2) - nu * (f1 / rr**2 - 2 * f0 / rr**3)
        self.r = r
        self.u = f0.T @ psi
        self.ur = f1.T @ psi
        self.urr = f2.T @ psi
        self.lap = lap.T @ psi
        self.lap_r = lap_r.T @ psi
        self.uphi = f0.T @ field.basis.dpsi


def _sphere(field, values):
    """∫_{∂B_r} values dS for every grid radius."""
    r = field.grid.radii
    return field.basis.integrate(values) * r ** (field.params.N - 1)


def _inner(density, field, exponent):
    """∫_0^{r_min} of a density that is exactly c·r^exponent."""
    if not exponent > -1:
        raise RangeError(f"radial density ~ r^{exponent:.6g} is not integrable at the origin")
    return density[0] * field.grid.r_min / (exponent + 1)


def _energy_densities(field, pw=None):
    """Sphere-integrated densities of ½|Δu|²/|x|^β and |x|^α|u|^{p+1}/(p+1)."""
    P = field.params
    pw = pw or _Pointwise(field)
    r = field.grid.radii
    kin = 0.5 * r ** (-P.beta) * _sphere(field, pw.lap**2)
    pot = r**P.alpha / (P.p + 1) * _sphere(field, np.abs(pw.u) ** (P.p + 1))
    return kin, pot


def _power_exponents(field):
    P = field.params
    s = field.power_exponent
    return 2 * (s - 2) - P.beta + P.N - 1, P.alpha + (P.p + 1) * s + P.N - 1


def ball_energy(field: Field, R: float, r_inner: Optional[float] = None) -> float:
    """∫ ½|Δu|²/|x|^β - |x|^α|u|^{p+1}/(p+1) over B_R minus B_{r_inner} (default r_min).

    Radii between grid points are handled by interpolating the running integral.
    """
    grid = field.grid
    lo = grid.r_min if r_inner is None else float(r_inner)
    if lo > R:
        raise RangeError(f"inner radius {r_inner!r} exceeds R = {R!r}")
    kin, pot = _energy_densities(field)
    running = cumulative_t(kin - pot, grid.radii, grid.h)[None, :]
    return float(_sample(grid, running, R, 0)[0] - _sample(grid, running, lo, 0)[0])


def _radius_functions(field):
    """Cumulative ball integrals and the three sphere integrals used by M."""
    P = field.params
    lam = P.lam
    pw = _Pointwise(field)
    grid = field.grid
    kin, pot = _energy_densities(field, pw)
    Ekin = cumulative_t(kin, grid.radii, grid.h)
    Epot = cumulative_t(pot, grid.radii, grid.h)
    if field.power_exponent is not None:
        qk, qp = _power_exponents(field)
        Ekin = Ekin + _inner(kin, field, qk)
        Epot = Epot + _inner(pot, field, qp)
    S0 = _sphere(field, pw.u**2)
    S1 = _sphere(field, (lam * pw.u / pw.r + pw.ur) ** 2)
    S2 = _sphere(field, pw.uphi**2) / grid.radii**2
    return Ekin, Epot, S0, S1, S2


def _terms(field):
    """The seven terms of M at every grid radius (NaN where a stencil is missing)."""
    P = field.params
    d = derive(P)
    N, b, lam = P.N, P.beta, d.lam
    r, h = field.grid.radii, field.grid.h
    Ekin, Epot, S0, S1, S2 = _radius_functions(field)
    a = lam * (N - 2 - lam)
    return np.array([
        r**d.delta * Ekin,
        -(r**d.delta) * Epot,
        0.5 * (1 + b) * a * r ** (2 * lam + 1 - N) * S0,
        0.5 * a * central_d_dr(r ** (2 * lam + 2 - N) * S0, r, h),
        0.5 * r**3 * central_d_dr(r ** (2 * lam + 1 - N) * S1, r, h),
        0.5 * (1 + b - lam) * r ** (2 * lam + 3 - N) * S2,
        0.5 * central_d_dr(r ** (2 * lam + 4 - N) * S2, r, h),
    ]), S1


def _indices(grid, radii):
    n = grid.count
    idx = np.array([grid.index_of(float(x)) for x in np.atleast_1d(radii)], dtype=int)
    bad = idx[(idx < 4) | (idx > n - 5)]
    if bad.size:
        raise StencilError(
            f"radius {grid.radii[bad[0]]!r} needs four grid points on each side for dM/dr"
        )
    return idx


_INTERP_POINTS = 6


def _sample(grid, arrays, r, margin=4):
    """Values of each row of ``arrays`` at radius r.

    Grid radii are taken exactly; other radii use six-point Lagrange
    interpolation in ln r.  Only columns ``margin .. count-1-margin`` are
    used, so undefined stencil ends are never touched.
    """
    hi = grid.count - 1 - margin
    if not grid.r_min * (1 - 1e-12) <= r <= grid.r_max * (1 + 1e-12):
        raise RangeError(f"radius {r!r} outside [{grid.r_min!r}, {grid.r_max!r}]")
    t = (math.log(r) - math.log(grid.r_min)) / grid.h
    i = int(round(t))
    if abs(t - i) * grid.h < 1e-12:
        if not margin <= i <= hi:
            raise StencilError(f"radius {r!r} needs {margin} grid points on each side")
        return arrays[:, i]
    lo = min(max(int(math.floor(t)) - _INTERP_POINTS // 2 + 1, margin), hi - _INTERP_POINTS + 1)
    if lo < margin or not lo <= t <= lo + _INTERP_POINTS - 1:
        raise StencilError(f"radius {r!r} is too close to the grid ends")
    nodes = np.arange(lo, lo + _INTERP_POINTS)
    w = np.ones(_INTERP_POINTS)
    for a in range(_INTERP_POINTS):
        for b in range(_INTERP_POINTS):
            if a != b:
                w[a] *= (t - nodes[b]) / (nodes[a] - nodes[b])
    return arrays[:, nodes] @ w


def monotonicity_curve(field: Field, radii: Optional[Sequence[float]] = None) -> MonotonicityReport:
    """M(r; 0, u), its derivative and the lower bound C r^{2+2λ-N}∫(λu/r+u_r)².

    ``radii`` defaults to every grid point at least four steps from either
    end; other radii are interpolated from the grid values.
    """
    grid = field.grid
    terms, S1 = _terms(field)
    M = terms.sum(axis=0)
    dM = central_d_dr(M, grid.radii, grid.h)
    d = derive(field.params)
    bound = d.c_const * grid.radii ** (2 + 2 * d.lam - field.params.N) * S1
    stacked = np.vstack([dM, bound, terms])
    if radii is None:
        if grid.count < 9:
            raise StencilError(f"a grid of {grid.count} points has no interior radii")
        idx = np.arange(4, grid.count - 4)
        rs, cols = grid.radii[idx].copy(), stacked[:, idx]
    else:
        rs = np.asarray(radii, dtype=float).ravel()
        cols = np.array([_sample(grid, stacked, float(x)) for x in rs]).T.reshape(9, -1)
    terms_out = cols[2:]
    # M is reported as the sum of its terms so the breakdown is exact
    return MonotonicityReport(rs, terms_out.sum(axis=0), cols[0], cols[1], terms_out)


def monotonicity_value(field: Field, r: float) -> float:
    return float(monotonicity_curve(field, [r]).M[0])


def scaling_gap(field: Field, kappa: float, r: float) -> float:
    """|M(κr; 0, u) - M(r; 0, u^κ)| with u^κ(x) = κ^λ u(κx).

    κr must be a grid radius of ``field``; u^κ lives on the grid radii/κ.
    """
    scaled = rescale(field, kappa)
    i = _indices(field.grid, [kappa * r])[0]
    j = _indices(scaled.grid, [r])[0]
    a, _ = _terms(field)
    b, _ = _terms(scaled)
    return abs(float(a[:, i].sum()) - float(b[:, j].sum()))


# identities ----------------------------------------------------------------------

def _annulus_balance(field, R, vol, flux):
    """(∫_{r_min}^R vol dr, flux(R) - flux(r_min)) from per-radius arrays."""
    grid = field.grid
    if not R > grid.r_min:
        raise RangeError(f"R = {R!r} leaves no annulus above r_min = {grid.r_min!r}")
    running = cumulative_t(vol, grid.radii, grid.h)
    at_R = _sample(grid, np.vstack([running, flux]), R, 0)
    return at_R[0], at_R[1] - flux[0]


def _truncation(field, dens):
    """Estimated ∫_0^{r_min} of a radial density (exact for power-law fields)."""
    if field.power_exponent is not None:
        q = _power_exponents(field)[0]
        return abs(_inner(dens, field, q))
    # smooth fields: density ~ r^{N-1-β} near 0
    P = field.params
    return abs(dens[0]) * field.grid.r_min / (P.N - P.beta)


def pohozaev_residual(field: Field, R: float) -> ResidualReport:
    """Pohozaev balance on the annulus r_min < |x| < R.

    lhs is the weighted volume combination, rhs the flux terms on |x| = R
    minus the same terms on |x| = r_min (outward normal points inwards there).
    ``truncation`` estimates the volume term on the excluded ball B_{r_min}.
    """
    P = field.params
    N, p, al, be = P.N, P.p, P.alpha, P.beta
    pw = _Pointwise(field)
    kin, pot = _energy_densities(field, pw)
    vol = (N - 4 - be) * kin - (N + al) * pot

    w = pw.lap * pw.r ** (-be)
    w_r = pw.r ** (-be) * (pw.lap_r - be * pw.lap / pw.r)
    flux_density = (
        0.5 * pw.r * pw.r ** (-be) * pw.lap**2
        - pw.r / (p + 1) * pw.r**al * np.abs(pw.u) ** (p + 1)
        - w * (pw.ur + pw.r * pw.urr)
        + w_r * pw.r * pw.ur
    )
    lhs, rhs = _annulus_balance(field, R, vol, _sphere(field, flux_density))
    return ResidualReport.build(lhs, rhs, truncation=_truncation(field, vol))


def energy_identity_residual(field: Field, R: float) -> ResidualReport:
    """∫|Δu|²/|x|^β - ∫|x|^α|u|^{p+1} against its boundary flux, on r_min < |x| < R."""
    P = field.params
    be = P.beta
    pw = _Pointwise(field)
    kin, pot = _energy_densities(field, pw)
    vol = 2 * kin - (P.p + 1) * pot
    w = pw.lap * pw.r ** (-be)
    w_r = pw.r ** (-be) * (pw.lap_r - be * pw.lap / pw.r)
    lhs, rhs = _annulus_balance(field, R, vol, _sphere(field, w * pw.ur - w_r * pw.u))
    return ResidualReport.build(lhs, rhs, truncation=_truncation(field, vol))


def system_residual(field: Field, v: Field) -> tuple:
    """Pointwise relative residuals of -Δu = |x|^β v and -Δv = |x|^α|u|^{p-1}u.

    Returns the maximum over grid radii and angular nodes for each equation.
    """
    P = field.params
    pu, pv = _Pointwise(field), _Pointwise(v)
    r = pu.r
    src1 = r**P.beta * pv.u
    src2 = r**P.alpha * np.abs(pu.u) ** (P.p - 1) * pu.u

    def rel(a, b):
        scale = np.maximum(np.maximum(np.abs(a), np.abs(b)), 1e-300)
        return float(np.max(np.abs(a - b) / scale))

    return rel(-pu.lap, src1), rel(-pv.lap, src2)


# quadratic forms -------------------------------------------------------------------

def _check_support(zeta: Field):
    f = zeta.profiles(0)
    if np.any(f[:, :2] != 0) or np.any(f[:, -2:] != 0):
        raise SupportError("test function must vanish on the first and last two grid points")


def _same_grid(a: Field, b: Field):
    if a.grid.count != b.grid.count or not np.allclose(a.grid.radii, b.grid.radii, rtol=1e-13, atol=0):
        raise RangeError("u and zeta must live on the same radial grid")


def _rellich_energy(zeta):
    """∫|Δζ|²/|x|^β over the grid range."""
    kin, _ = _energy_densities(zeta)
    return 2 * integrate_t(kin, zeta.grid.radii, zeta.grid.h)


def stability_rayleigh(u: Field, zeta: Field) -> ResidualReport:
    """lhs = p∫|x|^α|u|^{p-1}ζ², rhs = ∫|Δζ|²/|x|^β.

    rhs - lhs < 0 makes ζ a witness that u is not stable.
    """
    _check_support(zeta)
    _same_grid(u, zeta)
    P = u.params
    pu, pz = _Pointwise(u), _Pointwise(zeta)
    r = u.grid.radii
    weight = P.p * r**P.alpha * _sphere(u, np.abs(pu.u) ** (P.p - 1) * pz.u**2)
    lhs = integrate_t(weight, r, u.grid.h)
    return ResidualReport.build(lhs, _rellich_energy(zeta))


def hardy_rellich_ratio(zeta: Field) -> ResidualReport:
    """lhs = F(N)∫ζ²/|x|^{4+β}, rhs = ∫|Δζ|²/|x|^β; rhs >= lhs for every ζ."""
    _check_support(zeta)
    P = zeta.params
    r = zeta.grid.radii
    pz = _Pointwise(zeta)
    F = threshold_functions(P.N, P).F
    lhs = F * integrate_t(r ** (-4 - P.beta) * _sphere(zeta, pz.u**2), r, zeta.grid.h)
    return ResidualReport.build(lhs, _rellich_energy(zeta))


def rellich_quotient(zeta: Field) -> float:
    """∫|Δζ|²/|x|^β / ∫ζ²/|x|^{4+β}; the Hardy–Rellich constant bounds it below."""
    rep = hardy_rellich_ratio(zeta)
    F = threshold_functions(zeta.params.N, zeta.params).F
    return rep.rhs * F / rep.lhs


def mode_quadratic(params, nu: float) -> float:
    """Q(ν) = (p-1)ν² + (pΥ - G)ν + (pΓ - F); Q(ν_k) > 0 for all k gives instability of u_Γ."""
    if nu < 0:
        raise RangeError(f"nu must be nonnegative, got {nu!r}")
    d = derive(params)
    t = threshold_functions(params.N, params)
    p = params.p
    return (p - 1) * nu * nu + (p * d.upsilon - t.G) * nu + (p * d.gamma_coef - t.F)


def mode_quadratic_coefficients(params):
    d = derive(params)
    t = threshold_functions(params.N, params)
    p = params.p
    return p - 1, p * d.upsilon - t.G, p * d.gamma_coef - t.F


def singular_energy_annulus(params, r0, r1):
    """Closed form of the energy integral of u_Γ over r0 < |x| < r1."""
    from .zonal import sphere_area

    d = derive(params)
    N, p, b, lam = params.N, params.p, params.beta, d.lam
    A = d.gamma_coef ** (1 / (p - 1))
    lap = lam * (N - 2 - lam)  # -Δ r^{-λ} = lap · r^{-λ-2}
    coef = 0.5 * (lap * A) ** 2 - A ** (p + 1) / (p + 1)
    q = N - 5 - b - 2 * lam
    if abs(q + 1) < 1e-14:
        radial = math.log(r1 / r0)
    else:
        radial = (r1 ** (q + 1) - r0 ** (q + 1)) / (q + 1)
    return sphere_area(N) * coef * radial
