"""Zonal mode fields u(r, φ) = Σ_k f_k(r) Ψ_k(φ) on log-uniform radial grids.

Constructors cover the homogeneous singular solution, compactly supported
bumps (polynomial in r or in ln r), rescalings, the companion v = -|x|^{-β}Δu
and radially shot solutions of the system.  Profiles carry their radial
derivatives up to fourth order when they are known in closed form; missing
ones are filled in by five-point differences on the grid.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field as dc_field, replace
from typing import Optional, Sequence

import numpy as np
from numpy.polynomial import Polynomial

from .errors import GammaNonpositive, ParameterError, RangeError
from .params import SystemParams, derive
from .quadrature import d_dr
from .zonal import angular_basis, eigenvalue, sphere_area, sphere_moment  # noqa: F401

BLOWUP_THRESHOLD = 1e12
MAX_STEP_RATIO = 1.0 / 64


@dataclass(frozen=True, eq=False)
class RadialGrid:
    radii: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        if r.ndim != 1 or r.size < 3:
            raise RangeError("a radial grid needs at least three radii")
        if not np.all(np.isfinite(r)) or r[0] <= 0 or np.any(np.diff(r) <= 0):
            raise RangeError("radii must be finite, positive and strictly increasing")
        ratios = r[1:] / r[:-1]
        if np.max(np.abs(ratios / ratios[0] - 1.0)) > 1e-12:
            raise RangeError("radii are not log-uniform")
        r.setflags(write=False)
        object.__setattr__(self, "radii", r)

    @property
    def count(self):
        return self.radii.size

    @property
    def r_min(self):
        return float(self.radii[0])

    @property
    def r_max(self):
        return float(self.radii[-1])

    @property
    def h(self):
        """Uniform spacing in ln r."""
        return math.log(self.r_max / self.r_min) / (self.count - 1)

    def index_of(self, r, rtol=1e-9):
        """Index of the grid radius equal to ``r`` (relative tolerance ``rtol``)."""
        if not self.r_min * (1 - rtol) <= r <= self.r_max * (1 + rtol):
            raise RangeError(f"radius {r!r} outside [{self.r_min!r}, {self.r_max!r}]")
        i = int(round(math.log(r / self.r_min) / self.h))
        i = min(max(i, 0), self.count - 1)
        if abs(self.radii[i] / r - 1.0) > rtol:
            raise RangeError(f"radius {r!r} is not a grid point (nearest {self.radii[i]!r})")
        return i

    def head(self, n):
        return RadialGrid(self.radii[:n])


def log_grid(r_min: float, r_max: float, n: int) -> RadialGrid:
    if not (0 < r_min < r_max) or not math.isfinite(r_max):
        raise RangeError(f"need 0 < r_min < r_max, got {r_min!r}, {r_max!r}")
    if n < 3:
        raise RangeError(f"need at least 3 points, got {n!r}")
    r = np.exp(np.linspace(math.log(r_min), math.log(r_max), n))
    r[0], r[-1] = r_min, r_max
    return RadialGrid(r)


@dataclass(frozen=True, eq=False)
class ZonalMode:
    """Profile f_k and its radial derivatives; ``derivs[j]`` is the (j+1)-th."""

    degree: int
    f: np.ndarray
    derivs: tuple
    eigenvalue: float

    @property
    def fp(self):
        return self.derivs[0]

    @property
    def fpp(self):
        return self.derivs[1]

    def derivative(self, order):
        if order == 0:
            return self.f
        return self.derivs[order - 1]


@dataclass(frozen=True, eq=False)
class Field:
    params: SystemParams
    grid: RadialGrid
    modes: tuple
    derivatives_analytic: bool = True
    # f_k ∝ r^s for every mode: enables closed-form inner-ball contributions.
    power_exponent: Optional[float] = None
    basis: object = dc_field(default=None, repr=False)

    def __post_init__(self):
        degrees = [m.degree for m in self.modes]
        if len(set(degrees)) != len(degrees):
            raise ValueError(f"mode degrees must be distinct, got {degrees}")
        for m in self.modes:
            if m.f.shape != (self.grid.count,) or any(d.shape != m.f.shape for d in m.derivs):
                raise ValueError("mode arrays must match the grid length")
        if self.basis is None:
            object.__setattr__(self, "basis", angular_basis(float(self.params.N), tuple(degrees)))

    @property
    def degrees(self):
        return tuple(m.degree for m in self.modes)

    def profiles(self, order):
        """Array (modes, radii) of the ``order``-th radial derivative."""
        return np.array([m.derivative(order) for m in self.modes])

    def on_sphere(self, order=0, angular=False):
        """Pointwise values on (radii, angular nodes) of ∂_r^order u, or of ∂_φ u."""
        table = self.basis.dpsi if angular else self.basis.psi
        return self.profiles(order).T @ table


def _make_mode(k, N, values, analytic=True, grid=None):
    """Build a mode from [f, f', f'', ...]; pads to fourth order by differences."""
    values = [np.asarray(v, dtype=float) for v in values]
    while len(values) < 5:
        values.append(d_dr(values[-1], grid.radii, grid.h))
    return ZonalMode(k, values[0], tuple(values[1:]), float(eigenvalue(k, N)))


def zero_field(params, grid):
    z = np.zeros(grid.count)
    return Field(params, grid, (ZonalMode(0, z, (z,) * 4, 0.0),))


def singular_field(params: SystemParams, grid: RadialGrid) -> Field:
    """Γ^{1/(p-1)} r^{-λ} as a k = 0 mode."""
    d = derive(params)
    lam = d.lam
    if not (params.N - 2 - lam > 0 and params.N - 4 - d.mu > 0) or d.gamma_coef <= 0:
        raise GammaNonpositive(
            f"singular solution needs N-2-λ > 0 and N-4-μ > 0 (Γ = {d.gamma_coef!r})"
        )
    r = grid.radii
    # Ψ_0 is normalized by quadrature; divide by it so that f·Ψ_0 = u_Γ exactly
    amp = d.gamma_coef ** (1 / (params.p - 1)) / angular_basis(float(params.N), (0,)).norms[0]
    values, coef = [], amp
    for j in range(5):
        values.append(coef * r ** (-lam - j))
        coef *= -lam - j
    return Field(params, grid, (_make_mode(0, params.N, values),), True, -lam)


_BUMP = Polynomial([1.0, 0.0, -1.0]) ** 6


@dataclass(frozen=True)
class BumpMode:
    degree: int
    amplitude: float
    center: float
    width: float


def bump_field(modes: Sequence, params: SystemParams, grid: RadialGrid) -> Field:
    """Sum of amplitude·(1-((r-c)/w)²)^6 Ψ_k, zero outside |r-c| <= w.

    The profile has five continuous derivatives at the edge of its support.
    ``modes`` holds ``BumpMode`` or plain (k, amplitude, c, w) tuples.
    """
    r = grid.radii
    by_degree = {}
    for m in modes:
        m = m if isinstance(m, BumpMode) else BumpMode(*m)
        if not m.width > 0:
            raise ParameterError(f"bump width must be positive, got {m.width!r}")
        x = (r - m.center) / m.width
        inside = np.abs(x) <= 1
        vals = []
        for j in range(5):
            poly = _BUMP.deriv(j) if j else _BUMP
            vals.append(np.where(inside, m.amplitude * poly(x) / m.width**j, 0.0))
        acc = by_degree.setdefault(int(m.degree), [np.zeros_like(r) for _ in range(5)])
        for j in range(5):
            acc[j] += vals[j]
    if not by_degree:
        return zero_field(params, grid)
    field_modes = tuple(_make_mode(k, params.N, v) for k, v in sorted(by_degree.items()))
    return Field(params, grid, field_modes, True)


def log_bump_field(modes: Sequence, params: SystemParams, grid: RadialGrid, power=None) -> Field:
    """Sum of amplitude·r^s (1-(ln(r/c)/L)²)^6 Ψ_k, zero outside |ln(r/c)| <= L.

    ``modes`` holds (k, amplitude, c, L); s defaults to -(N-4-β)/2, the
    exponent at which the weighted Rellich quotient is flattest, so wide
    supports probe the optimal constant.
    """
    s = -(params.N - 4 - params.beta) / 2 if power is None else float(power)
    r = grid.radii
    by_degree = {}
    for k, amp, c, L in modes:
        if not L > 0:
            raise ParameterError(f"log-bump half width must be positive, got {L!r}")
        t = np.log(r / c) / L
        inside = np.abs(t) <= 1
        # f^{(j)} = r^{s-j} H_j(t), H_{j+1} = (s-j) H_j + dH_j/dt / L
        H = _BUMP * amp
        vals = []
        for j in range(5):
            vals.append(np.where(inside, r ** (s - j) * H(t), 0.0))
            H = (s - j) * H + H.deriv() / L
        acc = by_degree.setdefault(int(k), [np.zeros_like(r) for _ in range(5)])
        for j in range(5):
            acc[j] += vals[j]
    field_modes = tuple(_make_mode(k, params.N, v) for k, v in sorted(by_degree.items()))
    return Field(params, grid, field_modes, True)


def rescale(field: Field, kappa: float) -> Field:
    """u^κ(x) = κ^λ u(κx), resampled exactly onto the grid radii/κ."""
    if not kappa > 0:
        raise ParameterError(f"kappa must be positive, got {kappa!r}")
    lam = field.params.lam
    grid = RadialGrid(field.grid.radii / kappa)
    modes = []
    for m in field.modes:
        vals = [m.f * kappa**lam] + [d * kappa ** (lam + j + 1) for j, d in enumerate(m.derivs)]
        modes.append(ZonalMode(m.degree, vals[0], tuple(vals[1:]), m.eigenvalue))
    return Field(field.params, grid, tuple(modes), field.derivatives_analytic, field.power_exponent)


def companion_v(field: Field) -> Field:
    """Per mode v_k = -r^{-β}(f_k'' + (N-1) f_k'/r - ν_k f_k/r²)."""
    N, b = field.params.N, field.params.beta
    r = field.grid.radii
    modes = []
    for m in field.modes:
        f, f1, f2, f3, f4 = (m.derivative(j) for j in range(5))
        nu = m.eigenvalue
        L0 = f2 + (N - 1) * f1 / r - nu * f / r**2
        L1 = f3 + (N - 1) * (f2 / r - f1 / r**2) - nu * (f1 / r**2 - 2 * f / r**3)
        L2 = (f4 + (N - 1) * (f3 / r - 2 * f2 / r**2 + 2 * f1 / r**3)
              - nu * (f2 / r**2 - 4 * f1 / r**3 + 6 * f / r**4))
        w = -(r ** (-b))
        v0 = w * L0
        v1 = w * (L1 - b * L0 / r)
        v2 = w * (L2 - 2 * b * L1 / r + b * (b + 1) * L0 / r**2)
        modes.append(_make_mode(m.degree, N, [v0, v1, v2], grid=field.grid))
    s = field.power_exponent
    return Field(field.params, field.grid, tuple(modes), field.derivatives_analytic,
                 None if s is None else s - 2 - b)


class Termination(enum.Enum):
    ReachedRmax = "ReachedRmax"
    BlowupDetected = "BlowupDetected"

    def __str__(self):
        return self.value


@dataclass(frozen=True, eq=False)
class ShootingResult:
    field: Field
    v_profile: np.ndarray
    v_prime: np.ndarray
    termination_radius: float
    terminated: Termination


def shoot(params: SystemParams, a: float, b: float, grid: RadialGrid,
          refine: int = 1, max_step_ratio: float = MAX_STEP_RATIO) -> ShootingResult:
    """Integrate the radial system from u(0) = a, v(0) = b with classical RK4.

    Starts at r0 = r_min/4 from the two-term expansion at the origin; steps
    never exceed min(grid spacing, r·max_step_ratio)/refine and land exactly
    on every grid radius.  Stops when |u| + |v| exceeds 1e12.
    """
    N, p, al, be = params.N, params.p, params.alpha, params.beta
    if al <= -2:
        raise ParameterError(f"shooting needs alpha > -2, got {al!r}")
    if grid.r_min > 1e-2:
        raise RangeError(f"shooting grid must start at r <= 1e-2, got {grid.r_min!r}")
    if refine < 1:
        raise ParameterError("refine must be a positive integer")

    def rhs(r, u, up, v, vp):
        return (up, -(r**be) * v - (N - 1) / r * up,
                vp, -(r**al) * abs(u) ** (p - 1) * u - (N - 1) / r * vp)

    def rk4(r, y, h):
        k1 = rhs(r, *y)
        k2 = rhs(r + h / 2, *(yi + h / 2 * ki for yi, ki in zip(y, k1)))
        k3 = rhs(r + h / 2, *(yi + h / 2 * ki for yi, ki in zip(y, k2)))
        k4 = rhs(r + h, *(yi + h * ki for yi, ki in zip(y, k3)))
        return tuple(yi + h / 6 * (a1 + 2 * a2 + 2 * a3 + a4)
                     for yi, a1, a2, a3, a4 in zip(y, k1, k2, k3, k4))

    def blown(y):
        return not (math.isfinite(y[0]) and math.isfinite(y[2])) or abs(y[0]) + abs(y[2]) > BLOWUP_THRESHOLD

    r = grid.r_min / 4
    src = abs(a) ** (p - 1) * a
    y = (a - b * r ** (be + 2) / ((be + 2) * (be + N)),
         -b * r ** (be + 1) / (be + N),
         b - src * r ** (al + 2) / ((al + 2) * (al + N)),
         -src * r ** (al + 1) / (al + N))

    radii = grid.radii
    states = []
    terminated = Termination.ReachedRmax
    for i, target in enumerate(radii):
        if i == 0:
            while r < target:
                h = min(r * max_step_ratio / refine, target - r)
                y = rk4(r, y, h)
                r = target if target - (r + h) <= 1e-15 * target else r + h
        else:
            span = target - radii[i - 1]
            hmax = min(span, radii[i - 1] * max_step_ratio) / refine
            nsub = max(1, math.ceil(span / hmax * (1 - 1e-12)))
            h = span / nsub
            for j in range(nsub):
                y = rk4(r, y, h)
                r = radii[i - 1] + (j + 1) * h if j + 1 < nsub else target
                if blown(y):
                    break
        if blown(y):
            terminated = Termination.BlowupDetected
            break
        states.append(y)

    n = len(states)
    if n < 3:
        raise RangeError(f"solution blew up before r = {radii[min(2, radii.size - 1)]!r}")
    kept = grid.head(n) if n < grid.count else grid
    rr = kept.radii
    u, u1, v, v1 = (np.array(c) for c in zip(*states))
    v2 = -(rr**al) * np.abs(u) ** (p - 1) * u - (N - 1) / rr * v1
    u2 = -(rr**be) * v - (N - 1) / rr * u1
    u3 = -be * rr ** (be - 1) * v - rr**be * v1 + (N - 1) * (u1 / rr**2 - u2 / rr)
    u4 = (-be * (be - 1) * rr ** (be - 2) * v - 2 * be * rr ** (be - 1) * v1 - rr**be * v2
          + (N - 1) * (-2 * u1 / rr**3 + 2 * u2 / rr**2 - u3 / rr))
    scale = 1.0 / angular_basis(float(N), (0,)).norms[0]
    mode = _make_mode(0, N, [c * scale for c in (u, u1, u2, u3, u4)])
    field = Field(params, kept, (mode,), True)
    return ShootingResult(field, v, v1, r if terminated is Termination.BlowupDetected else float(rr[-1]),
                          terminated)


def u_values(field: Field, r_index=None):
    """Pointwise u on the angular nodes (for pure radial fields, the radial profile)."""
    vals = field.on_sphere(0)
    return vals if r_index is None else vals[r_index]


# CSV dump --------------------------------------------------------------------

def _fmt(x):
    return f"{x:.16e}"


def field_to_csv(field: Field, comments: Sequence[str] = ()) -> str:
    """Header ``r,f0,f0_r,f0_rr,...``; parameters on the first '#' line."""
    buf = io.StringIO()
    P = field.params
    buf.write(f"# N={_fmt(P.N)} p={_fmt(P.p)} alpha={_fmt(P.alpha)} beta={_fmt(P.beta)}\n")
    for c in comments:
        buf.write(f"# {c}\n")
    header = ["r"]
    for m in field.modes:
        header += [f"f{m.degree}", f"f{m.degree}_r", f"f{m.degree}_rr"]
    buf.write(",".join(header) + "\n")
    cols = [field.grid.radii]
    for m in field.modes:
        cols += [m.f, m.fp, m.fpp]
    for row in zip(*cols):
        buf.write(",".join(_fmt(x) for x in row) + "\n")
    return buf.getvalue()


def field_from_csv(text: str, params: Optional[SystemParams] = None):
    """Inverse of ``field_to_csv``; returns (field, comment lines).

    Third and fourth derivatives are not stored and are rebuilt by
    differences, so the result has ``derivatives_analytic = False``.
    """
    comments, rows = [], []
    for line in text.splitlines():
        if line.startswith("#"):
            comments.append(line[1:].strip())
        elif line.strip():
            rows.append(line)
    if params is None:
        kv = dict(item.split("=", 1) for item in comments[0].split())
        params = SystemParams(float(kv["N"]), float(kv["p"]), float(kv["alpha"]), float(kv["beta"]))
    reader = csv.reader(rows)
    header = next(reader)
    data = np.array([[float(x) for x in row] for row in reader])
    grid = RadialGrid(data[:, 0])
    modes = []
    for j in range(1, len(header), 3):
        k = int(header[j][1:])
        vals = [data[:, j], data[:, j + 1], data[:, j + 2]]
        modes.append(_make_mode(k, params.N, vals, grid=grid))
    return Field(params, grid, tuple(modes), False), comments
