"""Radial quadrature and differentiation on log-uniform grids.

Every radial grid in the package is uniform in t = ln r, so integrals are
done by composite Simpson in t (dr = r dt) and derivatives by five-point
stencils in t (d/dr = r^{-1} d/dt).
"""

import numpy as np
from scipy.integrate import cumulative_simpson, simpson


def integrate_t(density, radii, h):
    """Integral over [radii[0], radii[-1]] of a per-dr density."""
    return float(simpson(density * radii, dx=h))


def cumulative_t(density, radii, h):
    """Running integral from radii[0]; same length as ``radii``, starts at 0."""
    return cumulative_simpson(density * radii, dx=h, initial=0.0)


# One-sided fourth-order first-derivative stencils for the two end points.
_LEFT = (
    np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0,
    np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / 12.0,
)


def d_dt(values, h):
    """Fourth-order d/dt along axis 0, one-sided at the ends."""
    v = np.asarray(values, dtype=float)
    if v.shape[0] < 5:
        raise ValueError("need at least five samples for a five-point stencil")
    out = np.empty_like(v)
    out[2:-2] = (v[:-4] - 8.0 * v[1:-3] + 8.0 * v[3:-1] - v[4:]) / (12.0 * h)
    for i, w in enumerate(_LEFT):
        out[i] = np.tensordot(w, v[:5], axes=(0, 0)) / h
        out[-1 - i] = -np.tensordot(w, v[::-1][:5], axes=(0, 0)) / h
    return out


def d_dr(values, radii, h):
    v = np.asarray(values, dtype=float)
    shape = (-1,) + (1,) * (v.ndim - 1)
    return d_dt(v, h) / radii.reshape(shape)


def central_d_dr(values, radii, h):
    """Centered five-point d/dr; the two points at each end are NaN."""
    v = np.asarray(values, dtype=float)
    out = np.full_like(v, np.nan)
    out[2:-2] = (v[:-4] - 8.0 * v[1:-3] + 8.0 * v[3:-1] - v[4:]) / (12.0 * h * radii[2:-2])
    return out
