"""Zonal spherical harmonics on S^{N-1} for real N.

Ψ_k(φ) is the Gegenbauer polynomial C_k^{(N-2)/2}(cos φ), scaled so that
∫_{S^{N-1}} Ψ_k² dσ = 1.  Angular integrals use dσ = |S^{N-2}| sin^{N-2}φ dφ
with Gauss–Legendre on [0, π].
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

GL_NODES = 256


def sphere_area(N):
    """|S^{N-1}|, the area of the unit sphere in R^N."""
    return 2.0 * math.pi ** (N / 2) / math.gamma(N / 2)


def gegenbauer(k, order, x):
    """C_k^order(x) by the three-term recurrence; ``order`` may be any positive real."""
    x = np.asarray(x, dtype=float)
    if k < 0:
        return np.zeros_like(x)
    prev = np.ones_like(x)
    if k == 0:
        return prev
    cur = 2.0 * order * x
    for n in range(2, k + 1):
        prev, cur = cur, (2.0 * x * (n + order - 1) * cur - (n + 2 * order - 2) * prev) / n
    return cur


def gegenbauer_derivatives(k, order, x):
    """(C, C', C'') at x using d/dx C_k^a = 2a C_{k-1}^{a+1}."""
    c = gegenbauer(k, order, x)
    c1 = 2 * order * gegenbauer(k - 1, order + 1, x)
    c2 = 4 * order * (order + 1) * gegenbauer(k - 2, order + 2, x)
    return c, c1, c2


def eigenvalue(k, N):
    """ν_k = k(k+N-2); -ν_k is the Laplace–Beltrami eigenvalue of Ψ_k."""
    return k * (k + N - 2)


class AngularBasis:
    """Nodes, weights and normalized Ψ_k, dΨ_k/dφ for a set of degrees."""

    def __init__(self, N, degrees, nodes=GL_NODES):
        self.N = float(N)
        self.degrees = tuple(degrees)
        x, w = np.polynomial.legendre.leggauss(nodes)
        self.phi = 0.5 * math.pi * (x + 1.0)
        sin = np.sin(self.phi)
        self.weights = 0.5 * math.pi * w * sphere_area(N - 1) * sin ** (N - 2)
        order = (N - 2) / 2
        cos = np.cos(self.phi)
        psi, dpsi, norms = [], [], []
        for k in self.degrees:
            c, c1, _ = gegenbauer_derivatives(k, order, cos)
            norm = 1.0 / math.sqrt(float(np.dot(self.weights, c * c)))
            norms.append(norm)
            psi.append(norm * c)
            dpsi.append(-norm * sin * c1)
        self.norms = np.array(norms)
        self.psi = np.array(psi)
        self.dpsi = np.array(dpsi)

    def integrate(self, values):
        """∫_{S^{N-1}} over the last axis of ``values`` sampled at the nodes."""
        return values @ self.weights


@lru_cache(maxsize=64)
def angular_basis(N, degrees):
    return AngularBasis(N, degrees)


def sphere_moment(N, k, q):
    """∫_{S^{N-1}} |Ψ_k|^q dσ."""
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q!r}")
    basis = angular_basis(float(N), (int(k),))
    return float(basis.integrate(np.abs(basis.psi[0]) ** q))


def laplace_beltrami_defect(N, k, x):
    """Relative defect of Δ_θ Ψ_k = -ν_k Ψ_k at x = cos φ.

    In x the eigen-equation is the Gegenbauer equation
    (1-x²)C'' - (N-1)x C' + ν_k C = 0.
    """
    c, c1, c2 = gegenbauer_derivatives(k, (N - 2) / 2, x)
    nu = eigenvalue(k, N)
    lhs = (1 - x * x) * c2 - (N - 1) * x * c1
    scale = np.maximum(np.abs(nu * c), np.abs(lhs)).max() + 1e-300
    return float(np.max(np.abs(lhs + nu * c)) / scale)
