"""Exact and quadrature checks of two integration-by-parts identities.

``MultiPoly`` is a small exact polynomial type (integer or Fraction
coefficients) used to confirm the pointwise fourth-order identity for
Δζ Δ(ζη²) coefficient by coefficient.  ``PowerSum`` represents radial
functions Σ c_s r^s, closed under products, d/dr and the radial Laplacian,
which is enough to evaluate every integrand of the weighted
integration-by-parts identities in closed form before quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import DegreeOverflow, ParameterError, SupportError
from .functionals import ResidualReport
from .params import SystemParams
from .quadrature import integrate_t

MAX_DEGREE = 24
MAX_VARIABLES = 4


class MultiPoly:
    """Polynomial in n variables; ``terms`` maps exponent tuples to nonzero coefficients."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping = None):
        if not 1 <= n <= MAX_VARIABLES:
            raise ParameterError(f"number of variables must be in [1, {MAX_VARIABLES}], got {n!r}")
        self.n = n
        clean = {}
        for exp, c in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != n or min(exp) < 0:
                raise ValueError(f"bad exponent {exp!r} for {n} variables")
            if c != 0:
                clean[exp] = clean.get(exp, 0) + c
        self.terms = {e: c for e, c in clean.items() if c != 0}
        if self.degree() > MAX_DEGREE:
            raise DegreeOverflow(f"degree {self.degree()} exceeds {MAX_DEGREE}")

    @classmethod
    def const(cls, n, c):
        return cls(n, {(0,) * n: c})

    @classmethod
    def var(cls, n, i, power=1):
        e = [0] * n
        e[i] = power
        return cls(n, {tuple(e): 1})

    def degree(self):
        return max((sum(e) for e in self.terms), default=0)

    def is_zero(self):
        return not self.terms

    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            if other.n != self.n:
                raise ValueError("variable counts differ")
            return other
        return MultiPoly.const(self.n, other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0) + c
        return MultiPoly(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.n, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly(self.n, out)

    __rmul__ = __mul__

    def __pow__(self, k):
        out = MultiPoly.const(self.n, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        return self.terms == other.terms

    def __repr__(self):
        return f"MultiPoly({self.n}, {self.terms!r})"

    def diff(self, i):
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                d = list(e)
                d[i] -= 1
                out[tuple(d)] = c * e[i]
        return MultiPoly(self.n, out)

    def gradient(self):
        return [self.diff(i) for i in range(self.n)]

    def laplacian(self):
        out = MultiPoly(self.n)
        for i in range(self.n):
            out = out + self.diff(i).diff(i)
        return out

    def __call__(self, *x):
        return sum(c * math.prod(xi**ei for xi, ei in zip(x, e)) for e, c in self.terms.items())


def dot(a, b):
    out = MultiPoly(a[0].n)
    for x, y in zip(a, b):
        out = out + x * y
    return out


@dataclass(frozen=True)
class PolyCalculus:
    gradient: list
    laplacian: MultiPoly


def poly_calculus(p: MultiPoly) -> PolyCalculus:
    return PolyCalculus(p.gradient(), p.laplacian())


def lemma21_check(zeta: MultiPoly, eta: MultiPoly) -> MultiPoly:
    """LHS - RHS of

        Δζ Δ(ζη²) = [Δ(ζη)]² - 4(∇ζ·∇η)² - ζ²|Δη|² + 2ζΔζ|∇η|² - 4ζΔη ∇ζ·∇η,

    which is the zero polynomial for every pair.
    """
    lz, le = zeta.laplacian(), eta.laplacian()
    gz, ge = zeta.gradient(), eta.gradient()
    cross = dot(gz, ge)
    lhs = lz * (zeta * eta * eta).laplacian()
    rhs = (
        (zeta * eta).laplacian() ** 2
        - 4 * cross * cross
        - zeta * zeta * le * le
        + 2 * zeta * lz * dot(ge, ge)
        - 4 * zeta * le * cross
    )
    return lhs - rhs


def random_poly(rng, n=3, degree=4, coef=5, density=0.5):
    """Random polynomial of total degree <= ``degree`` with integer coefficients in [-coef, coef]."""
    terms = {}
    for exps in np.ndindex(*(degree + 1,) * n):
        if sum(exps) <= degree and rng.random() < density:
            terms[tuple(int(e) for e in exps)] = int(rng.integers(-coef, coef + 1))
    return MultiPoly(n, terms)


# radial power sums ---------------------------------------------------------------

class PowerSum:
    """Σ_s c_s r^s with real exponents s."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping = None):
        self.terms = {float(s): float(c) for s, c in (terms or {}).items() if c != 0}

    @classmethod
    def poly(cls, coefs):
        """From ascending coefficients of a polynomial in r."""
        return cls({k: c for k, c in enumerate(coefs)})

    def __add__(self, other):
        out = dict(self.terms)
        for s, c in _ps(other).terms.items():
            out[s] = out.get(s, 0.0) + c
        return PowerSum(out)

    __radd__ = __add__

    def __neg__(self):
        return PowerSum({s: -c for s, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_ps(other))

    def __mul__(self, other):
        out = {}
        for s1, c1 in self.terms.items():
            for s2, c2 in _ps(other).terms.items():
                out[s1 + s2] = out.get(s1 + s2, 0.0) + c1 * c2
        return PowerSum(out)

    __rmul__ = __mul__

    def shift(self, a):
        """r^a · self."""
        return PowerSum({s + a: c for s, c in self.terms.items()})

    def d(self):
        return PowerSum({s - 1: c * s for s, c in self.terms.items() if s != 0})

    def laplacian(self, N):
        """Radial Laplacian g'' + (N-1)g'/r, termwise s(s+N-2) r^{s-2}."""
        return PowerSum({s - 2: c * s * (s + N - 2) for s, c in self.terms.items()})

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        for s, c in sorted(self.terms.items()):
            out = out + c * r**s
        return out

    def integral(self, a, b):
        """Exact ∫_a^b."""
        total = 0.0
        for s, c in self.terms.items():
            if s <= -1 and a == 0:
                raise ValueError(f"r^{s} is not integrable at 0")
            total += c * (math.log(b / a) if s == -1 else (b ** (s + 1) - a ** (s + 1)) / (s + 1))
        return total


def _ps(x):
    return x if isinstance(x, PowerSum) else PowerSum({0: x})


ETA_POWER = 6
R_MIN = 1e-6
IBP_POINTS = 4001


class RadialBump:
    """η(r) = (1 - r²)^m on r <= 1, kept as Σ c r^i s^j with s = 1 - r².

    The factored form keeps derivatives accurate near r = 1, where the
    expanded monomial sum would cancel catastrophically.
    """

    def __init__(self, power=ETA_POWER):
        if power < 5:
            raise SupportError("the bump needs power >= 5 for four vanishing derivatives")
        self.power = power

    def derivative_terms(self, order):
        terms = {(0, self.power): 1.0}
        for _ in range(order):
            nxt = {}
            for (i, j), c in terms.items():
                if i:
                    nxt[(i - 1, j)] = nxt.get((i - 1, j), 0.0) + c * i
                if j:
                    nxt[(i + 1, j - 1)] = nxt.get((i + 1, j - 1), 0.0) - 2 * c * j
            terms = nxt
        return terms

    def __call__(self, r, order=0):
        r = np.asarray(r, dtype=float)
        s = np.where(r <= 1, 1 - r * r, 0.0)
        out = np.zeros_like(r)
        for (i, j), c in sorted(self.derivative_terms(order).items()):
            out = out + c * r**i * s**j
        return out


@dataclass(frozen=True)
class IbpReport:
    eq21: ResidualReport
    eq22: ResidualReport


def lemma22_check(zeta, params: SystemParams, points: int = IBP_POINTS,
                  eta: RadialBump = None) -> IbpReport:
    """Both weighted integration-by-parts identities for radial ζ and η.

    ``zeta`` is a PowerSum (or ascending polynomial coefficients in r);
    η defaults to (1-r²)^6, whose first four derivatives vanish at r = 1
    so no boundary terms arise.  Integrals run over [1e-6, 1] on a
    log-uniform Simpson grid of ``points`` nodes.  The relative residual
    is taken against the sum of the L¹ norms of all integrands, since some
    sides vanish identically (ζ constant).  ``truncation`` estimates the
    excluded ball B_{1e-6}.
    """
    if not isinstance(zeta, PowerSum):
        zeta = PowerSum.poly(zeta)
    eta = RadialBump() if eta is None else eta
    if not isinstance(eta, RadialBump):
        raise SupportError("eta must be a compactly supported RadialBump")
    N, b = params.N, params.beta

    r = np.exp(np.linspace(math.log(R_MIN), 0.0, points))
    r[0], r[-1] = R_MIN, 1.0
    h = -math.log(R_MIN) / (points - 1)

    Z = [zeta(r)]
    g = zeta
    for _ in range(4):
        g = g.d()
        Z.append(g(r))
    E = [eta(r, j) for j in range(4)]
    wt = r ** (-b)

    def lap(f0, f1, f2):
        return f2 + (N - 1) * f1 / r

    lz = lap(*Z[:3])
    lz1 = Z[3] + (N - 1) * (Z[2] / r - Z[1] / r**2)
    lz2 = Z[4] + (N - 1) * (Z[3] / r - 2 * Z[2] / r**2 + 2 * Z[1] / r**3)
    w1 = wt * (lz1 - b * lz / r)
    w2 = wt * (lz2 - 2 * b * lz1 / r + b * (b + 1) * lz / r**2)
    le = lap(*E[:3])
    le1 = E[3] + (N - 1) * (E[2] / r - E[1] / r**2)
    lze = lap(Z[0] * E[0], Z[1] * E[0] + Z[0] * E[1], Z[2] * E[0] + 2 * Z[1] * E[1] + Z[0] * E[2])
    g0, g1, g2 = E[1] ** 2, 2 * E[1] * E[2], 2 * E[2] ** 2 + 2 * E[1] * E[3]
    cross = Z[1] * E[1]

    lhs21 = [lap(None, w1, w2) * Z[0] * E[0] ** 2]
    rhs21 = [
        wt * lze**2,
        wt * (-4 * cross**2 + 2 * Z[0] * lz * g0),
        wt * Z[0] ** 2 * (2 * le1 * E[1] + le**2),
        wt * Z[0] ** 2 * (-2 * b) * le * E[1] / r,  # |x|^{-2} Δη (x·∇η) = Δη η'/r
    ]
    lhs22 = [2 * wt * Z[1] ** 2 * g0]
    rhs22 = [
        wt * (2 * Z[0] * (-lz) * g0 + Z[0] ** 2 * lap(g0, g1, g2)),
        wt * Z[0] ** 2 / r**2 * (b * (b + 2 - N) * g0 - 2 * b * r * g1),
    ]

    def report(lhs_parts, rhs_parts):
        L, sl = _side(lhs_parts, N, r, h)
        R, sr = _side(rhs_parts, N, r, h)
        # integrands are O(r^{N-3-β}) at the origin
        trunc = sum(abs(p[0]) for p in lhs_parts + rhs_parts) * R_MIN**N / (N - 2 - b)
        return ResidualReport.build(L, R, scale=max(abs(L), abs(R), sl + sr), truncation=trunc)

    return IbpReport(report(lhs21, rhs21), report(lhs22, rhs22))


def _side(parts, N, r, h):
    """∫ Σ parts r^{N-1} dr, and ∫ Σ |parts| r^{N-1} dr as a scale."""
    vals = [p * r ** (N - 1) for p in parts]
    return sum(integrate_t(v, r, h) for v in vals), sum(integrate_t(np.abs(v), r, h) for v in vals)
