"""Threshold functions in the dimension variable and the critical dimension.

``h(N) = f(N) - F(N)`` is positive at the hyperbola value 4+β+2λ and negative
at 4+β+(4p+1)λ; its least root in between is the critical dimension.  The
root is located by a uniform scan followed by bisection, so uniqueness in the
bracket is never assumed.

All functions accept any object with ``p``, ``alpha`` and ``beta``
attributes (``Exponents`` or ``SystemParams``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import BracketError, NoRootError, ParameterError

SCAN_POINTS = 4096


@dataclass(frozen=True)
class ThresholdValues:
    f: float
    g: float
    F: float
    G: float
    f_prime: float
    F_prime: float


def _lam_mu(params):
    p, a, b = params.p, params.alpha, params.beta
    return (4 + a + b) / (p - 1), (4 + a + b * p) / (p - 1)


def _f(N, params):
    lam, mu = _lam_mu(params)
    return params.p * lam * (mu + 2) * (N - 2 - lam) * (N - 4 - mu)


def _F(N, params):
    b = params.beta
    return (N + b) ** 2 * (N - 4 - b) ** 2 / 16


def gap(N, params):
    """h(N) = f(N) - F(N); vectorised over N."""
    return _f(N, params) - _F(N, params)


def threshold_functions(N: float, params) -> ThresholdValues:
    p, a, b = params.p, params.alpha, params.beta
    lam, mu = _lam_mu(params)
    return ThresholdValues(
        f=_f(N, params),
        g=p * (mu + 2) * (N - 4 - mu) + p * lam * (N - 2 - lam),
        F=_F(N, params),
        G=(N + b) * (N - 4 - b) / 2,
        f_prime=p * lam * (2 + mu) * (2 * N - 6 - b - (8 + 2 * a + 2 * b) / (p - 1)),
        F_prime=(N + b) * (N - 2) * (N - 4 - b) / 4,
    )


@dataclass(frozen=True)
class EndpointGaps:
    left_gap: float
    right_gap_formula: float
    g_gap: float
    f_prime_gap: float


def endpoint_gaps(params) -> EndpointGaps:
    """Closed forms for the gaps at the bracket ends (see ``bracket``)."""
    p, b = params.p, params.beta
    lam, _ = _lam_mu(params)
    s = 2 + b + lam
    return EndpointGaps(
        left_gap=(p - 1) * lam**2 * s**2,
        right_gap_formula=(
            4 * p**2 * lam**2 * s * (2 + b + 4 * p * lam)
            - (4 * p + 1) ** 2 * lam**2 / 16 * ((4 + 2 * b) + (4 * p + 1) * lam) ** 2
        ),
        g_gap=2 * (p - 1) * lam * s,
        f_prime_gap=(p - 1) * lam * s * (2 + b + 2 * lam),
    )


def bracket(params):
    lam, _ = _lam_mu(params)
    b = params.beta
    return 4 + b + 2 * lam, 4 + b + (4 * params.p + 1) * lam


@dataclass(frozen=True)
class CritDimResult:
    bracket_lo: float
    bracket_hi: float
    root: float
    gap_lo: float
    gap_hi: float
    scan_points: int
    bisections: int
    cowan_bound: Optional[float]
    fazly_bound: Optional[float]


def critical_dimension(params, rel_tol: float = 1e-12) -> CritDimResult:
    if not 0 < rel_tol <= 1e-3:
        raise ParameterError(f"rel_tol must lie in (0, 1e-3], got {rel_tol!r}")
    lo, hi = bracket(params)
    gap_lo, gap_hi = gap(lo, params), gap(hi, params)
    if not (gap_lo > 0 and gap_hi < 0):
        raise BracketError(
            f"endpoint gaps have the wrong signs: h({lo!r}) = {gap_lo!r}, h({hi!r}) = {gap_hi!r}"
        )

    xs = np.linspace(lo, hi, SCAN_POINTS)
    hs = gap(xs, params)
    crossings = np.nonzero((hs[:-1] > 0) & (hs[1:] <= 0))[0]
    if crossings.size == 0:
        raise NoRootError(f"no + to - sign change of h on [{lo!r}, {hi!r}]")
    i = int(crossings[0])
    a, b = float(xs[i]), float(xs[i + 1])
    if gap(b, params) == 0:
        a = b

    bisections = 0
    while b - a > rel_tol * abs(b) and a != b:
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        if gap(mid, params) > 0:
            a = mid
        else:
            b = mid
        bisections += 1

    bounds = literature_bounds(params)
    return CritDimResult(
        bracket_lo=lo,
        bracket_hi=hi,
        root=0.5 * (a + b),
        gap_lo=gap_lo,
        gap_hi=gap_hi,
        scan_points=SCAN_POINTS,
        bisections=bisections,
        cowan_bound=bounds.cowan,
        fazly_bound=bounds.fazly,
    )


@dataclass(frozen=True)
class LiteratureBounds:
    cowan: Optional[float]
    fazly: Optional[float]


def cowan_bound(p):
    s = math.sqrt(2 * p / (p + 1))
    return 2 + 4 * (p + 1) / (p - 1) * (s + math.sqrt(s * s - s))


def fazly_bound(p, alpha):
    return 8 + 3 * alpha + (8 + 4 * alpha) / (p - 1)


def literature_bounds(params) -> LiteratureBounds:
    """Earlier nonexistence dimensions: Cowan's (α=β=0) and Fazly's (α=β)."""
    p, a, b = params.p, params.alpha, params.beta
    return LiteratureBounds(
        cowan=cowan_bound(p) if a == 0 and b == 0 else None,
        fazly=fazly_bound(p, a) if a == b else None,
    )


def printed_quartic(params, y):
    """The quartic in y exactly as it is displayed in the source derivation."""
    p, a, b = params.p, params.alpha, params.beta
    c4 = p**4 - 4 * p**3 + 6 * p**2 - 4 * p + 1
    c3 = -(8 * p**4 - 32 * p**3 + 48 * p**2 - 32 * p + 8)
    c2 = -(p**2 - 2 * p + 1) * (
        (32 * a + 104 * b + 16 * a * b + 18 * b**2 + 112) * p**2
        + (16 * a * b + 16 * a**2 - 4 * b**2 + 16 * b + 96 * a + 160) * p
        + 8 * b + 2 * b**2 - 16
    )
    inner = (
        (48 + 44 * b + 12 * b**2 + 8 * a * b + 12 * a + a * b**2 + b**3) * p**2
        + (64 + 56 * a + 28 * a * b + 10 * a**2 + 40 * b + 10 * b**2
           + 4 * a * b**2 + 3 * a**2 * b + b**3) * p
        + 28 * a + 16 + 14 * a**2 + 2 * a**3 + 12 * b + 12 * a * b
        + 3 * a**2 * b + 2 * b**2 + a * b**2
    )
    c1 = inner * 16 * (p**2 - p) - (p - 1) ** 4 * (32 * b + 8 * b**2)
    c0 = (p - 1) ** 4 * b**2 * (b + 4) ** 2 - 16 * (
        (8 + (2 + b) * a + (6 + b) * b) * p + (6 + a + b) * a + 2 * b + 8
    ) * (
        (8 + 2 * b) * p**2 + (6 * b + 6 * a + a * b + b**2 + 8) * p + 2 * a + a**2 + a * b
    ) * p
    return (((c4 * y + c3) * y + c2) * y + c1) * y + c0


def printed_quartic_gap(params, y):
    """Printed quartic minus 16(p-1)^4 (F - f), a transcription diagnostic.

    Zero iff the displayed coefficients agree with the closed-form
    threshold functions at y.
    """
    return printed_quartic(params, y) - 16 * (params.p - 1) ** 4 * (_F(y, params) - _f(y, params))
