"""System parameters, closed-form derived constants, dimension regimes.

The system is

    -Δu = |x|^β v,    -Δv = |x|^α |u|^{p-1} u    in Ω ⊂ R^N,

with the second exponent fixed to 1.  N is allowed to be any real number
>= 5 so that the critical dimension can be treated as a continuous root.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import ParameterError

ON_HYPERBOLA_ATOL = 1e-12


def _check_exponents(p, alpha, beta):
    for name, value in (("p", p), ("alpha", alpha), ("beta", beta)):
        if not math.isfinite(value):
            raise ParameterError(f"{name} must be finite, got {value!r}")
    if not p > 1:
        raise ParameterError(f"p must exceed 1, got {p!r}")
    if not alpha > -4:
        raise ParameterError(f"alpha must exceed -4, got {alpha!r}")
    if not beta >= 0:
        raise ParameterError(f"beta must be nonnegative, got {beta!r}")


@dataclass(frozen=True)
class Exponents:
    """The triple (p, α, β) without a dimension; enough for the critical dimension."""

    p: float
    alpha: float
    beta: float

    def __post_init__(self):
        _check_exponents(self.p, self.alpha, self.beta)

    @property
    def lam(self):
        return (4 + self.alpha + self.beta) / (self.p - 1)

    @property
    def mu(self):
        return (4 + self.alpha + self.beta * self.p) / (self.p - 1)

    def with_dimension(self, N):
        return SystemParams(N, self.p, self.alpha, self.beta)


@dataclass(frozen=True)
class SystemParams:
    """The tuple (N, p, α, β); construction validates every admissible range."""

    N: float
    p: float
    alpha: float
    beta: float

    def __post_init__(self):
        if not math.isfinite(self.N) or not self.N >= 5:
            raise ParameterError(f"N must be >= 5, got {self.N!r}")
        _check_exponents(self.p, self.alpha, self.beta)
        if self.beta > (self.N - 4) / 2:
            raise ParameterError(
                f"beta must not exceed (N-4)/2 = {(self.N - 4) / 2!r}, got {self.beta!r}"
            )

    @property
    def exponents(self):
        return Exponents(self.p, self.alpha, self.beta)

    @property
    def lam(self):
        return (4 + self.alpha + self.beta) / (self.p - 1)

    @property
    def mu(self):
        return (4 + self.alpha + self.beta * self.p) / (self.p - 1)

    def sobolev_exponent(self):
        """Smallest p for which the monotonicity formula applies: (N+4+2α+β)/(N-4-β)."""
        return (self.N + 4 + 2 * self.alpha + self.beta) / (self.N - 4 - self.beta)


@dataclass(frozen=True)
class DerivedParams:
    lam: float
    mu: float
    delta: float
    gamma_coef: float
    upsilon: float
    c_const: float
    sobolev_threshold: float
    bracket_hi: float


def derive(params: SystemParams) -> DerivedParams:
    N, p, a, b = params.N, params.p, params.alpha, params.beta
    lam = (4 + a + b) / (p - 1)
    mu = (4 + a + b * p) / (p - 1)
    radial = lam * (N - 2 - lam)
    outer = (mu + 2) * (N - 4 - mu)
    return DerivedParams(
        lam=lam,
        mu=mu,
        delta=(8 + 2 * a + 2 * b) / (p - 1) + 4 + b - N,
        gamma_coef=radial * outer,
        upsilon=radial + outer,
        c_const=(N - 2) * (2 + b) + 2 * lam * (N - 4 - b - lam) - b * b / 8,
        sobolev_threshold=4 + b + 2 * lam,
        bracket_hi=4 + b + (4 * p + 1) * lam,
    )


class RegimeTag(enum.Enum):
    BelowHyperbola = "BelowHyperbola"
    OnHyperbola = "OnHyperbola"
    Window = "Window"
    AtOrAboveCritDim = "AtOrAboveCritDim"

    def __str__(self):
        return self.value


def classify_regime(params: SystemParams, crit_dim: float) -> RegimeTag:
    """Place N relative to the hyperbola 4+β+2λ and the critical dimension.

    Ties with the hyperbola are resolved with an absolute tolerance of 1e-12.
    """
    threshold = 4 + params.beta + 2 * params.lam
    if not crit_dim > threshold:
        raise ParameterError(
            f"critical dimension {crit_dim!r} must exceed the hyperbola value {threshold!r}"
        )
    N = params.N
    if abs(N - threshold) <= ON_HYPERBOLA_ATOL:
        return RegimeTag.OnHyperbola
    if N < threshold:
        return RegimeTag.BelowHyperbola
    if N < crit_dim:
        return RegimeTag.Window
    return RegimeTag.AtOrAboveCritDim
