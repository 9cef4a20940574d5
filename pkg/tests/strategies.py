"""Hypothesis strategies for admissible parameter tuples."""

from hypothesis import assume
from hypothesis import strategies as st

from llab.params import Exponents, SystemParams

finite = dict(allow_nan=False, allow_infinity=False)


@st.composite
def exponents(draw, p_max=20.0, alpha_max=8.0, beta_max=4.0):
    p = draw(st.floats(1.05, p_max, **finite))
    alpha = draw(st.floats(-3.9, alpha_max, **finite))
    beta = draw(st.floats(0.0, beta_max, **finite))
    return Exponents(p, alpha, beta)


@st.composite
def system_params(draw, N_max=60.0):
    e = draw(exponents())
    N = draw(st.floats(5.0, N_max, **finite))
    assume(e.beta <= (N - 4) / 2)
    return SystemParams(N, e.p, e.alpha, e.beta)
