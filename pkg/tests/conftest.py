"""Shared Hypothesis strategies and KP fixtures."""

from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from formalkp.fourier import FourierPoly
from formalkp.scalar import QI
from formalkp.symbol import FormalSymbol, psido

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

small_int = st.integers(-3, 3)


@st.composite
def qi(draw, allow_complex: bool = True):
    re = QI(draw(small_int)) / draw(st.integers(1, 3))
    im = QI(draw(small_int)) if allow_complex else QI(0)
    return re + QI(0, 1) * im


@st.composite
def fourier(draw, band: int = 2, dim: int = 1, allow_complex: bool = True, sparse: bool = True):
    coeffs = {}
    for n in range(-band, band + 1):
        if sparse and not draw(st.booleans()):
            continue
        if dim == 1:
            coeffs[n] = draw(qi(allow_complex))
        else:
            coeffs[n] = [[draw(qi(allow_complex)) for _ in range(dim)] for _ in range(dim)]
    return FourierPoly(coeffs, dim=dim)


@st.composite
def symbols(draw, top: int = 1, bottom: int = -2, parity: str | None = None, dim: int = 1, band: int = 1):
    """Complete symbols supported on grades ``bottom..top``.

    ``parity`` in {"odd", "even"} ties the minus side to the plus side.
    """
    grades = {}
    for j in range(bottom, top + 1):
        p = draw(fourier(band=band, dim=dim))
        if parity == "odd":
            m = p if j % 2 == 0 else -p
        elif parity == "even":
            m = -p if j % 2 == 0 else p
        else:
            m = draw(fourier(band=band, dim=dim))
        grades[j] = (p, m)
    return FormalSymbol(grades, dim=dim)


# KP initial data: L0 = d + u d^{-1} + u2 d^{-2} with band-2 trigonometric coefficients
U1 = FourierPoly({-2: QI(1, 2), -1: 1, 0: 2, 1: 1, 2: QI(0, 3)})
U2 = FourierPoly({-2: 3, 0: -1, 1: QI(2, -1), 2: 1})


def kp_initial(exact: bool = True) -> FormalSymbol:
    L0 = psido({1: FourierPoly.identity(), -1: U1, -2: U2})
    return L0 if exact else L0.to_float()


@pytest.fixture(scope="session")
def L0_exact() -> FormalSymbol:
    return kp_initial()
