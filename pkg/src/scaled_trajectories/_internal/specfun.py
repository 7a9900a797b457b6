"""
Fresnel integrals and the error function family.

Only exp/sin/cos/sqrt from the standard library are used, so the accuracy of every branch can be
checked in-repo against the quadrature oracles.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from scaled_trajectories._internal.exceptions import InvalidParameterException

FRESNEL_SERIES_CUTOFF = 1.6
FRESNEL_ASYMPTOTIC_CUTOFF = 1.0e3
ERF_SERIES_CUTOFF = 3.0

_EPS = 1.0e-16
_CF_TOLERANCE = 1.0e-15
_FPMIN = 1.0e-300
_MAX_ITERATIONS = 1000
_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)
_SPLITTER = 134217729.0  # 2**27 + 1


class FresnelPair(NamedTuple):
    c: float
    s: float


class ErfPair(NamedTuple):
    erf: float
    erfc: float


def _require_finite(u: float, name: str) -> float:
    u = float(u)
    if not math.isfinite(u):
        raise InvalidParameterException(f"{name} is defined for finite arguments only, got {u!r}")
    return u


def _half_pi_square_phase(x: float) -> tuple[float, float]:
    """cos and sin of pi x**2 / 2 with x**2 reduced modulo 4 before scaling."""
    square = x * x
    # exact rounding error of x*x (Dekker split)
    scaled = _SPLITTER * x
    high = scaled - (scaled - x)
    low = x - high
    error = ((high * high - square) + 2.0 * high * low) + low * low
    phase = 0.5 * math.pi * (math.fmod(square, 4.0) + error)
    return math.cos(phase), math.sin(phase)


def _fresnel_series(x: float) -> FresnelPair:
    t = 0.5 * math.pi * x * x
    c = x
    s = 0.0
    term = x
    for k in range(1, _MAX_ITERATIONS):
        term *= t / k
        contribution = term / (2 * k + 1)
        if k % 2 == 0:
            c += contribution if k % 4 == 0 else -contribution
            total = abs(c)
        else:
            s += contribution if k % 4 == 1 else -contribution
            total = abs(s)
        if contribution <= _EPS * total:
            break
    return FresnelPair(c, s)


def _fresnel_continued_fraction(x: float) -> FresnelPair:
    pix2 = math.pi * x * x
    b = complex(1.0, -pix2)
    cc = complex(1.0 / _FPMIN, 0.0)
    d = h = 1.0 / b
    n = -1
    for _ in range(_MAX_ITERATIONS):
        n += 2
        a = -n * (n + 1)
        b += 4.0
        d = 1.0 / (a * d + b)
        cc = b + a / cc
        delta = cc * d
        h *= delta
        if abs(delta.real - 1.0) + abs(delta.imag) < _CF_TOLERANCE:
            break
    h *= complex(x, -x)
    cos_phase, sin_phase = _half_pi_square_phase(x)
    cs = complex(0.5, 0.5) * (1.0 - complex(cos_phase, sin_phase) * h)
    return FresnelPair(cs.real, cs.imag)


def _fresnel_asymptotic(x: float) -> FresnelPair:
    f = 1.0 / (math.pi * x)
    g = 1.0 / (math.pi**2 * x**3)
    cos_phase, sin_phase = _half_pi_square_phase(x)
    return FresnelPair(
        0.5 + f * sin_phase - g * cos_phase,
        0.5 - f * cos_phase - g * sin_phase,
    )


def fresnel(u: float) -> FresnelPair:
    """
    Fresnel integrals C(u) and S(u) of F(u) = int_0^u exp(i pi x**2 / 2) dx.

    :raises InvalidParameterException: for non-finite ``u``
    """
    u = _require_finite(u, "fresnel")
    x = abs(u)
    if x <= FRESNEL_SERIES_CUTOFF:
        pair = _fresnel_series(x)
    elif x < FRESNEL_ASYMPTOTIC_CUTOFF:
        pair = _fresnel_continued_fraction(x)
    else:
        pair = _fresnel_asymptotic(x)
    if u < 0:
        return FresnelPair(-pair.c, -pair.s)
    return pair


def _erf_series(x: float) -> float:
    square = x * x
    term = x
    total = x
    for n in range(1, _MAX_ITERATIONS):
        term *= 2.0 * square / (2 * n + 1)
        total += term
        if term <= _EPS * total:
            break
    return _TWO_OVER_SQRT_PI * math.exp(-square) * total


def _erfc_continued_fraction(x: float) -> float:
    f = x
    c = x
    d = 0.0
    for k in range(1, _MAX_ITERATIONS):
        a = 0.5 * k
        d = 1.0 / (x + a * d)
        c = x + a / c
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < _CF_TOLERANCE:
            break
    return math.exp(-x * x) / (math.sqrt(math.pi) * f)


def erf_family(u: float) -> ErfPair:
    """
    Return (erf(u), erfc(u)).

    :raises InvalidParameterException: for non-finite ``u``
    """
    u = _require_finite(u, "erf")
    x = abs(u)
    if x < ERF_SERIES_CUTOFF:
        erf = _erf_series(x)
        erfc = 1.0 - erf
    else:
        erfc = _erfc_continued_fraction(x)
        erf = 1.0 - erfc
    if u < 0:
        return ErfPair(-erf, 1.0 + erf)
    return ErfPair(erf, erfc)


def fresnel_array(u: ArrayLike) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Elementwise :func:`fresnel`."""
    values = np.asarray(u, dtype=np.float64)
    c = np.empty_like(values)
    s = np.empty_like(values)
    for index, value in np.ndenumerate(values):
        c[index], s[index] = fresnel(float(value))
    return c, s


def _erf_series_array(x: NDArray[np.float64]) -> NDArray[np.float64]:
    square = x * x
    term = x.copy()
    total = x.copy()
    active = np.ones(x.shape, dtype=bool)
    for n in range(1, _MAX_ITERATIONS):
        term[active] *= 2.0 * square[active] / (2 * n + 1)
        total[active] += term[active]
        active &= term > _EPS * total
        if not active.any():
            break
    return _TWO_OVER_SQRT_PI * np.exp(-square) * total


def _erfc_continued_fraction_array(x: NDArray[np.float64]) -> NDArray[np.float64]:
    f = x.copy()
    c = x.copy()
    d = np.zeros_like(x)
    active = np.ones(x.shape, dtype=bool)
    for k in range(1, _MAX_ITERATIONS):
        a = 0.5 * k
        d[active] = 1.0 / (x[active] + a * d[active])
        c[active] = x[active] + a / c[active]
        delta = c[active] * d[active]
        f[active] *= delta
        still = np.abs(delta - 1.0) >= _CF_TOLERANCE
        active[active] = still
        if not active.any():
            break
    return np.exp(-x * x) / (math.sqrt(math.pi) * f)


def erf_family_array(u: ArrayLike) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """
    Vectorized :func:`erf_family`; every element takes the same branch and stopping rule as the scalar call.

    :raises InvalidParameterException: if any element is non-finite
    """
    values = np.asarray(u, dtype=np.float64)
    if not np.isfinite(values).all():
        raise InvalidParameterException("erf is defined for finite arguments only")
    x = np.abs(values)
    erf = np.empty_like(x)
    erfc = np.empty_like(x)
    near = x < ERF_SERIES_CUTOFF
    if near.any():
        erf[near] = _erf_series_array(x[near])
        erfc[near] = 1.0 - erf[near]
    far = ~near
    if far.any():
        erfc[far] = _erfc_continued_fraction_array(x[far])
        erf[far] = 1.0 - erfc[far]
    negative = values < 0
    erfc[negative] = 1.0 + erf[negative]
    erf[negative] = -erf[negative]
    return erf, erfc
