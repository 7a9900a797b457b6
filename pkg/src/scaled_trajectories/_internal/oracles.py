"""Independent reference evaluations used by the self-test suite and the unit tests."""

from __future__ import annotations

import math
from collections.abc import Callable

from scaled_trajectories._internal.specfun import ErfPair, FresnelPair


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tolerance: float = 1e-13,
    max_depth: int = 60,
) -> float:
    """
    Integrate ``f`` over [a, b] with adaptive Simpson quadrature and Richardson correction.

    :param tolerance: absolute error target for the whole interval
    :param max_depth: bisection limit per branch
    """
    if a == b:
        return 0.0
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    # explicit stack: (a, b, fa, fm, fb, whole, tolerance, depth)
    stack = [(a, b, fa, fm, fb, whole, tolerance, 0)]
    total = 0.0
    while stack:
        a, b, fa, fm, fb, whole, tol, depth = stack.pop()
        m = 0.5 * (a + b)
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        delta = left + right - whole
        if depth >= max_depth or abs(delta) <= 15.0 * tol:
            total += left + right + delta / 15.0
        else:
            stack.append((a, m, fa, flm, fm, left, 0.5 * tol, depth + 1))
            stack.append((m, b, fm, frm, fb, right, 0.5 * tol, depth + 1))
    return total


def fresnel_quadrature(u: float, tolerance: float = 1e-13) -> FresnelPair:
    return FresnelPair(
        adaptive_simpson(lambda x: math.cos(0.5 * math.pi * x * x), 0.0, u, tolerance),
        adaptive_simpson(lambda x: math.sin(0.5 * math.pi * x * x), 0.0, u, tolerance),
    )


def erf_quadrature(u: float, tolerance: float = 1e-14) -> ErfPair:
    erf = 2.0 / math.sqrt(math.pi) * adaptive_simpson(lambda x: math.exp(-x * x), 0.0, u, tolerance)
    return ErfPair(erf, 1.0 - erf)


def erf_maclaurin(u: float) -> float:
    """Maclaurin series of erf summed until the terms stop changing the total; meant for |u| <= 3."""
    terms = []
    power = u
    for n in range(400):
        term = power / (math.factorial(n) * (2 * n + 1))
        terms.append(term)
        if abs(term) < 1e-300 or (n > 2 and abs(term) < 1e-18 * abs(math.fsum(terms))):
            break
        power *= -u * u
    return 2.0 / math.sqrt(math.pi) * math.fsum(terms)
