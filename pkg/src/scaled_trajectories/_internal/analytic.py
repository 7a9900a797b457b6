"""
Closed-form solutions for time-independent or harmonically driven quadratic potentials.

All functions accept scalar or array ``t`` and return values of the same shape.
"""

from __future__ import annotations

import math
import typing

import numpy as np
from numpy.typing import ArrayLike, NDArray

from scaled_trajectories._internal.exceptions import ArrivalConditionException, InvalidParameterException

Times = typing.Union[float, ArrayLike]

_SMALL_GAMMA_T = 1e-3


class Propagators(typing.NamedTuple):
    """
    Fundamental solutions of ``x'' + gamma x' + (v2 / m) x = 0``.

    ``c`` starts at (1, 0) and ``s`` at (0, 1) in (value, derivative).
    """

    c: NDArray[np.float64]
    s: NDArray[np.float64]
    c_dot: NDArray[np.float64]
    s_dot: NDArray[np.float64]


def _require_positive(**values: float) -> None:
    for name, value in values.items():
        if not value > 0.0:
            raise InvalidParameterException(f"{name} must be positive, got {value!r}")


def _hyperbolic_parts(omega_squared: float, t: NDArray[np.float64]) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """``cosh(Omega t)`` and ``sinh(Omega t) / Omega``, continued to the oscillating and critical cases."""
    if omega_squared > 0.0:
        omega = math.sqrt(omega_squared)
        return np.cosh(omega * t), np.sinh(omega * t) / omega
    if omega_squared < 0.0:
        omega = math.sqrt(-omega_squared)
        return np.cos(omega * t), np.sin(omega * t) / omega
    return np.ones_like(t), t.copy()


def damped_omega_squared(v2: float, gamma: float, mass: float) -> float:
    """Omega**2 = -v2 / m + gamma**2 / 4; negative values mean the damped motion oscillates."""
    return -v2 / mass + 0.25 * gamma * gamma


def damped_propagators(v2: float, gamma: float, mass: float, t: Times) -> Propagators:
    _require_positive(mass=mass)
    times = np.asarray(t, dtype=np.float64)
    ch, sh = _hyperbolic_parts(damped_omega_squared(v2, gamma, mass), times)
    decay = np.exp(-0.5 * gamma * times)
    c = decay * (ch + 0.5 * gamma * sh)
    s = decay * sh
    return Propagators(c, s, -(v2 / mass) * s, c - gamma * s)


def dissipative_time(gamma: float, t: Times) -> NDArray[np.float64]:
    """tau(t) = (1 - exp(-gamma t)) / gamma, which is ``t`` for ``gamma = 0``."""
    times = np.asarray(t, dtype=np.float64)
    if gamma == 0.0:
        return times.copy()
    return -np.expm1(-gamma * times) / gamma


def integrated_dissipative_time(gamma: float, t: Times) -> NDArray[np.float64]:
    """Integral of ``tau`` from 0 to t: the displacement per unit acceleration of a damped particle at rest."""
    t = np.asarray(t, dtype=np.float64)
    if gamma == 0.0:
        return 0.5 * t * t
    gt = gamma * t
    series = 0.5 * t * t * (1.0 - gt / 3.0 + gt * gt / 12.0 - gt**3 / 60.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        exact = (gt + np.expm1(-gt)) / (gamma * gamma)
    return np.where(np.abs(gt) < _SMALL_GAMMA_T, series, exact)


def center_analytic_static(
    x0: float, x_dot0: float, v1: float, v2: float, gamma: float, mass: float, t: Times
) -> NDArray[np.float64]:
    """
    Center of a packet in the static potential ``v1 x + v2 x**2 / 2`` with friction ``gamma``.

    ``v2 = 0`` is the constant-force limit.
    """
    times = np.asarray(t, dtype=np.float64)
    if v2 == 0.0:
        _require_positive(mass=mass)
        return x0 + x_dot0 * dissipative_time(gamma, times) - (v1 / mass) * integrated_dissipative_time(gamma, times)
    offset = v1 / v2
    propagators = damped_propagators(v2, gamma, mass, times)
    return -offset + (x0 + offset) * propagators.c + x_dot0 * propagators.s


def center_analytic_static_velocity(
    x0: float, x_dot0: float, v1: float, v2: float, gamma: float, mass: float, t: Times
) -> NDArray[np.float64]:
    """Time derivative of :func:`center_analytic_static`."""
    times = np.asarray(t, dtype=np.float64)
    if v2 == 0.0:
        _require_positive(mass=mass)
        return x_dot0 * np.exp(-gamma * times) - (v1 / mass) * dissipative_time(gamma, times)
    offset = v1 / v2
    propagators = damped_propagators(v2, gamma, mass, times)
    return (x0 + offset) * propagators.c_dot + x_dot0 * propagators.s_dot


def center_analytic_driven(
    x0: float,
    x_dot0: float,
    charge: float,
    e0: float,
    omega0: float,
    phi: float,
    omega: float,
    gamma: float,
    mass: float,
    t: Times,
) -> NDArray[np.float64]:
    """
    Center in the repeller ``-m omega**2 x**2 / 2`` driven by ``charge * e0 * cos(omega0 t + phi) x``.

    The solution is the homogeneous part plus the steady response, with a transient that makes the
    steady response start from rest at the origin.
    """
    times = np.asarray(t, dtype=np.float64)
    v2 = -mass * omega * omega
    detuning = omega0 * omega0 + omega * omega
    denominator = gamma * gamma * omega0 * omega0 + detuning * detuning
    if denominator == 0.0:
        return center_analytic_static(x0, x_dot0, charge * e0 * math.cos(phi), v2, gamma, mass, times)
    amplitude = charge * e0 / mass / denominator
    phase = omega0 * times + phi
    steady = amplitude * (detuning * np.cos(phase) - gamma * omega0 * np.sin(phase))
    steady0 = amplitude * (detuning * math.cos(phi) - gamma * omega0 * math.sin(phi))
    steady_dot0 = -amplitude * omega0 * (detuning * math.sin(phi) + gamma * omega0 * math.cos(phi))
    propagators = damped_propagators(v2, gamma, mass, times)
    return (x0 - steady0) * propagators.c + (x_dot0 - steady_dot0) * propagators.s + steady


def width_analytic_classical(
    sigma0: float, sigma_dot0: float, v2: float, gamma: float, mass: float, t: Times
) -> NDArray[np.float64]:
    """Width for hbar_tilde = 0: the width obeys the same linear equation as the center deviation."""
    propagators = damped_propagators(v2, gamma, mass, t)
    return sigma0 * propagators.c + sigma_dot0 * propagators.s


def width_analytic_frictionless(
    sigma0: float, v2: float, mass: float, hbar_tilde: float, t: Times
) -> NDArray[np.float64]:
    """Width without friction for ``sigma'(0) = 0``: sigma0 * sqrt(ch**2 + hbar_tilde**2 sh**2 / (4 m**2 sigma0**4))."""
    _require_positive(sigma0=sigma0, mass=mass)
    times = np.asarray(t, dtype=np.float64)
    ch, sh = _hyperbolic_parts(damped_omega_squared(v2, 0.0, mass), times)
    spread = hbar_tilde * hbar_tilde / (4.0 * mass * mass * sigma0**4)
    return sigma0 * np.sqrt(ch * ch + spread * sh * sh)


def free_arrival_time(q0: float, q_dot0: float, gamma: float) -> float:
    """
    Time at which a damped free particle starting at ``q0 <= 0`` reaches the origin.

    :raises ArrivalConditionException: if the particle stops before the origin or moves away from it
    """
    if not q_dot0 > 0.0:
        raise ArrivalConditionException(f"initial velocity must be positive, got q_dot0={q_dot0!r}")
    if q0 > 0.0:
        raise ArrivalConditionException(f"particle starts beyond the origin, q0={q0!r}")
    reach = gamma * abs(q0) / q_dot0
    if reach >= 1.0:
        raise ArrivalConditionException(
            f"gamma_r * |q0| / q_dot0 = {reach!r} >= 1: the damped particle stops before the origin"
        )
    if gamma == 0.0:
        return -q0 / q_dot0
    return -math.log1p(gamma * q0 / q_dot0) / gamma
