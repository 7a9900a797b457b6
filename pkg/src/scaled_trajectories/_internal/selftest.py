"""Analytic-oracle checks runnable without a test harness."""

from __future__ import annotations

import logging
import math
import typing
from collections.abc import Callable

import numpy as np

from scaled_trajectories._internal.analytic import (
    center_analytic_driven,
    center_analytic_static,
    center_analytic_static_velocity,
    width_analytic_classical,
    width_analytic_frictionless,
)
from scaled_trajectories._internal.dynamics import (
    WidthVariant,
    integrate_center_deterministic,
    integrate_complex_friction_system,
    integrate_width,
    soliton_gamma_i,
)
from scaled_trajectories._internal.grid import TimeGrid
from scaled_trajectories._internal.models import (
    ConstantPotential,
    DrivenRepeller,
    Friction,
    GaussianState,
    QuadraticPotential,
    SystemParams,
)
from scaled_trajectories._internal.oracles import erf_quadrature, fresnel_quadrature
from scaled_trajectories._internal.rng import RandomStreams
from scaled_trajectories._internal.specfun import erf_family, fresnel
from scaled_trajectories._internal.trajectories import build_ensemble, is_non_crossing

logger = logging.getLogger(__name__)

ORACLE_TOLERANCE = 1e-7


class CheckResult(typing.NamedTuple):
    name: str
    passed: bool
    detail: str


def _relative_error(computed: np.ndarray, expected: np.ndarray) -> float:
    return float(np.max(np.abs(computed - expected)) / np.max(np.abs(expected)))


def _within(name: str, error: float, tolerance: float) -> CheckResult:
    return CheckResult(name, error < tolerance, f"error {error:.3e} (tolerance {tolerance:.0e})")


STATIC_CENTER_POTENTIALS: tuple[QuadraticPotential, ...] = (
    ConstantPotential.repeller(1.0, 0.2),
    ConstantPotential.harmonic(1.0, 0.3),
    DrivenRepeller(e0=0.1, omega=0.0),
)


def _static_center_error(pot: QuadraticPotential, friction: Friction, state: GaussianState, grid: TimeGrid) -> float:
    params = SystemParams()
    v1, v2 = pot.static_coefficients()
    path = integrate_center_deterministic(params, friction, pot, state, grid)
    args = (state.q, state.q_dot, v1, v2, friction.gamma_r, params.mass, path.times)
    return max(
        _relative_error(path.values, center_analytic_static(*args)),
        _relative_error(path.derivatives, center_analytic_static_velocity(*args)),
    )


def check_center_static() -> CheckResult:
    friction = Friction(gamma_r=0.06)
    state = GaussianState(q=-10.0, q_dot=1.0)
    grid = TimeGrid.span(30.0)
    error = max(_static_center_error(pot, friction, state, grid) for pot in STATIC_CENTER_POTENTIALS)
    return _within("center and velocity, static potentials", error, ORACLE_TOLERANCE)


def check_center_driven() -> CheckResult:
    params = SystemParams()
    friction = Friction(gamma_r=0.06)
    field = DrivenRepeller(e0=0.1, omega0=0.17, phi=-math.pi / 2, omega=0.2)
    grid = TimeGrid.span(30.0)
    path = integrate_center_deterministic(params, friction, field, GaussianState(q=-10.0, q_dot=1.0), grid)
    expected = center_analytic_driven(-10.0, 1.0, field.charge, 0.1, 0.17, -math.pi / 2, 0.2, 0.06, 1.0, path.times)
    return _within("center, driven repeller", _relative_error(path.values, expected), ORACLE_TOLERANCE)


def check_width_classical() -> CheckResult:
    params = SystemParams(epsilon=0.0)
    pot = ConstantPotential.repeller(1.0, 0.2)
    grid = TimeGrid.span(30.0)
    path = integrate_width(WidthVariant.KOSTIN_SCALED, params, Friction(gamma_r=0.06), pot, GaussianState(), grid)
    expected = width_analytic_classical(1.0, 0.0, pot.c2, 0.06, 1.0, path.times)
    return _within("classical width", _relative_error(path.values, expected), ORACLE_TOLERANCE)


def check_width_frictionless() -> CheckResult:
    params = SystemParams()
    pot = ConstantPotential.repeller(1.0, 0.2)
    grid = TimeGrid.span(30.0)
    path = integrate_width(WidthVariant.KOSTIN_SCALED, params, Friction(), pot, GaussianState(), grid)
    expected = width_analytic_frictionless(1.0, pot.c2, 1.0, params.hbar_tilde, path.times)
    return _within("frictionless width", _relative_error(path.values, expected), ORACLE_TOLERANCE)


def check_soliton() -> CheckResult:
    friction = Friction(gamma_i=soliton_gamma_i(1.0, 0.0))
    grid = TimeGrid.span(50.0)
    path = integrate_width(
        WidthVariant.GENERALIZED_GAMMA_I, SystemParams(), friction, ConstantPotential.free(), GaussianState(), grid
    )
    return _within("soliton width", float(np.max(np.abs(path.values - 1.0))), 1e-8)


def check_complex_friction_decoupling() -> CheckResult:
    params = SystemParams()
    friction = Friction(gamma_r=0.06)
    pot = ConstantPotential.repeller(1.0, 0.2)
    state = GaussianState(q=-10.0, q_dot=1.0)
    grid = TimeGrid.span(30.0)
    coupled = integrate_complex_friction_system(params, friction, pot, state, grid)
    center = integrate_center_deterministic(params, friction, pot, state, grid)
    width = integrate_width(WidthVariant.COMPLEX_FRICTION, params, friction, pot, state, grid)
    error = max(
        _relative_error(coupled.center.values, center.values),
        _relative_error(coupled.width.values, width.values),
    )
    return _within("complex friction at gamma_i = 0", error, 1e-10)


def check_special_functions() -> CheckResult:
    points = np.linspace(-10.0, 10.0, 41)
    fresnel_error = max(max(abs(a - b) for a, b in zip(fresnel(u), fresnel_quadrature(u))) for u in points)
    erf_error = max(abs(erf_family(u).erf - erf_quadrature(u).erf) for u in points)
    passed = fresnel_error < 1e-10 and erf_error < 1e-12
    return CheckResult("special functions", passed, f"fresnel {fresnel_error:.3e}, erf {erf_error:.3e}")


def check_non_crossing(ensembles: int = 1000, size: int = 20) -> CheckResult:
    params = SystemParams()
    pot = ConstantPotential.repeller(1.0, 0.2)
    state = GaussianState(q=-2.0, q_dot=1.0)
    grid = TimeGrid.span(10.0, dt=1e-2, sample_every=10)
    center = integrate_center_deterministic(params, Friction(gamma_r=0.1), pot, state, grid)
    width = integrate_width(WidthVariant.KOSTIN_SCALED, params, Friction(gamma_r=0.1), pot, state, grid)
    failures = sum(
        not is_non_crossing(build_ensemble(size, center, width, RandomStreams(seed))) for seed in range(ensembles)
    )
    return CheckResult("non-crossing", failures == 0, f"{failures} of {ensembles} ensembles crossed")


CHECKS: tuple[Callable[[], CheckResult], ...] = (
    check_center_static,
    check_center_driven,
    check_width_classical,
    check_width_frictionless,
    check_soliton,
    check_complex_friction_decoupling,
    check_special_functions,
    check_non_crossing,
)


def run_selftest() -> list[CheckResult]:
    results = []
    for check in CHECKS:
        result = check()
        logger.log(logging.INFO if result.passed else logging.ERROR, f"{result.name}: {result.detail}")
        results.append(result)
    return results
