from __future__ import annotations

import abc
import concurrent.futures
import enum
import logging
import math
import typing
from typing import ClassVar

import numpy as np
from class_registry import ClassRegistry
from numpy.typing import ArrayLike, NDArray

from scaled_trajectories._internal.exceptions import (
    InvalidParameterException,
    SingularCoefficientException,
    WidthCollapseException,
)
from scaled_trajectories._internal.grid import CoupledPath, Path, TimeGrid
from scaled_trajectories._internal.integrators import baoab_langevin, rk4_second_order
from scaled_trajectories._internal.models import Bath, Friction, GaussianState, QuadraticPotential, SystemParams
from scaled_trajectories._internal.rng import NoiseBlocks, RandomStreams, Substream

logger = logging.getLogger(__name__)

SIGMA_FLOOR = 1e-12
SINGULAR_TOLERANCE = 1e-12
ENSEMBLE_CHUNK_SIZE = 1024

WIDTH_EQUATIONS_REGISTRY = ClassRegistry("variant")


class WidthVariant(str, enum.Enum):
    KOSTIN_SCALED = "kostin_scaled"
    CK_SCALED = "ck_scaled"
    GENERALIZED_GAMMA_I = "generalized_gamma_i"
    COMPLEX_FRICTION = "complex_friction"


def _require_real_friction(friction: Friction, what: str) -> None:
    if not friction.is_real:
        raise InvalidParameterException(f"{what} needs a real friction coefficient, got gamma_i={friction.gamma_i!r}")


def _center_acceleration(params: SystemParams, friction: Friction, pot: QuadraticPotential):
    mass = params.mass
    gamma = friction.gamma_r

    def acceleration(t, q, q_dot):
        return -gamma * q_dot - (pot.v1(t) + pot.v2(t) * q) / mass

    return acceleration


def integrate_center_deterministic(
    params: SystemParams,
    friction: Friction,
    pot: QuadraticPotential,
    state0: GaussianState,
    grid: TimeGrid,
) -> Path:
    """
    Integrate ``q'' + gamma q' + V'(q) / m = 0`` with RK4.

    :raises NonFiniteStateException: if the state stops being finite
    """
    _require_real_friction(friction, "center equation")
    qs, q_dots = rk4_second_order(
        _center_acceleration(params, friction, pot), grid, state0.q, state0.q_dot, names=("q", "q_dot")
    )
    return Path(grid, qs, q_dots)


def sample_thermal_velocities(
    n: int,
    kT: float,
    mass: float,
    streams: RandomStreams,
    mean: float = 0.0,
    first_index: int = 0,
) -> NDArray[np.float64]:
    """Maxwell-Boltzmann initial velocities, one draw from each trajectory's velocity substream."""
    scale = math.sqrt(kT / mass)
    if scale == 0.0:
        return np.full(n, mean, dtype=np.float64)
    generators = streams.generators(range(first_index, first_index + n), Substream.VELOCITY)
    return np.array([mean + scale * generator.standard_normal() for generator in generators], dtype=np.float64)


def _check_langevin(friction: Friction, bath: Bath) -> None:
    _require_real_friction(friction, "Langevin center equation")
    if bath.is_active and friction.gamma_r == 0.0:
        raise InvalidParameterException(
            f"noise intensity 2 m gamma kT is undefined for gamma_r=0 with kT={bath.kT!r}; use a positive friction"
        )


def _langevin_chunk(
    params: SystemParams,
    friction: Friction,
    pot: QuadraticPotential,
    bath: Bath,
    grid: TimeGrid,
    q0: float,
    velocities: NDArray[np.float64],
    streams: RandomStreams,
    first_index: int,
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    q_start = np.full(velocities.shape, q0, dtype=np.float64)
    if not bath.is_active:
        return rk4_second_order(
            _center_acceleration(params, friction, pot), grid, q_start, velocities, names=("q", "q_dot")
        )

    def force(t: float, q: NDArray[np.float64]) -> NDArray[np.float64]:
        return -(pot.v1(t) + pot.v2(t) * q)

    noise = NoiseBlocks(streams.generators(range(first_index, first_index + velocities.size), Substream.NOISE))
    return baoab_langevin(
        force,
        grid,
        q_start,
        velocities,
        gamma=friction.gamma_r,
        kT=bath.kT,
        mass=params.mass,
        noise=noise,
    )


def integrate_center_langevin(
    params: SystemParams,
    friction: Friction,
    pot: QuadraticPotential,
    bath: Bath,
    state0: GaussianState,
    grid: TimeGrid,
    streams: RandomStreams,
    index: int = 0,
) -> Path:
    """
    One realization of ``q'' = -gamma q' - V'(q) / m + F_r / m`` with white noise of intensity ``2 m gamma kT``.

    Without an active bath the result is the RK4 path of :func:`integrate_center_deterministic`.

    :param streams: random streams; the noise of trajectory ``index`` comes from its own substream
    """
    _check_langevin(friction, bath)
    qs, q_dots = _langevin_chunk(
        params, friction, pot, bath, grid, state0.q, np.array([state0.q_dot]), streams, first_index=index
    )
    return Path(grid, qs[0], q_dots[0])


def integrate_center_langevin_ensemble(
    params: SystemParams,
    friction: Friction,
    pot: QuadraticPotential,
    bath: Bath,
    q0: float,
    velocities: ArrayLike,
    grid: TimeGrid,
    streams: RandomStreams,
    threads: int = 1,
    chunk_size: int = ENSEMBLE_CHUNK_SIZE,
) -> Path:
    """
    Langevin centers for trajectories ``0 .. n-1`` started at ``q0`` with the given initial velocities.

    Trajectories are advanced in vectorized chunks on a thread pool; row ``i`` of the result is
    identical to ``integrate_center_langevin(..., index=i)`` whatever ``threads`` and ``chunk_size`` are.
    """
    _check_langevin(friction, bath)
    velocities = np.asarray(velocities, dtype=np.float64)
    if velocities.ndim != 1 or velocities.size == 0:
        raise InvalidParameterException("velocities must be a non-empty 1-d array")
    starts = list(range(0, velocities.size, chunk_size))
    logger.debug(f"langevin ensemble: {velocities.size} trajectories in {len(starts)} chunks on {threads} threads")
    with concurrent.futures.ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        futures = [
            executor.submit(
                _langevin_chunk,
                params,
                friction,
                pot,
                bath,
                grid,
                q0,
                velocities[start : start + chunk_size],
                streams,
                start,
            )
            for start in starts
        ]
        chunks = [future.result() for future in futures]
    qs = np.concatenate([chunk[0] for chunk in chunks])
    q_dots = np.concatenate([chunk[1] for chunk in chunks])
    return Path(grid, qs, q_dots)


class WidthEquation(abc.ABC):
    """Right-hand side ``sigma'' = a(t, sigma, sigma')`` of one member of the Pinney family."""

    variant: ClassVar[WidthVariant]

    def __init__(self, params: SystemParams, friction: Friction, pot: QuadraticPotential):
        self.params = params
        self.friction = friction
        self.pot = pot
        self.mass = params.mass
        self.hbar_tilde = params.hbar_tilde
        self.gamma_r = friction.gamma_r
        self.gamma_i = friction.gamma_i
        self._validate()

    def _validate(self) -> None:
        _require_real_friction(self.friction, f"{self.variant.value} width")

    def leading_coefficient(self, sigma: float) -> float:
        return 1.0

    @abc.abstractmethod
    def acceleration(self, t: float, sigma: float, sigma_dot: float) -> float:
        raise NotImplementedError

    def check(self, t: float, sigma: float, sigma_dot: float) -> None:
        if sigma <= SIGMA_FLOOR:
            raise WidthCollapseException(
                f"width fell below {SIGMA_FLOOR!r}", time=t, state={"sigma": sigma, "sigma_dot": sigma_dot}
            )
        if abs(self.leading_coefficient(sigma)) < SINGULAR_TOLERANCE:
            raise SingularCoefficientException(
                f"leading coefficient of the {self.variant.value} width equation vanished",
                time=t,
                state={"sigma": sigma, "sigma_dot": sigma_dot},
            )


@WIDTH_EQUATIONS_REGISTRY.register(WidthVariant.KOSTIN_SCALED.value)
class KostinScaledWidth(WidthEquation):
    variant = WidthVariant.KOSTIN_SCALED

    def acceleration(self, t, sigma, sigma_dot):
        m = self.mass
        return -self.gamma_r * sigma_dot + self.hbar_tilde**2 / (4.0 * m * m * sigma**3) - self.pot.v2(t) * sigma / m


@WIDTH_EQUATIONS_REGISTRY.register(WidthVariant.CK_SCALED.value)
class CaldirolaKanaiScaledWidth(WidthEquation):
    variant = WidthVariant.CK_SCALED

    def acceleration(self, t, sigma, sigma_dot):
        m = self.mass
        quantum = self.hbar_tilde**2 * math.exp(-2.0 * self.gamma_r * t) / (4.0 * m * m * sigma**3)
        return -self.gamma_r * sigma_dot + quantum - self.pot.v2(t) * sigma / m


@WIDTH_EQUATIONS_REGISTRY.register(WidthVariant.GENERALIZED_GAMMA_I.value)
class GeneralizedGammaIWidth(WidthEquation):
    variant = WidthVariant.GENERALIZED_GAMMA_I

    def _validate(self) -> None:
        pass

    def acceleration(self, t, sigma, sigma_dot):
        m = self.mass
        hbar = self.hbar_tilde
        return (
            -self.gamma_r * sigma_dot
            + hbar * hbar / (4.0 * m * m * sigma**3)
            + hbar * self.gamma_i / (2.0 * m * sigma)
            - self.pot.v2(t) * sigma / m
        )


def _imaginary_friction_scale(params: SystemParams, friction: Friction) -> float:
    """k = m gamma_i / hbar_tilde, the combination every gamma_i term of the complex-friction equations uses."""
    if friction.gamma_i == 0.0:
        return 0.0
    if params.hbar_tilde == 0.0:
        raise InvalidParameterException("complex friction with gamma_i != 0 needs epsilon > 0")
    return params.mass * friction.gamma_i / params.hbar_tilde


@WIDTH_EQUATIONS_REGISTRY.register(WidthVariant.COMPLEX_FRICTION.value)
class ComplexFrictionWidth(WidthEquation):
    variant = WidthVariant.COMPLEX_FRICTION

    def _validate(self) -> None:
        self.k = _imaginary_friction_scale(self.params, self.friction)

    def leading_coefficient(self, sigma: float) -> float:
        return 1.0 + self.k * sigma * sigma

    def acceleration(self, t, sigma, sigma_dot):
        lead = self.leading_coefficient(sigma)
        if abs(lead) < SINGULAR_TOLERANCE:
            raise SingularCoefficientException(
                "leading coefficient of the complex_friction width equation vanished",
                time=t,
                state={"sigma": sigma, "sigma_dot": sigma_dot},
            )
        return self.numerator(t, sigma, sigma_dot, self.pot.v2(t)) / lead

    def numerator(self, t: float, sigma, sigma_dot, v2: float):
        m = self.mass
        k = self.k
        hbar = self.hbar_tilde
        gamma_r = self.gamma_r
        gamma_i = self.gamma_i
        sigma2 = sigma * sigma
        return (
            3.0 * k * sigma * sigma_dot * sigma_dot
            - 2.0 * k * gamma_r * sigma2 * sigma_dot
            - v2 * k * k / m * sigma2 * sigma2 * sigma
            - k / (2.0 * m) * (4.0 * v2 - m * gamma_i * gamma_i - m * gamma_r * gamma_r) * sigma2 * sigma
            - (v2 / m - (gamma_r * gamma_r + 5.0 * gamma_i * gamma_i) / 4.0) * sigma
            + gamma_i * hbar / (m * sigma)
            + hbar * hbar / (4.0 * m * m * sigma2 * sigma)
        )


def width_equation(
    variant: WidthVariant | str, params: SystemParams, friction: Friction, pot: QuadraticPotential
) -> WidthEquation:
    try:
        variant = WidthVariant(variant)
    except ValueError as exc:
        raise InvalidParameterException(
            f"unknown width variant {variant!r}, expected one of {[v.value for v in WidthVariant]}"
        ) from exc
    return typing.cast(WidthEquation, WIDTH_EQUATIONS_REGISTRY.get(variant.value, params, friction, pot))


def integrate_width(
    variant: WidthVariant | str,
    params: SystemParams,
    friction: Friction,
    pot: QuadraticPotential,
    state0: GaussianState,
    grid: TimeGrid,
) -> Path:
    """
    Integrate the selected width equation with RK4.

    For quadratic potentials ``d2V/dx2`` at the center is ``v2(t)``, so no center path is needed.

    :raises WidthCollapseException: if sigma drops below the floor
    :raises SingularCoefficientException: if the leading coefficient vanishes
    """
    equation = width_equation(variant, params, friction, pot)
    equation.check(grid.t0, state0.sigma, state0.sigma_dot)
    sigmas, sigma_dots = rk4_second_order(
        equation.acceleration,
        grid,
        state0.sigma,
        state0.sigma_dot,
        check=equation.check,
        names=("sigma", "sigma_dot"),
    )
    return Path(grid, sigmas, sigma_dots)


def soliton_gamma_i(sigma0: float, v2: float, mass: float = 1.0, hbar: float = 1.0) -> float:
    """
    Imaginary friction making ``sigma = sigma0, sigma' = 0`` a fixed point of the generalized Pinney equation.

    For free particles the value is negative.
    """
    if not (sigma0 > 0.0 and mass > 0.0 and hbar > 0.0):
        raise InvalidParameterException(
            f"sigma0, mass and hbar must be positive, got sigma0={sigma0!r}, mass={mass!r}, hbar={hbar!r}"
        )
    return -hbar / (2.0 * mass * sigma0**2) + 2.0 * sigma0**2 * v2 / hbar


def integrate_complex_friction_system(
    params: SystemParams,
    friction: Friction,
    pot: QuadraticPotential,
    state0: GaussianState,
    grid: TimeGrid,
) -> CoupledPath:
    """
    Integrate the coupled center/width equations for a complex friction coefficient.

    The center equation is evaluated with ``V1 = v1(t) + v2(t) q``; for ``gamma_i = 0`` both
    equations decouple.

    :raises SingularCoefficientException: if a leading coefficient vanishes
    """
    width = ComplexFrictionWidth(params, friction, pot)
    k = width.k
    m = params.mass
    gamma_r = friction.gamma_r

    def center_coefficients(sigma: float, sigma_dot: float) -> tuple[float, float, float]:
        s2 = sigma * sigma
        ks2 = k * s2
        lead = 1.0 + 3.0 * ks2 + 2.0 * ks2 * ks2
        damping = gamma_r * (1.0 + 4.0 * ks2 + 4.0 * ks2 * ks2) - (6.0 * k + 8.0 * k * ks2) * sigma * sigma_dot
        force_factor = 1.0 + 5.0 * ks2 + 8.0 * ks2 * ks2 + 4.0 * ks2 * ks2 * ks2
        return lead, damping, force_factor

    def singular(t: float, y, v, which: str) -> SingularCoefficientException:
        return SingularCoefficientException(
            f"leading coefficient of the complex-friction {which} equation vanished",
            time=t,
            state={"q": float(y[0]), "sigma": float(y[1]), "q_dot": float(v[0]), "sigma_dot": float(v[1])},
        )

    def acceleration(t, y, v):
        q, sigma = y
        q_dot, sigma_dot = v
        lead_q, damping, force_factor = center_coefficients(sigma, sigma_dot)
        lead_sigma = width.leading_coefficient(sigma)
        if abs(lead_q) < SINGULAR_TOLERANCE:
            raise singular(t, y, v, "center")
        if abs(lead_sigma) < SINGULAR_TOLERANCE:
            raise singular(t, y, v, "width")
        v2 = pot.v2(t)
        v1 = pot.v1(t) + v2 * q
        q_ddot = (-(v1 / m) * force_factor - damping * q_dot) / lead_q
        sigma_ddot = width.numerator(t, sigma, sigma_dot, v2) / lead_sigma
        return np.array([q_ddot, sigma_ddot])

    def check(t, y, v):
        width.check(t, float(y[1]), float(v[1]))

    check(grid.t0, np.array([state0.q, state0.sigma]), np.array([state0.q_dot, state0.sigma_dot]))
    ys, vs = rk4_second_order(
        acceleration,
        grid,
        np.array([state0.q, state0.sigma]),
        np.array([state0.q_dot, state0.sigma_dot]),
        check=check,
        names=("(q, sigma)", "(q_dot, sigma_dot)"),
    )
    return CoupledPath(center=Path(grid, ys[0], vs[0]), width=Path(grid, ys[1], vs[1]))
