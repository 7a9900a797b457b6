from __future__ import annotations

import abc
import math
import typing
from collections.abc import Mapping
from typing import Annotated, ClassVar, Literal, NamedTuple

import annotated_types
import pydantic
from class_registry import ClassRegistry

from scaled_trajectories._internal.exceptions import InvalidParameterException


PositiveFloat = Annotated[float, annotated_types.Gt(0.0)]
NonNegativeFloat = Annotated[float, annotated_types.Ge(0.0)]
UnitIntervalFloat = Annotated[float, annotated_types.Interval(ge=0.0, le=1.0)]

NOISE_KIND_TYPE = Literal["none", "gaussian_white"]

POTENTIALS_REGISTRY = ClassRegistry("tag")


class FrozenModel(pydantic.BaseModel):
    model_config = pydantic.ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)


class SystemParams(FrozenModel):
    """
    Particle and transition parameters, atomic units by default.

    :Attributes:
        - **mass**: particle mass, positive
        - **hbar**: base Planck constant, positive
        - **epsilon**: transition parameter in [0, 1]; 1 is the quantum regime, 0 the classical one
    """

    mass: PositiveFloat = 1.0
    hbar: PositiveFloat = 1.0
    epsilon: UnitIntervalFloat = 1.0

    @property
    def hbar_tilde(self) -> float:
        """Scaled Planck constant, hbar * sqrt(epsilon)."""
        return self.hbar * math.sqrt(self.epsilon)


class Friction(FrozenModel):
    gamma_r: NonNegativeFloat = 0.0
    gamma_i: float = 0.0

    @property
    def is_real(self) -> bool:
        return self.gamma_i == 0.0


class Bath(FrozenModel):
    kT: NonNegativeFloat = 0.0
    kind: NOISE_KIND_TYPE = "gaussian_white"

    @property
    def is_active(self) -> bool:
        return self.kind == "gaussian_white" and self.kT > 0.0


class GaussianState(FrozenModel):
    q: float = 0.0
    q_dot: float = 0.0
    sigma: PositiveFloat = 1.0
    sigma_dot: float = 0.0


class ParameterBundle(NamedTuple):
    params: SystemParams
    friction: Friction
    bath: Bath
    state: GaussianState | None = None


class PotentialValue(NamedTuple):
    value: float
    gradient: float
    curvature: float


def format_validation_error(exc: pydantic.ValidationError, origins: Mapping[str, str] | None = None) -> str:
    """Render pydantic errors as ``key (origin): message`` lines."""
    origins = origins or {}
    lines = []
    for error in exc.errors():
        key = ".".join(str(part) for part in error["loc"]) or "<root>"
        origin = origins.get(key)
        where = f" ({origin})" if origin else ""
        lines.append(f"{key}{where}: {error['msg']}")
    return "; ".join(lines)


def _as_mapping(value: pydantic.BaseModel | Mapping[str, typing.Any] | None) -> Mapping[str, typing.Any]:
    if value is None:
        return {}
    if isinstance(value, pydantic.BaseModel):
        return value.model_dump()
    return value


def validate_params(
    params: SystemParams | Mapping[str, typing.Any] | None = None,
    friction: Friction | Mapping[str, typing.Any] | None = None,
    bath: Bath | Mapping[str, typing.Any] | None = None,
    state: GaussianState | Mapping[str, typing.Any] | None = None,
) -> ParameterBundle:
    """
    Validate a parameter bundle and return fresh immutable copies.

    ``hbar_tilde`` is always derived from ``epsilon`` of the returned params.

    :raises InvalidParameterException: if any field violates its range
    """
    try:
        return ParameterBundle(
            params=SystemParams.model_validate(_as_mapping(params)),
            friction=Friction.model_validate(_as_mapping(friction)),
            bath=Bath.model_validate(_as_mapping(bath)),
            state=None if state is None else GaussianState.model_validate(_as_mapping(state)),
        )
    except pydantic.ValidationError as exc:
        raise InvalidParameterException(format_validation_error(exc)) from exc


class QuadraticPotential(FrozenModel, abc.ABC):
    """V(x, t) = v0(t) + v1(t) x + v2(t) x**2 / 2."""

    tag: ClassVar[str]

    @abc.abstractmethod
    def v0(self, t: float) -> float:
        raise NotImplementedError

    @abc.abstractmethod
    def v1(self, t: float) -> float:
        raise NotImplementedError

    @abc.abstractmethod
    def v2(self, t: float) -> float:
        raise NotImplementedError

    @property
    def is_static(self) -> bool:
        """True when v1 and v2 do not depend on time."""
        return False

    def static_coefficients(self) -> tuple[float, float]:
        if not self.is_static:
            raise InvalidParameterException(f"{self.tag} potential has time-dependent coefficients")
        return self.v1(0.0), self.v2(0.0)

    def evaluate(self, x: float, t: float) -> PotentialValue:
        v1 = self.v1(t)
        v2 = self.v2(t)
        return PotentialValue(self.v0(t) + v1 * x + 0.5 * v2 * x * x, v1 + v2 * x, v2)


@POTENTIALS_REGISTRY.register("constant")
class ConstantPotential(QuadraticPotential):
    tag = "constant"

    c0: float = 0.0
    c1: float = 0.0
    c2: float = 0.0

    @classmethod
    def free(cls) -> ConstantPotential:
        return cls()

    @classmethod
    def harmonic(cls, mass: float, omega: float) -> ConstantPotential:
        return cls(c2=mass * omega**2)

    @classmethod
    def repeller(cls, mass: float, omega: float) -> ConstantPotential:
        return cls(c2=-mass * omega**2)

    def v0(self, t: float) -> float:
        return self.c0

    def v1(self, t: float) -> float:
        return self.c1

    def v2(self, t: float) -> float:
        return self.c2

    @property
    def is_static(self) -> bool:
        return True


@POTENTIALS_REGISTRY.register("driven_repeller")
class DrivenRepeller(QuadraticPotential):
    """Parabolic repeller driven by a harmonic field: q E0 cos(omega0 t + phi) x - m omega**2 x**2 / 2."""

    tag = "driven_repeller"

    mass: PositiveFloat = 1.0
    charge: float = -1.0
    e0: float = 0.0
    omega0: NonNegativeFloat = 0.0
    phi: float = 0.0
    omega: NonNegativeFloat = 0.2

    def v0(self, t: float) -> float:
        return 0.0

    def v1(self, t: float) -> float:
        return self.charge * self.e0 * math.cos(self.omega0 * t + self.phi)

    def v2(self, t: float) -> float:
        return -self.mass * self.omega**2

    @property
    def is_static(self) -> bool:
        return self.e0 == 0.0 or self.omega0 == 0.0


@POTENTIALS_REGISTRY.register("gaussian_window_repeller")
class GaussianWindowRepeller(QuadraticPotential):
    """Repeller switched on around ``t_b`` with a Gaussian time window of inverse width ``g``."""

    tag = "gaussian_window_repeller"

    mass: PositiveFloat = 1.0
    omega: NonNegativeFloat = 1.5
    g: PositiveFloat = 1.0
    t_b: float = 0.0

    def v0(self, t: float) -> float:
        return 0.0

    def v1(self, t: float) -> float:
        return 0.0

    def v2(self, t: float) -> float:
        return -self.mass * self.omega**2 * math.exp(-self.g * (t - self.t_b) ** 2)

    @property
    def is_static(self) -> bool:
        return self.omega == 0.0


def build_potential(tag: str, **fields: typing.Any) -> QuadraticPotential:
    """
    Build a potential from its descriptor tag and fields.

    :raises InvalidParameterException: for unknown tags or invalid fields
    """
    try:
        potential_class = POTENTIALS_REGISTRY.get_class(tag)
    except KeyError as exc:
        raise InvalidParameterException(
            f"unknown potential {tag!r}, expected one of {sorted(POTENTIALS_REGISTRY.keys())}"
        ) from exc
    try:
        return typing.cast(QuadraticPotential, potential_class.model_validate(fields))
    except pydantic.ValidationError as exc:
        raise InvalidParameterException(format_validation_error(exc)) from exc


def eval_potential(pot: QuadraticPotential, x: float, t: float) -> PotentialValue:
    """Return (V, dV/dx, d2V/dx2) at (x, t)."""
    return pot.evaluate(x, t)
