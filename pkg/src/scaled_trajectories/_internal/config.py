"""
Run configurations.

A config file is a flat list of ``key = value`` lines; ``#`` starts a comment. Every experiment has
its own pydantic model registered in :data:`CONFIGS_REGISTRY` under its kind.
"""

from __future__ import annotations

import abc
import logging
import os
import pathlib
import typing
from collections.abc import Iterator, Mapping
from typing import Annotated, ClassVar, Literal

import annotated_types
import pydantic
from class_registry import ClassRegistry

from scaled_trajectories._internal.dynamics import WidthVariant, soliton_gamma_i
from scaled_trajectories._internal.exceptions import ConfigException, InvalidParameterException
from scaled_trajectories._internal.experiments import (
    ExperimentResult,
    TunnelingScan,
    run_brownian,
    run_diffraction,
    run_early_arrivals,
    run_tunneling,
)
from scaled_trajectories._internal.grid import TimeGrid
from scaled_trajectories._internal.models import (
    Bath,
    DrivenRepeller,
    Friction,
    GaussianWindowRepeller,
    NonNegativeFloat,
    PositiveFloat,
    SystemParams,
    UnitIntervalFloat,
    format_validation_error,
)
from scaled_trajectories._internal.rng import MAX_SEED, RandomStreams

logger = logging.getLogger(__name__)

CONFIGS_REGISTRY = ClassRegistry("kind")

PositiveInt = Annotated[int, annotated_types.Ge(1)]
NonNegativeInt = Annotated[int, annotated_types.Ge(0)]
SeedInt = Annotated[int, annotated_types.Interval(ge=0, le=MAX_SEED)]
THREADS_TYPE = Literal["auto"] | PositiveInt
SCAN_TYPE = Literal["none", "omega0", "e0", "epsilon", "gamma"]


class CommonConfig(pydantic.BaseModel, abc.ABC):
    """Fields shared by every experiment."""

    model_config = pydantic.ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    kind: ClassVar[str]

    mass: PositiveFloat = 1.0
    hbar: PositiveFloat = 1.0
    epsilon: UnitIntervalFloat = 1.0
    dt: PositiveFloat = 1e-3
    t_end: PositiveFloat
    sample_every: PositiveInt = 1
    master_seed: SeedInt = 0
    threads: THREADS_TYPE = "auto"

    @classmethod
    def required_keys(cls) -> list[str]:
        return [name for name, field in cls.model_fields.items() if field.is_required()]

    @classmethod
    def expected_keys(cls) -> list[str]:
        return list(cls.model_fields)

    @property
    def system_params(self) -> SystemParams:
        return SystemParams(mass=self.mass, hbar=self.hbar, epsilon=self.epsilon)

    @property
    def grid(self) -> TimeGrid:
        return TimeGrid.span(self.t_end, self.dt, self.sample_every)

    @property
    def streams(self) -> RandomStreams:
        return RandomStreams(self.master_seed)

    @property
    def worker_count(self) -> int:
        if self.threads == "auto":
            return os.cpu_count() or 1
        return self.threads

    def manifest_items(self) -> Iterator[tuple[str, str]]:
        """Every set field as ``(key, value)`` text that parses back to the same value."""
        for name in type(self).model_fields:
            value = getattr(self, name)
            if value is None or value == ():
                continue
            yield name, format_value(value)

    @abc.abstractmethod
    def run(self) -> ExperimentResult:
        raise NotImplementedError


def format_value(value: typing.Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ",".join(format_value(item) for item in value)
    if isinstance(value, WidthVariant):
        return value.value
    return str(value)


@CONFIGS_REGISTRY.register("brownian")
class BrownianConfig(CommonConfig):
    kind = "brownian"

    gamma_r: NonNegativeFloat
    kT: NonNegativeFloat
    gamma_i: float = 0.0
    width_variant: WidthVariant = WidthVariant.KOSTIN_SCALED
    soliton: bool = False
    sigma0: PositiveFloat = 1.0
    n_tra: PositiveInt = 10_000
    dt: PositiveFloat = 1e-2
    t_end: PositiveFloat = 100.0
    sample_every: PositiveInt = 10

    @pydantic.model_validator(mode="after")
    def _check_soliton(self) -> BrownianConfig:
        if self.soliton and self.width_variant != WidthVariant.GENERALIZED_GAMMA_I:
            raise ValueError("soliton = true needs width_variant = generalized_gamma_i")
        if self.soliton and self.epsilon == 0.0:
            raise ValueError("soliton = true needs epsilon > 0")
        return self

    @property
    def friction(self) -> Friction:
        if self.soliton:
            params = self.system_params
            return Friction(
                gamma_r=self.gamma_r,
                gamma_i=soliton_gamma_i(self.sigma0, 0.0, params.mass, params.hbar_tilde),
            )
        return Friction(gamma_r=self.gamma_r, gamma_i=self.gamma_i)

    def run(self) -> ExperimentResult:
        return run_brownian(
            self.system_params,
            self.friction,
            Bath(kT=self.kT),
            self.width_variant,
            self.grid,
            self.n_tra,
            sigma0=self.sigma0,
            streams=self.streams,
            threads=self.worker_count,
        )


@CONFIGS_REGISTRY.register("diffraction")
class DiffractionConfig(CommonConfig):
    kind = "diffraction"

    p: PositiveFloat
    x_obs: float
    gamma_r: NonNegativeFloat = 0.0
    t_end: PositiveFloat = 20.0

    def run(self) -> ExperimentResult:
        return run_diffraction(self.system_params, Friction(gamma_r=self.gamma_r), self.p, self.x_obs, self.grid)


@CONFIGS_REGISTRY.register("tunneling")
class TunnelingConfig(CommonConfig):
    kind = "tunneling"

    omega: NonNegativeFloat
    width_variant: WidthVariant
    gamma_r: NonNegativeFloat = 0.0
    x0: float = -10.0
    p0: float = 1.0
    sigma0: PositiveFloat = 1.0
    charge: float = -1.0
    e0: float = 0.0
    omega0: NonNegativeFloat = 0.0
    phi: float = 0.0
    scan: SCAN_TYPE = "none"
    scan_values: tuple[float, ...] = ()
    n_bohm: NonNegativeInt = 0
    t_end: PositiveFloat = 150.0
    sample_every: PositiveInt = 100

    @pydantic.field_validator("scan_values", mode="before")
    @classmethod
    def _split_values(cls, value: typing.Any) -> typing.Any:
        if isinstance(value, str):
            return tuple(item.strip() for item in value.split(",") if item.strip())
        return value

    @pydantic.model_validator(mode="after")
    def _check_scan(self) -> TunnelingConfig:
        if self.width_variant not in (WidthVariant.KOSTIN_SCALED, WidthVariant.CK_SCALED):
            raise ValueError(f"width_variant must be kostin_scaled or ck_scaled, got {self.width_variant.value}")
        if self.scan not in ("none", "omega0") and not self.scan_values:
            raise ValueError(f"scan = {self.scan} needs scan_values")
        if self.scan == "none" and self.scan_values:
            raise ValueError("scan_values given without a scan parameter")
        return self

    @property
    def field(self) -> DrivenRepeller:
        return DrivenRepeller(
            mass=self.mass, charge=self.charge, e0=self.e0, omega0=self.omega0, phi=self.phi, omega=self.omega
        )

    @property
    def tunneling_scan(self) -> TunnelingScan | None:
        if self.scan == "none":
            return None
        if self.scan == "omega0" and not self.scan_values:
            return TunnelingScan.resonance(self.omega)
        return TunnelingScan(self.scan, self.scan_values)

    def run(self) -> ExperimentResult:
        return run_tunneling(
            self.system_params,
            Friction(gamma_r=self.gamma_r),
            self.field,
            self.grid,
            width_variant=self.width_variant,
            x0=self.x0,
            p0=self.p0,
            sigma0=self.sigma0,
            scan=self.tunneling_scan,
            n_bohm=self.n_bohm,
            streams=self.streams,
            threads=self.worker_count,
        )


@CONFIGS_REGISTRY.register("early_arrivals")
class EarlyArrivalsConfig(CommonConfig):
    kind = "early_arrivals"

    gamma_r: NonNegativeFloat
    kT: NonNegativeFloat
    gamma_i: float = 0.0
    omega: NonNegativeFloat = 1.5
    g: PositiveFloat = 1.0
    t_barrier: float | None = None
    x_d: float = 10.0
    q0: float = -5.0
    v0: float = 1.0
    sigma0: PositiveFloat = 1.0
    n_tra: PositiveInt = 10_000
    t_end: PositiveFloat = 40.0
    sample_every: PositiveInt = 100

    def run(self) -> ExperimentResult:
        return run_early_arrivals(
            self.system_params,
            Friction(gamma_r=self.gamma_r, gamma_i=self.gamma_i),
            Bath(kT=self.kT),
            GaussianWindowRepeller(mass=self.mass, omega=self.omega, g=self.g),
            self.x_d,
            self.grid,
            self.n_tra,
            q0=self.q0,
            v0=self.v0,
            sigma0=self.sigma0,
            t_barrier=self.t_barrier,
            streams=self.streams,
            threads=self.worker_count,
        )


def config_class(kind: str) -> type[CommonConfig]:
    try:
        return typing.cast(type[CommonConfig], CONFIGS_REGISTRY.get_class(kind.replace("-", "_")))
    except KeyError as exc:
        raise ConfigException(
            f"unknown experiment {kind!r}, expected one of {sorted(CONFIGS_REGISTRY.keys())}"
        ) from exc


def read_config_lines(path: pathlib.Path | str) -> dict[str, tuple[str, str]]:
    """
    Parse a ``key = value`` file.

    :return: mapping of key to ``(value, "file:line")``
    :raises ConfigException: for unreadable files, malformed lines and repeated keys
    """
    path = pathlib.Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigException(f"cannot read config {path}: {exc}") from exc
    entries: dict[str, tuple[str, str]] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        origin = f"{path}:{number}"
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, separator, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not separator or not key or not value:
            raise ConfigException(f"{origin}: expected 'key = value', got {raw.strip()!r}")
        if key in entries:
            raise ConfigException(f"{origin}: key {key!r} already set at {entries[key][1]}")
        entries[key] = (value, origin)
    return entries


def parse_config(
    kind: str,
    path: pathlib.Path | str | None = None,
    overrides: Mapping[str, str] | None = None,
    *,
    seed: int | str | None = None,
    threads: int | str | None = None,
) -> CommonConfig:
    """
    Build a validated run config.

    Precedence, lowest first: model defaults, the config file, ``overrides`` (``--key value`` flags),
    then ``seed`` and ``threads``.

    :raises ConfigException: naming every offending key and where it was set
    """
    model = config_class(kind)
    raw: dict[str, typing.Any] = {}
    origins: dict[str, str] = {}
    if path is not None:
        for key, (value, origin) in read_config_lines(path).items():
            raw[key] = value
            origins[key] = origin
    for key, value in (overrides or {}).items():
        raw[key] = value
        origins[key] = f"--{key}"
    for key, value, flag in (("master_seed", seed, "--seed"), ("threads", threads, "--threads")):
        if value is not None:
            raw[key] = value
            origins[key] = flag

    missing = [key for key in model.required_keys() if key not in raw]
    if missing:
        raise ConfigException(
            f"{model.kind}: missing required keys {missing}; required: {model.required_keys()}; "
            f"expected keys: {model.expected_keys()}"
        )
    try:
        config = model.model_validate(raw)
    except pydantic.ValidationError as exc:
        raise ConfigException(f"{model.kind}: {format_validation_error(exc, origins)}") from exc
    try:
        config.grid
    except InvalidParameterException as exc:
        raise ConfigException(f"{model.kind}: invalid time grid: {exc}") from exc
    logger.debug(f"parsed {model.kind} config from {path or 'defaults'} with {len(overrides or {})} overrides")
    return config
