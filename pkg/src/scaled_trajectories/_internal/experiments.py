from __future__ import annotations

import concurrent.futures
import dataclasses
import logging
import math
import typing
from collections.abc import Callable, Mapping, Sequence

import numpy as np
import pydantic
from numpy.typing import ArrayLike, NDArray

from scaled_trajectories._internal.analytic import center_analytic_driven, dissipative_time, free_arrival_time
from scaled_trajectories._internal.dynamics import (
    WidthVariant,
    integrate_center_langevin_ensemble,
    integrate_width,
    sample_thermal_velocities,
)
from scaled_trajectories._internal.exceptions import ArrivalConditionException, InvalidParameterException
from scaled_trajectories._internal.grid import Path, TimeGrid
from scaled_trajectories._internal.models import (
    Bath,
    ConstantPotential,
    DrivenRepeller,
    Friction,
    GaussianState,
    GaussianWindowRepeller,
    SystemParams,
)
from scaled_trajectories._internal.rng import RandomStreams
from scaled_trajectories._internal.specfun import erf_family_array, fresnel_array
from scaled_trajectories._internal.trajectories import (
    build_ensemble,
    crossing_transmission,
    diffusion_coefficients,
    msd_classical_analytic,
    msd_monte_carlo,
    sample_initial_positions,
)

logger = logging.getLogger(__name__)

EXPERIMENT_KIND_TYPE = typing.Literal["brownian", "diffraction", "tunneling", "early_arrivals"]
SCAN_PARAMETER_TYPE = typing.Literal["omega0", "e0", "epsilon", "gamma"]

RESONANCE_SCAN_POINTS = 61
RESONANCE_SCAN_SPAN = 3.0

_SQRT2 = math.sqrt(2.0)


@dataclasses.dataclass(frozen=True)
class ExperimentResult:
    """
    Output of one experiment driver.

    :Attributes:
        - **kind**: experiment name
        - **columns**: equally long named arrays, in output order
        - **scalars**: named summary values, each extracted from the columns by a fixed rule
        - **metadata**: parameter echo and seed provenance
    """

    kind: EXPERIMENT_KIND_TYPE
    columns: dict[str, NDArray[np.float64]]
    scalars: dict[str, float] = dataclasses.field(default_factory=dict)
    metadata: dict[str, pydantic.JsonValue] = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        lengths = {name: np.shape(values) for name, values in self.columns.items()}
        if len({shape for shape in lengths.values()}) > 1:
            raise InvalidParameterException(f"result columns differ in shape: {lengths}")
        for name, values in self.columns.items():
            if np.ndim(values) != 1:
                raise InvalidParameterException(f"result column {name!r} must be 1-d")

    @property
    def n_rows(self) -> int:
        return len(next(iter(self.columns.values()))) if self.columns else 0


class Extremum(typing.NamedTuple):
    index: int
    time: float
    value: float


def _parabolic_vertex(y_minus: float, y0: float, y_plus: float) -> tuple[float, float]:
    """Offset (in grid steps) and value of the vertex of the parabola through three equally spaced points."""
    curvature = y_minus - 2.0 * y0 + y_plus
    if curvature == 0.0:
        return 0.0, y0
    delta = 0.5 * (y_minus - y_plus) / curvature
    return delta, y0 - 0.25 * (y_minus - y_plus) * delta


def _refined(times: NDArray[np.float64], values: NDArray[np.float64], index: int) -> Extremum:
    delta, value = _parabolic_vertex(values[index - 1], values[index], values[index + 1])
    step = times[1] - times[0]
    return Extremum(index, float(times[index] + delta * step), float(value))


def first_local_maximum(times: ArrayLike, values: ArrayLike) -> Extremum | None:
    """
    First sample strictly above both neighbours, refined by a three-point parabola.

    :return: ``None`` when the series has no interior maximum
    """
    times = np.asarray(times, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    inner = values[1:-1]
    candidates = np.flatnonzero((inner > values[:-2]) & (inner > values[2:])) + 1
    if candidates.size == 0:
        return None
    return _refined(times, values, int(candidates[0]))


def following_local_minimum(times: ArrayLike, values: ArrayLike, after: int) -> Extremum:
    """First interior minimum after index ``after``; the last sample if the series never turns up."""
    times = np.asarray(times, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    inner = values[1:-1]
    candidates = np.flatnonzero((inner < values[:-2]) & (inner < values[2:])) + 1
    candidates = candidates[candidates > after]
    if candidates.size == 0:
        return Extremum(len(values) - 1, float(times[-1]), float(values[-1]))
    return _refined(times, values, int(candidates[0]))


def refine_argmax(xs: ArrayLike, ys: ArrayLike) -> tuple[float, float]:
    """
    Location and value of the maximum of a scan, refined by the parabola through the best point and its neighbours.

    A maximum on the scan boundary is returned unrefined.
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    best = int(np.argmax(ys))
    if best == 0 or best == len(ys) - 1:
        logger.warning(f"scan maximum at the boundary value {xs[best]!r}; parabolic refinement skipped")
        return float(xs[best]), float(ys[best])
    (x1, x2, x3), (y1, y2, y3) = xs[best - 1 : best + 2], ys[best - 1 : best + 2]
    denominator = (x1 - x2) * (x1 - x3) * (x2 - x3)
    a = (x3 * (y2 - y1) + x2 * (y1 - y3) + x1 * (y3 - y2)) / denominator
    b = (x3 * x3 * (y1 - y2) + x2 * x2 * (y3 - y1) + x1 * x1 * (y2 - y3)) / denominator
    c = (x2 * x3 * (x2 - x3) * y1 + x3 * x1 * (x3 - x1) * y2 + x1 * x2 * (x1 - x2) * y3) / denominator
    if not a < 0.0:
        return float(xs[best]), float(ys[best])
    vertex = -b / (2.0 * a)
    return float(vertex), float(c - b * b / (4.0 * a))


def _echo(**models: pydantic.BaseModel | Mapping[str, typing.Any]) -> dict[str, pydantic.JsonValue]:
    metadata: dict[str, pydantic.JsonValue] = {}
    for name, model in models.items():
        metadata[name] = model.model_dump(mode="json") if isinstance(model, pydantic.BaseModel) else dict(model)
    return metadata


def _map_on_pool(function: Callable[[typing.Any], float], items: Sequence[typing.Any], threads: int) -> list[float]:
    with concurrent.futures.ThreadPoolExecutor(max_workers=max(1, threads)) as executor:
        return list(executor.map(function, items))


# Brownian motion


def run_brownian(
    params: SystemParams,
    friction: Friction,
    bath: Bath,
    width_variant: WidthVariant | str,
    grid: TimeGrid,
    n_tra: int,
    *,
    sigma0: float = 1.0,
    streams: RandomStreams | None = None,
    threads: int = 1,
) -> ExperimentResult:
    """
    Mean square displacement and diffusion coefficients of free scaled trajectories in a thermal bath.

    Centers follow the Langevin equation from Maxwell-Boltzmann velocities; the width follows the
    selected width equation, which carries the imaginary friction if any.
    """
    streams = streams or RandomStreams()
    logger.info(
        f"brownian: gamma_r={friction.gamma_r!r}, kT={bath.kT!r}, epsilon={params.epsilon!r}, "
        f"width={WidthVariant(width_variant).value}, n_tra={n_tra}, seed={streams.master_seed}"
    )
    free = ConstantPotential.free()
    center_friction = Friction(gamma_r=friction.gamma_r)
    width = integrate_width(width_variant, params, friction, free, GaussianState(sigma=sigma0), grid)
    times = grid.times()

    msd_cl = msd_classical_analytic(bath.kT, params.mass, friction.gamma_r, times)
    msd_q_analytic = msd_cl + (width.values - sigma0) ** 2

    velocities = sample_thermal_velocities(n_tra, bath.kT, params.mass, streams)
    centers = integrate_center_langevin_ensemble(
        params, center_friction, free, bath, 0.0, velocities, grid, streams, threads=threads
    )
    born = sample_initial_positions(n_tra, 0.0, sigma0, streams)
    msd_q_mc = msd_monte_carlo(centers, born, width)

    d_cl = np.zeros_like(times)
    d_q = np.zeros_like(times)
    positive = times > 0.0
    d_cl[positive], d_q[positive] = diffusion_coefficients(
        bath.kT, params.mass, friction.gamma_r, width, times[positive]
    )

    half = grid.n_samples // 2
    scalars = {
        "d_cl_final": float(d_cl[-1]),
        "d_q_final": float(d_q[-1]),
        "d_cl_asymptotic": float((msd_cl[-1] - msd_cl[half]) / (2.0 * (times[-1] - times[half]))),
        "msd_q_mc_final_se": float(msd_q_mc.standard_error[-1]),
    }
    if friction.gamma_r > 0.0:
        scalars["d_einstein"] = bath.kT / (params.mass * friction.gamma_r)
    logger.info(f"brownian: D_cl(t_end)={scalars['d_cl_final']!r}, D_q(t_end)={scalars['d_q_final']!r}")
    return ExperimentResult(
        kind="brownian",
        columns={
            "t": times,
            "msd_cl": msd_cl,
            "msd_q_analytic": msd_q_analytic,
            "msd_q_mc": msd_q_mc.mean,
            "d_cl": d_cl,
            "d_q": d_q,
        },
        scalars=scalars,
        metadata={
            **_echo(params=params, friction=friction, bath=bath, grid=grid),
            "width_variant": WidthVariant(width_variant).value,
            "n_tra": n_tra,
            "sigma0": sigma0,
            "seed": streams.provenance,
        },
    )


# Diffraction in time


def arrival_time(mass: float, gamma: float, p: float, x: float) -> float | None:
    """
    Time at which the classical particle with momentum ``p`` reaches ``x``.

    :return: ``None`` if ``x`` lies behind the shutter (``x < 0``) or friction stops the particle first
        (``gamma m x / p >= 1``)
    """
    if x < 0.0:
        return None
    reach = gamma * mass * x / p
    if reach >= 1.0:
        return None
    if gamma == 0.0:
        return mass * x / p
    return -math.log1p(-reach) / gamma


def _shutter_density(xi: NDArray[np.float64]) -> NDArray[np.float64]:
    c, s = fresnel_array(xi)
    return 0.5 * ((c + 0.5) ** 2 + (s + 0.5) ** 2)


def diffraction_density(
    params: SystemParams, gamma: float, p: float, x: float, t: ArrayLike
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """
    Fresnel argument and density at ``x`` behind a shutter opened at ``t = 0`` on a plane wave of momentum ``p``.

    For ``hbar_tilde = 0`` the density is the classical step and the argument is NaN.
    """
    if not p > 0.0:
        raise InvalidParameterException(f"p must be positive, got {p!r}")
    times = np.asarray(t, dtype=np.float64)
    if (times < 0.0).any():
        raise InvalidParameterException("diffraction density is defined for t >= 0 only")
    tau = dissipative_time(gamma, times)
    ahead = p * tau / params.mass - x
    hbar_tilde = params.hbar_tilde
    if hbar_tilde == 0.0:
        return np.full_like(times, np.nan), (ahead >= 0.0).astype(np.float64)
    xi = np.empty_like(times)
    started = tau > 0.0
    xi[started] = np.sqrt(params.mass / (math.pi * hbar_tilde * tau[started])) * ahead[started]
    xi[~started] = -math.copysign(math.inf, x) if x != 0.0 else 0.0
    rho = np.empty_like(times)
    rho[started] = _shutter_density(xi[started])
    rho[~started] = 0.0 if x > 0.0 else (1.0 if x < 0.0 else 0.25)
    return xi, rho


def stationary_diffraction_density(params: SystemParams, gamma: float, p: float, x: float) -> float:
    """
    Long-time density at ``x``; friction freezes the packet at ``p / (m gamma)``.

    The Fresnel argument is the ``tau -> 1 / gamma`` limit of the one used by :func:`diffraction_density`.
    """
    if gamma == 0.0:
        return 1.0
    ahead = p / (params.mass * gamma) - x
    if params.hbar_tilde == 0.0:
        return 1.0 if ahead >= 0.0 else 0.0
    xi = math.sqrt(params.mass * gamma / (math.pi * params.hbar_tilde)) * ahead
    return float(_shutter_density(np.array([xi]))[0])


def run_diffraction(
    params: SystemParams, friction: Friction, p: float, x_obs: float, grid: TimeGrid
) -> ExperimentResult:
    """
    Arrival density at ``x_obs`` after a shutter is removed, with its first oscillation extracted.

    ``first_oscillation_amplitude`` is the raw height ``max - min`` of the first oscillation (``0.5921`` for
    ``p = x_obs = 1`` at any ``epsilon > 0``). ``visibility`` is the normalized contrast
    ``(max - min) / (max + min)`` of the same extrema and is about ``0.28`` there.
    """
    if not friction.is_real:
        raise InvalidParameterException("diffraction needs a real friction coefficient")
    gamma = friction.gamma_r
    logger.info(f"diffraction: p={p!r}, x_obs={x_obs!r}, gamma={gamma!r}, epsilon={params.epsilon!r}")
    times = grid.times()
    xi, rho = diffraction_density(params, gamma, p, x_obs, times)
    classical = diffraction_density(params.model_copy(update={"epsilon": 0.0}), gamma, p, x_obs, times)[1]

    scalars: dict[str, float] = {"rho_stationary": stationary_diffraction_density(params, gamma, p, x_obs)}
    t0 = arrival_time(params.mass, gamma, p, x_obs)
    if t0 is None:
        logger.warning(f"diffraction: no classical arrival at x_obs={x_obs!r} for t > 0; t0 is absent")
    else:
        scalars["t0"] = t0
        scalars["rho_at_t0"] = float(diffraction_density(params, gamma, p, x_obs, [t0])[1][0])

    maximum = first_local_maximum(times, rho)
    if maximum is None:
        scalars["first_oscillation_amplitude"] = 0.0
    else:
        minimum = following_local_minimum(times, rho, maximum.index)
        scalars["first_max_time"] = maximum.time
        scalars["first_max_value"] = maximum.value
        scalars["following_min_value"] = minimum.value
        scalars["first_oscillation_amplitude"] = maximum.value - minimum.value
        scalars["visibility"] = (maximum.value - minimum.value) / (maximum.value + minimum.value)
    logger.info(f"diffraction: amplitude={scalars['first_oscillation_amplitude']!r}")
    return ExperimentResult(
        kind="diffraction",
        columns={"t": times, "xi": xi, "rho": rho, "rho_classical": classical},
        scalars=scalars,
        metadata={**_echo(params=params, friction=friction, grid=grid), "p": p, "x_obs": x_obs},
    )


# Tunneling through a driven parabolic barrier


class TunnelingScan(typing.NamedTuple):
    parameter: SCAN_PARAMETER_TYPE
    values: tuple[float, ...]

    @classmethod
    def resonance(cls, omega: float, points: int = RESONANCE_SCAN_POINTS) -> TunnelingScan:
        return cls("omega0", tuple(float(v) for v in np.linspace(0.0, RESONANCE_SCAN_SPAN * omega, points)))


@dataclasses.dataclass(frozen=True)
class TunnelingSetup:
    params: SystemParams
    friction: Friction
    field: DrivenRepeller
    width_variant: WidthVariant
    x0: float = -10.0
    p0: float = 1.0
    sigma0: float = 1.0

    def __post_init__(self):
        if not self.x0 < 0.0:
            raise InvalidParameterException(f"the packet must start left of the barrier top, got x0={self.x0!r}")
        if not self.sigma0 > 0.0:
            raise InvalidParameterException(f"sigma0 must be positive, got {self.sigma0!r}")
        if self.field.mass != self.params.mass:
            raise InvalidParameterException(
                f"field mass {self.field.mass!r} differs from particle mass {self.params.mass!r}"
            )
        if self.width_variant not in (WidthVariant.KOSTIN_SCALED, WidthVariant.CK_SCALED):
            raise InvalidParameterException(
                f"tunneling uses the kostin_scaled or ck_scaled width, got {self.width_variant.value}"
            )

    def center(self, times: NDArray[np.float64]) -> NDArray[np.float64]:
        field = self.field
        return center_analytic_driven(
            self.x0,
            self.p0 / self.params.mass,
            field.charge,
            field.e0,
            field.omega0,
            field.phi,
            field.omega,
            self.friction.gamma_r,
            self.params.mass,
            times,
        )

    def width(self, grid: TimeGrid) -> Path:
        state = GaussianState(q=self.x0, q_dot=self.p0 / self.params.mass, sigma=self.sigma0)
        return integrate_width(self.width_variant, self.params, self.friction, self.field, state, grid)

    def with_value(self, parameter: SCAN_PARAMETER_TYPE, value: float) -> TunnelingSetup:
        if parameter in ("omega0", "e0"):
            return dataclasses.replace(self, field=self.field.model_copy(update={parameter: value}))
        if parameter == "epsilon":
            return dataclasses.replace(self, params=self.params.model_copy(update={"epsilon": value}))
        return dataclasses.replace(self, friction=self.friction.model_copy(update={"gamma_r": value}))


def transmission_probability(
    x_t: ArrayLike, sigma: ArrayLike, x0: float, sigma0: float
) -> NDArray[np.float64]:
    """T(t) = [erf(x_t / sqrt(2) sigma) - erf(x0 / sqrt(2) sigma0)] / erfc(x0 / sqrt(2) sigma0)."""
    start_erf, start_erfc = erf_family_array(x0 / (_SQRT2 * sigma0))
    now_erf, _ = erf_family_array(np.asarray(x_t, dtype=np.float64) / (_SQRT2 * np.asarray(sigma, dtype=np.float64)))
    return (now_erf - start_erf) / start_erfc


def _tunneling_columns(setup: TunnelingSetup, grid: TimeGrid, width: Path | None = None) -> dict[str, NDArray]:
    times = grid.times()
    x_t = setup.center(times)
    width = width if width is not None else setup.width(grid)
    return {
        "t": times,
        "x_t": x_t,
        "sigma": width.values,
        "transmission": transmission_probability(x_t, width.values, setup.x0, setup.sigma0),
    }


def run_tunneling(
    params: SystemParams,
    friction: Friction,
    field: DrivenRepeller,
    grid: TimeGrid,
    *,
    width_variant: WidthVariant | str,
    x0: float = -10.0,
    p0: float = 1.0,
    sigma0: float = 1.0,
    scan: TunnelingScan | None = None,
    n_bohm: int = 0,
    streams: RandomStreams | None = None,
    threads: int = 1,
) -> ExperimentResult:
    """
    Transmission probability through a parabolic barrier, optionally driven, or its asymptotic value over a scan.

    The center is the closed-form driven solution; the width is integrated with the selected
    variant. With ``n_bohm > 0`` a ``t_bohm`` column counts Born-sampled trajectories that crossed the
    barrier top.
    """
    setup = TunnelingSetup(params, friction, field, WidthVariant(width_variant), x0, p0, sigma0)
    metadata = {
        **_echo(params=params, friction=friction, field=field, grid=grid),
        "width_variant": setup.width_variant.value,
        "x0": x0,
        "p0": p0,
        "sigma0": sigma0,
    }
    if scan is not None:
        return _run_tunneling_scan(setup, grid, scan, threads, metadata)

    logger.info(
        f"tunneling: variant={setup.width_variant.value}, gamma={friction.gamma_r!r}, epsilon={params.epsilon!r}, "
        f"e0={field.e0!r}, omega0={field.omega0!r}"
    )
    width = setup.width(grid)
    columns = _tunneling_columns(setup, grid, width)
    if n_bohm > 0:
        streams = streams or RandomStreams()
        ensemble = build_ensemble(n_bohm, Path(grid, columns["x_t"]), width, streams)
        columns["t_bohm"] = crossing_transmission(ensemble, 0.0)
        metadata["n_bohm"] = n_bohm
        metadata["seed"] = streams.provenance
    transmission = columns["transmission"]
    scalars = {
        "t_asymptotic": float(transmission[-1]),
        "t_peak": float(transmission.max()),
        "t_peak_time": float(columns["t"][int(np.argmax(transmission))]),
    }
    logger.info(f"tunneling: T(t_end)={scalars['t_asymptotic']!r}")
    return ExperimentResult(kind="tunneling", columns=columns, scalars=scalars, metadata=metadata)


def _run_tunneling_scan(
    setup: TunnelingSetup,
    grid: TimeGrid,
    scan: TunnelingScan,
    threads: int,
    metadata: dict[str, pydantic.JsonValue],
) -> ExperimentResult:
    if not scan.values:
        raise InvalidParameterException("scan needs at least one value")
    logger.info(f"tunneling scan over {scan.parameter}: {len(scan.values)} points on {threads} threads")
    # the width does not see the driving field
    shared_width = setup.width(grid) if scan.parameter in ("omega0", "e0") else None

    def asymptotic(value: float) -> float:
        point = setup.with_value(scan.parameter, value)
        transmission = _tunneling_columns(point, grid, shared_width)["transmission"]
        logger.debug(f"scan point {scan.parameter}={value!r}: T={transmission[-1]!r}")
        return float(transmission[-1])

    values = np.array(scan.values, dtype=np.float64)
    transmissions = np.array(_map_on_pool(asymptotic, scan.values, threads), dtype=np.float64)
    best, best_value = refine_argmax(values, transmissions)
    scalars = {"omega0_res" if scan.parameter == "omega0" else "argmax": best, "t_asymptotic_max": best_value}
    if scan.parameter == "omega0" and setup.field.omega > 0.0:
        scalars["omega0_res_ratio"] = best / setup.field.omega
    metadata = {**metadata, "scan": scan.parameter}
    return ExperimentResult(
        kind="tunneling",
        columns={"scan_value": values, "t_asymptotic": transmissions},
        scalars=scalars,
        metadata=metadata,
    )


# Early arrivals


def barrier_time_scale(params: SystemParams, sigma0: float) -> float:
    """t_b = 2 m sigma0**2 / hbar."""
    return 2.0 * params.mass * sigma0 * sigma0 / params.hbar


def transmission_through_detector(x_d: float, q: ArrayLike, sigma: ArrayLike) -> NDArray[np.float64]:
    """P_tr = erfc((x_d - q) / sqrt(2) sigma) / 2."""
    _, erfc = erf_family_array((x_d - np.asarray(q, dtype=np.float64)) / (_SQRT2 * np.asarray(sigma, dtype=np.float64)))
    return 0.5 * erfc


def _resolve_barrier_time(
    params: SystemParams, friction: Friction, bath: Bath, q0: float, v0: float, sigma0: float, t_barrier: float | None
) -> float:
    if t_barrier is not None:
        if not bath.is_active:
            try:
                free_arrival_time(q0, v0, friction.gamma_r)
            except ArrivalConditionException as exc:
                logger.warning(f"early arrivals: t_barrier={t_barrier!r} given but the free path never arrives: {exc}")
        return t_barrier
    if bath.is_active:
        return 3.0 * barrier_time_scale(params, sigma0)
    return free_arrival_time(q0, v0, friction.gamma_r)


def run_early_arrivals(
    params: SystemParams,
    friction: Friction,
    bath: Bath,
    barrier: GaussianWindowRepeller,
    x_d: float,
    grid: TimeGrid,
    n_tra: int,
    *,
    q0: float = -5.0,
    v0: float = 1.0,
    sigma0: float = 1.0,
    t_barrier: float | None = None,
    streams: RandomStreams | None = None,
    threads: int = 1,
) -> ExperimentResult:
    """
    Transmission beyond ``x_d`` with a briefly switched-on repeller against the same run without it.

    Both runs share velocity and noise draws per trajectory index, so the paired difference has a
    much smaller standard error than either curve. ``t_barrier`` defaults to the free arrival time
    at the origin without a bath and to ``3 t_b`` with one.
    """
    streams = streams or RandomStreams()
    t_b = _resolve_barrier_time(params, friction, bath, q0, v0, sigma0, t_barrier)
    barrier = barrier.model_copy(update={"t_b": t_b, "mass": params.mass})
    free = barrier.model_copy(update={"omega": 0.0})
    n = n_tra if bath.is_active else 1
    logger.info(
        f"early arrivals: omega={barrier.omega!r}, t_barrier={t_b!r}, gamma_r={friction.gamma_r!r}, "
        f"kT={bath.kT!r}, n_tra={n}, seed={streams.master_seed}"
    )
    center_friction = Friction(gamma_r=friction.gamma_r)
    state0 = GaussianState(q=q0, q_dot=v0, sigma=sigma0)
    velocities = sample_thermal_velocities(n, bath.kT, params.mass, streams, mean=v0)

    curves: dict[str, NDArray[np.float64]] = {}
    for name, potential in (("barrier", barrier), ("free", free)):
        width = integrate_width(WidthVariant.GENERALIZED_GAMMA_I, params, friction, potential, state0, grid)
        centers = integrate_center_langevin_ensemble(
            params, center_friction, potential, bath, q0, velocities, grid, streams, threads=threads
        )
        curves[name] = transmission_through_detector(x_d, centers.values, width.values)

    difference = curves["barrier"] - curves["free"]
    columns = {
        "t": grid.times(),
        "p_tr_barrier": curves["barrier"].mean(axis=0),
        "p_tr_free": curves["free"].mean(axis=0),
        "p_tr_difference": difference.mean(axis=0),
        "p_tr_difference_se": (
            difference.std(axis=0, ddof=1) / math.sqrt(n) if n > 1 else np.zeros(grid.n_samples)
        ),
    }
    excess = int(np.argmax(columns["p_tr_difference"]))
    scalars = {
        "t_barrier": t_b,
        "p_tr_barrier_asymptotic": float(columns["p_tr_barrier"][-1]),
        "p_tr_free_asymptotic": float(columns["p_tr_free"][-1]),
        "max_excess": float(columns["p_tr_difference"][excess]),
        "max_excess_time": float(columns["t"][excess]),
    }
    logger.info(f"early arrivals: max excess {scalars['max_excess']!r} at t={scalars['max_excess_time']!r}")
    return ExperimentResult(
        kind="early_arrivals",
        columns=columns,
        scalars=scalars,
        metadata={
            **_echo(params=params, friction=friction, bath=bath, barrier=barrier, grid=grid),
            "x_d": x_d,
            "q0": q0,
            "v0": v0,
            "sigma0": sigma0,
            "n_tra": n,
            "seed": streams.provenance,
        },
    )
