"""
Scaled trajectories of Gaussian packets by the dressing scheme.

A particle started at ``x0`` follows ``x(t) = q(t) + (x0 - q(0)) * sigma(t) / sigma(0)``; nothing is
integrated here, every trajectory is reconstructed from a center path and a width path.
"""

from __future__ import annotations

import dataclasses
import logging
import typing

import numpy as np
from numpy.typing import ArrayLike, NDArray

from scaled_trajectories._internal.analytic import integrated_dissipative_time
from scaled_trajectories._internal.exceptions import InvalidParameterException
from scaled_trajectories._internal.grid import Path, TimeGrid, require_same_grid
from scaled_trajectories._internal.rng import RandomStreams, SeedProvenance, Substream

logger = logging.getLogger(__name__)


class MonteCarloEstimate(typing.NamedTuple):
    mean: NDArray[np.float64]
    standard_error: NDArray[np.float64]


class DiffusionCoefficients(typing.NamedTuple):
    classical: NDArray[np.float64]
    quantum: NDArray[np.float64]


@dataclasses.dataclass(frozen=True)
class TrajectoryEnsemble:
    """
    Trajectories started at Born-sampled positions, one row per particle.

    :Attributes:
        - **grid**: recorded times
        - **initial_positions**: starting point of every row
        - **trajectories**: ``n x n_samples`` positions
        - **seed_provenance**: master seed and stream id the initial positions were drawn from
    """

    grid: TimeGrid
    initial_positions: NDArray[np.float64]
    trajectories: NDArray[np.float64]
    seed_provenance: SeedProvenance | None = None

    def __post_init__(self):
        expected = (self.initial_positions.size, self.grid.n_samples)
        if self.trajectories.shape != expected:
            raise InvalidParameterException(f"trajectories have shape {self.trajectories.shape}, expected {expected}")

    def __len__(self) -> int:
        return self.initial_positions.size

    def as_path(self) -> Path:
        return Path(self.grid, self.trajectories)


def _single(path: Path, name: str) -> None:
    if path.values.ndim != 1:
        raise InvalidParameterException(f"{name} must be a single path, got values of shape {path.values.shape}")


def _check_width(sigma_path: Path) -> None:
    _single(sigma_path, "sigma_path")
    if not (sigma_path.values > 0.0).all():
        raise InvalidParameterException("sigma_path must be strictly positive")


def dressing_trajectory(x0_particle: ArrayLike, q_path: Path, sigma_path: Path) -> Path:
    """
    Dress the center path with the width ratio.

    A scalar ``x0_particle`` gives a single path; an array gives one row per starting point.

    :raises GridMismatchException: if the paths are recorded on different grids
    """
    grid = require_same_grid(q_path, sigma_path)
    _single(q_path, "q_path")
    _check_width(sigma_path)
    x0 = np.asarray(x0_particle, dtype=np.float64)
    q = q_path.values
    ratio = sigma_path.values / sigma_path.values[0]
    offsets = (x0 - q[0])[..., np.newaxis]
    values = q + offsets * ratio
    derivatives = None
    if q_path.derivatives is not None and sigma_path.derivatives is not None:
        derivatives = q_path.derivatives + offsets * (sigma_path.derivatives / sigma_path.values[0])
    return Path(grid, values, derivatives)


def velocity_field(x: ArrayLike, t: ArrayLike, q_path: Path, sigma_path: Path) -> NDArray[np.float64]:
    """
    v(x, t) = (sigma'(t) / sigma(t)) (x - q(t)) + q'(t).

    Path values between recorded times are interpolated linearly.
    """
    require_same_grid(q_path, sigma_path)
    _single(q_path, "q_path")
    _check_width(sigma_path)
    if q_path.derivatives is None or sigma_path.derivatives is None:
        raise InvalidParameterException("velocity_field needs paths with recorded derivatives")
    times = q_path.times
    t = np.asarray(t, dtype=np.float64)
    q = np.interp(t, times, q_path.values)
    q_dot = np.interp(t, times, q_path.derivatives)
    sigma = np.interp(t, times, sigma_path.values)
    sigma_dot = np.interp(t, times, sigma_path.derivatives)
    return sigma_dot / sigma * (np.asarray(x, dtype=np.float64) - q) + q_dot


def sample_initial_positions(
    n: int, q0: float, sigma0: float, streams: RandomStreams, first_index: int = 0
) -> NDArray[np.float64]:
    """Born-rule starting points: ``n`` draws of N(q0, sigma0**2), one per trajectory index."""
    if n < 1:
        raise InvalidParameterException(f"n must be at least 1, got {n}")
    if not sigma0 > 0.0:
        raise InvalidParameterException(f"sigma0 must be positive, got {sigma0!r}")
    generators = streams.generators(range(first_index, first_index + n), Substream.BORN)
    return np.array([q0 + sigma0 * generator.standard_normal() for generator in generators], dtype=np.float64)


def build_ensemble(n: int, q_path: Path, sigma_path: Path, streams: RandomStreams) -> TrajectoryEnsemble:
    initial_positions = sample_initial_positions(n, float(q_path.values[0]), float(sigma_path.values[0]), streams)
    dressed = dressing_trajectory(initial_positions, q_path, sigma_path)
    logger.debug(f"built ensemble of {n} trajectories on {q_path.grid.n_samples} samples")
    return TrajectoryEnsemble(q_path.grid, initial_positions, dressed.values, streams.provenance)


def is_non_crossing(ensemble: TrajectoryEnsemble) -> bool:
    """True if the order of the starting points is kept at every recorded time."""
    order = np.argsort(ensemble.initial_positions, kind="stable")
    initial = ensemble.initial_positions[order]
    distinct = np.diff(initial) > 0.0
    gaps = np.diff(ensemble.trajectories[order], axis=0)
    return bool((gaps[distinct] > 0.0).all())


def msd_classical_analytic(kT: float, mass: float, gamma: float, t: ArrayLike) -> NDArray[np.float64]:
    """
    2 (kT / m gamma) (t - (1 - exp(-gamma t)) / gamma), continued to ``kT t**2 / m`` for ``gamma = 0``.

    Small ``gamma t`` is evaluated from its Taylor series.
    """
    if not mass > 0.0:
        raise InvalidParameterException(f"mass must be positive, got {mass!r}")
    return 2.0 * kT / mass * integrated_dissipative_time(gamma, t)


def diffusion_coefficients(
    kT: float, mass: float, gamma: float, sigma_path: Path, t: ArrayLike
) -> DiffusionCoefficients:
    """
    Classical and quantum time-dependent diffusion coefficients.

    ``D_cl = MSD_cl / 2t`` and ``D_q = D_cl + (sigma(t) - sigma(0))**2 / 2t``; the width is read from
    ``sigma_path`` (linear interpolation between recorded times).

    :raises InvalidParameterException: for ``t <= 0``
    """
    _check_width(sigma_path)
    t = np.asarray(t, dtype=np.float64)
    if (t <= 0.0).any():
        raise InvalidParameterException("diffusion coefficients are defined for t > 0 only")
    classical = msd_classical_analytic(kT, mass, gamma, t) / (2.0 * t)
    sigma = np.interp(t, sigma_path.times, sigma_path.values)
    spread = (sigma - sigma_path.values[0]) ** 2 / (2.0 * t)
    return DiffusionCoefficients(classical, classical + spread)


def msd_monte_carlo(centers: Path, born_samples: ArrayLike, sigma_path: Path) -> MonteCarloEstimate:
    """
    Mean square displacement of scaled trajectories over centers and Born positions.

    Row ``i`` of ``centers`` is dressed with starting point ``born_samples[i]``; the squared
    displacement from the starting point is averaged over rows in index order.
    """
    require_same_grid(centers, sigma_path)
    _check_width(sigma_path)
    q = np.atleast_2d(centers.values)
    x0 = np.asarray(born_samples, dtype=np.float64)
    n = q.shape[0]
    if n == 0:
        raise InvalidParameterException("msd_monte_carlo needs a non-empty ensemble")
    if x0.shape != (n,):
        raise InvalidParameterException(f"expected {n} Born samples, got shape {x0.shape}")
    q0 = q[:, :1]
    stretch = sigma_path.values / sigma_path.values[0] - 1.0
    squared = ((q - q0) + (x0[:, np.newaxis] - q0) * stretch) ** 2
    mean = squared.mean(axis=0)
    if n > 1:
        standard_error = squared.std(axis=0, ddof=1) / np.sqrt(n)
    else:
        standard_error = np.zeros_like(mean)
    return MonteCarloEstimate(mean, standard_error)


def transmitted_fraction(ensemble: TrajectoryEnsemble, x_d: float) -> NDArray[np.float64]:
    """Fraction of trajectories beyond the detector ``x_d`` at every recorded time."""
    if len(ensemble) == 0:
        raise InvalidParameterException("transmitted_fraction needs a non-empty ensemble")
    return (ensemble.trajectories > x_d).mean(axis=0)


def crossing_transmission(ensemble: TrajectoryEnsemble, x_d: float) -> NDArray[np.float64]:
    """
    Transmission counted from trajectories: particles beyond ``x_d`` in excess of those that started
    there, relative to the particles that started before it.
    """
    started_before = int((ensemble.initial_positions < x_d).sum())
    if started_before == 0:
        raise InvalidParameterException(f"no trajectory starts before x_d={x_d!r}")
    started_beyond = int((ensemble.initial_positions > x_d).sum())
    beyond = (ensemble.trajectories > x_d).sum(axis=0)
    return (beyond - started_beyond) / started_before


def critical_initial_position(q_path: Path, sigma_path: Path, x_d: float) -> NDArray[np.float64]:
    """
    Starting point whose trajectory sits on ``x_d`` at each recorded time.

    By non-crossing, every particle started to the right of it has passed the detector.
    """
    require_same_grid(q_path, sigma_path)
    _single(q_path, "q_path")
    _check_width(sigma_path)
    q = q_path.values
    sigma = sigma_path.values
    return q[0] + (x_d - q) * sigma[0] / sigma
