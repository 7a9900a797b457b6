from __future__ import annotations

import dataclasses
from typing import Annotated

import annotated_types
import numpy as np
import pydantic
from numpy.typing import NDArray

from scaled_trajectories._internal.exceptions import GridMismatchException, InvalidParameterException
from scaled_trajectories._internal.models import FrozenModel, PositiveFloat

_COMMENSURABILITY_TOLERANCE = 1e-9


class TimeGrid(FrozenModel):
    """
    Uniform time grid ``t0 + k * dt`` for ``k = 0 .. n_steps``.

    Integrators step through every grid point; only every ``sample_every``-th point is recorded.

    ``n_steps`` is ``round((t1 - t0) / dt)``, but the span must be a whole number of steps up to a relative
    rounding error of ``1e-9``: a ``dt`` that does not divide the span is rejected rather than rounded, so the
    last sample always sits on ``t1``.
    """

    t0: float = 0.0
    t1: float
    dt: PositiveFloat = 1e-3
    sample_every: Annotated[int, annotated_types.Ge(1)] = 1

    @pydantic.model_validator(mode="after")
    def _check_layout(self) -> TimeGrid:
        if not self.t1 > self.t0:
            raise ValueError(f"t1 must be greater than t0, got t0={self.t0!r}, t1={self.t1!r}")
        steps = (self.t1 - self.t0) / self.dt
        if abs(steps - round(steps)) > _COMMENSURABILITY_TOLERANCE * max(1.0, steps):
            raise ValueError(f"t1 - t0 = {self.t1 - self.t0!r} is not a multiple of dt = {self.dt!r}")
        if round(steps) % self.sample_every:
            raise ValueError(f"n_steps = {round(steps)} is not a multiple of sample_every = {self.sample_every}")
        return self

    @classmethod
    def span(cls, t_end: float, dt: float = 1e-3, sample_every: int = 1, t0: float = 0.0) -> TimeGrid:
        try:
            return cls(t0=t0, t1=t_end, dt=dt, sample_every=sample_every)
        except pydantic.ValidationError as exc:
            raise InvalidParameterException(str(exc)) from exc

    @property
    def n_steps(self) -> int:
        return round((self.t1 - self.t0) / self.dt)

    @property
    def n_samples(self) -> int:
        return self.n_steps // self.sample_every + 1

    @property
    def sample_dt(self) -> float:
        return self.dt * self.sample_every

    def step_time(self, k: int) -> float:
        return self.t0 + k * self.dt

    def times(self) -> NDArray[np.float64]:
        return self.t0 + self.dt * np.arange(0, self.n_steps + 1, self.sample_every, dtype=np.float64)


@dataclasses.dataclass(frozen=True)
class Path:
    """
    Values recorded on a grid; the last axis runs over the recorded times.

    A single trajectory has 1-d ``values``; an ensemble stacks trajectories along the first axis.
    """

    grid: TimeGrid
    values: NDArray[np.float64]
    derivatives: NDArray[np.float64] | None = None

    def __post_init__(self):
        if self.values.shape[-1] != self.grid.n_samples:
            raise GridMismatchException(
                f"path has {self.values.shape[-1]} samples, grid records {self.grid.n_samples}"
            )
        if self.derivatives is not None and self.derivatives.shape != self.values.shape:
            raise GridMismatchException(
                f"derivatives shape {self.derivatives.shape} differs from values shape {self.values.shape}"
            )

    @property
    def times(self) -> NDArray[np.float64]:
        return self.grid.times()

    @property
    def initial(self) -> NDArray[np.float64]:
        return self.values[..., 0]

    def __len__(self) -> int:
        return self.grid.n_samples


@dataclasses.dataclass(frozen=True)
class CoupledPath:
    center: Path
    width: Path

    def __post_init__(self):
        require_same_grid(self.center, self.width)


def require_same_grid(*paths: Path) -> TimeGrid:
    grid = paths[0].grid
    for path in paths[1:]:
        if path.grid != grid:
            raise GridMismatchException(f"paths live on different grids: {grid!r} vs {path.grid!r}")
    return grid
