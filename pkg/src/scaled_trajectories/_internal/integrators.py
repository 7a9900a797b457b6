"""Fixed-step integrators for second-order systems ``y'' = a(t, y, y')``."""

from __future__ import annotations

import logging
import math
import typing
from collections.abc import Callable

import numpy as np
from numpy.typing import NDArray

from scaled_trajectories._internal.exceptions import NonFiniteStateException
from scaled_trajectories._internal.grid import TimeGrid
from scaled_trajectories._internal.rng import NoiseBlocks

logger = logging.getLogger(__name__)

State = typing.TypeVar("State", float, NDArray[np.float64])

Acceleration = Callable[[float, State, State], State]
StateCheck = Callable[[float, State, State], None]
PositionForce = Callable[[float, NDArray[np.float64]], NDArray[np.float64]]


def require_finite(t: float, y, v, names: tuple[str, str] = ("y", "v")) -> None:
    if np.isfinite(y).all() and np.isfinite(v).all():
        return
    y_array = np.atleast_1d(np.asarray(y, dtype=np.float64))
    v_array = np.atleast_1d(np.asarray(v, dtype=np.float64))
    bad = int(np.flatnonzero(~(np.isfinite(y_array) & np.isfinite(v_array)))[0])
    raise NonFiniteStateException(
        "non-finite state",
        time=t,
        state={f"{names[0]}[{bad}]": float(y_array[bad]), f"{names[1]}[{bad}]": float(v_array[bad])},
    )


def rk4_second_order(
    acceleration: Acceleration,
    grid: TimeGrid,
    y0: State,
    v0: State,
    check: StateCheck | None = None,
    names: tuple[str, str] = ("y", "v"),
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """
    Classical fourth-order Runge-Kutta on ``(y, v)' = (v, a(t, y, v))``.

    ``y0``/``v0`` may be floats or arrays (one entry per component or per trajectory); the same
    arithmetic is applied elementwise. The state is checked for finiteness after every step and then
    passed to ``check``, which may raise to abort the integration.

    :return: recorded positions and velocities, recorded time on the last axis
    """
    dt = grid.dt
    half = 0.5 * dt
    sixth = dt / 6.0
    shape = np.shape(y0)
    ys = np.empty((*shape, grid.n_samples), dtype=np.float64)
    vs = np.empty((*shape, grid.n_samples), dtype=np.float64)
    ys[..., 0] = y0
    vs[..., 0] = v0
    y, v = y0, v0
    sample = 1
    for k in range(grid.n_steps):
        t = grid.step_time(k)
        a1 = acceleration(t, y, v)
        y2 = y + half * v
        v2 = v + half * a1
        a2 = acceleration(t + half, y2, v2)
        y3 = y + half * v2
        v3 = v + half * a2
        a3 = acceleration(t + half, y3, v3)
        y4 = y + dt * v3
        v4 = v + dt * a3
        a4 = acceleration(t + dt, y4, v4)
        y = y + sixth * (v + 2.0 * v2 + 2.0 * v3 + v4)
        v = v + sixth * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        t_next = grid.step_time(k + 1)
        require_finite(t_next, y, v, names)
        if check is not None:
            check(t_next, y, v)
        if (k + 1) % grid.sample_every == 0:
            ys[..., sample] = y
            vs[..., sample] = v
            sample += 1
    logger.debug(f"rk4: {grid.n_steps} steps of dt={dt!r}, shape={shape}")
    return ys, vs


def baoab_langevin(
    force: PositionForce,
    grid: TimeGrid,
    q0: NDArray[np.float64],
    v0: NDArray[np.float64],
    *,
    gamma: float,
    kT: float,
    mass: float,
    noise: NoiseBlocks,
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """
    Langevin dynamics ``q'' = -gamma q' + force(t, q) / mass + noise`` by BAOAB splitting.

    The friction and noise part is an exact Ornstein-Uhlenbeck update, so for ``force = 0`` the
    stationary velocity variance is exactly ``kT / mass``.
    """
    dt = grid.dt
    half = 0.5 * dt
    damping = math.exp(-gamma * dt)
    kick = math.sqrt(-math.expm1(-2.0 * gamma * dt) * kT / mass)
    q = np.array(q0, dtype=np.float64)
    v = np.array(v0, dtype=np.float64)
    qs = np.empty((*q.shape, grid.n_samples), dtype=np.float64)
    vs = np.empty((*q.shape, grid.n_samples), dtype=np.float64)
    qs[..., 0] = q
    vs[..., 0] = v
    a = force(grid.t0, q) / mass
    sample = 1
    for k in range(grid.n_steps):
        v = v + half * a
        q = q + half * v
        v = damping * v + kick * noise.step(k)
        q = q + half * v
        t_next = grid.step_time(k + 1)
        a = force(t_next, q) / mass
        v = v + half * a
        require_finite(t_next, q, v, ("q", "q_dot"))
        if (k + 1) % grid.sample_every == 0:
            qs[..., sample] = q
            vs[..., sample] = v
            sample += 1
    logger.debug(f"baoab: {grid.n_steps} steps of dt={dt!r} for {q.size} trajectories")
    return qs, vs
