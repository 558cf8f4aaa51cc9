"""Forward solver: semi-implicit two-stage sweep down the scenario tree.

Per step n (coefficients frozen at the left endpoint t_n):

  stage 1   (I - dt Lap_h) y* = y_n + dt [a1 y_n + b1 Dx y_n + drift terms]
  stage 2   children y_{n+1}(+-) = y* +- sqrt(dt) [a2 y_n + b2 Dx y_n + noise terms]

Drift terms collect the free drift source, the masked leader control u1 and
the masked follower controls; noise terms collect the free diffusion source
and the leader control u2.  Stage 1 keeps the sweep unconditionally stable;
stage 2 realises the two-point branch increments +-sqrt(dt).
"""

from __future__ import annotations

import numpy as np

from .grid import apply_gradient, implicit_banded, solve_banded_system
from .problem import FollowerPair, LeaderPair, ProblemSpec
from .tree import AdaptedField


def solve_forward(
    spec: ProblemSpec,
    y0: np.ndarray | None = None,
    drift_source: AdaptedField | None = None,
    diffusion_source: AdaptedField | None = None,
    leaders: LeaderPair | None = None,
    followers: FollowerPair | None = None,
) -> AdaptedField:
    """Sweep the state down the tree; returns a field with N_t+1 levels.

    y0 defaults to spec.y0.  Sources must cover levels 0..N_t-1.
    """
    tree, grid = spec.tree, spec.grid
    dt, sq = tree.dt, tree.sqrt_dt
    start = spec.y0 if y0 is None else np.asarray(y0, dtype=float).reshape(grid.n_x)
    ab = implicit_banded(grid, dt)
    m1, m2 = spec.mask_followers

    levels = [start[np.newaxis, :].copy()]
    for n in range(tree.n_steps):
        yn = levels[n]
        dy = apply_gradient(yn, grid)
        drift = spec.a1[n] * yn + spec.b1[n] * dy
        if drift_source is not None:
            drift = drift + drift_source.data[n]
        if leaders is not None:
            drift = drift + spec.mask_leader * leaders.u1.data[n]
        if followers is not None:
            drift = drift + m1 * followers.v1.data[n] + m2 * followers.v2.data[n]

        ystar = solve_banded_system(ab, yn + dt * drift, grid.n_x)

        noise = spec.a2[n] * yn + spec.b2[n] * dy
        if diffusion_source is not None:
            noise = noise + diffusion_source.data[n]
        if leaders is not None:
            noise = noise + leaders.u2.data[n]

        nxt = np.empty((2 ** (n + 1), grid.n_x))
        nxt[0::2] = ystar + sq * noise
        nxt[1::2] = ystar - sq * noise
        levels.append(nxt)
    return AdaptedField(tree, levels)


def solve_follower_response(spec: ProblemSpec, player: int, v: AdaptedField) -> AdaptedField:
    """L_i(v_i): zero-initial forward response to follower i acting alone."""
    if player not in (1, 2):
        raise ValueError(f"player must be 1 or 2, got {player}")
    mask = spec.mask_followers[player - 1]
    src = AdaptedField(spec.tree, [mask * v.data[n] for n in range(spec.tree.n_steps)])
    return solve_forward(spec, y0=np.zeros(spec.grid.n_x), drift_source=src)


def solve_free_drift(spec: ProblemSpec, leaders: LeaderPair | None = None) -> AdaptedField:
    """q: the state driven by initial data and leader controls, followers off."""
    return solve_forward(spec, leaders=leaders)
