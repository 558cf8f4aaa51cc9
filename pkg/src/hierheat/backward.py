"""Backward solver: the exact algebraic transpose of the forward sweep.

Discretise-then-transpose: the backward step is the adjoint of the forward
two-stage step under the probability/space quadrature, so the discrete
duality identity

  E<y(T), z_T> - E<y0, z(0)> = <F_drift, z>_Q + <F_diff, Z>_Q + <y, S>_Q

holds to round-off for every forward input triple (y0, F_drift, F_diff) and
every backward source S.  The source argument S is the additive drift term
of the backward equation as written, e.g. -alpha_i (y - y_id) 1_Od for the
follower adjoints or +sum_i alpha_i psi_i 1_Od for the leader adjoint.

Two companion views are stored per solve:

* z       -- at levels 0..N_t-1 the pairing values zeta_n = (I-dt Lap)^-T of
             the averaged children; these are what every adjoint formula
             consumes (control characterisations, coupling feedbacks, the
             duality pairing against drift sources).  Level N_t holds the
             terminal data.
* z_nodes -- the full per-node backward recursion
             z_n = (I + dt A1)^T zeta_n + dt D^T Z_n - dt S_n,
             whose root is z(0) and whose sibling differences define Z.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import apply_gradient, implicit_banded, solve_banded_system
from .problem import ProblemSpec
from .tree import (
    AdaptedField,
    conditional_average,
    inner_product,
    martingale_difference,
    root_inner,
    terminal_inner,
)
from .forward import solve_forward


@dataclass
class BackwardPair:
    """(z, Z) plus the per-node recursion the martingale component comes from."""

    z: AdaptedField
    Z: AdaptedField
    z_nodes: AdaptedField

    @property
    def z0(self) -> np.ndarray:
        """z(0): the single root array of the backward recursion."""
        return self.z_nodes.data[0][0]

    @property
    def terminal(self) -> np.ndarray:
        return self.z.data[-1]

    def _mix(self, other: "BackwardPair", w_self: float, w_other: float) -> "BackwardPair":
        return BackwardPair(
            z=w_self * self.z + w_other * other.z,
            Z=w_self * self.Z + w_other * other.Z,
            z_nodes=w_self * self.z_nodes + w_other * other.z_nodes,
        )


def solve_backward(
    spec: ProblemSpec,
    terminal: np.ndarray,
    source: AdaptedField | None = None,
) -> BackwardPair:
    """Transpose sweep from terminal data on the leaves up to the root.

    terminal: (n_leaves, n_x) leaf field, or (n_x,) broadcast to all leaves.
    source:   drift term of the backward equation on levels 0..N_t-1.
    """
    tree, grid = spec.tree, spec.grid
    dt = tree.dt
    ab = implicit_banded(grid, dt)

    term = np.asarray(terminal, dtype=float)
    if term.ndim == 1:
        term = np.broadcast_to(term, (tree.n_leaves, grid.n_x)).copy()
    if term.shape != (tree.n_leaves, grid.n_x):
        raise ValueError(f"terminal must have shape {(tree.n_leaves, grid.n_x)}, got {term.shape}")

    z_pair: list[np.ndarray | None] = [None] * tree.n_levels
    z_full: list[np.ndarray | None] = [None] * tree.n_levels
    z_mart: list[np.ndarray | None] = [None] * tree.n_steps
    z_pair[tree.n_steps] = term
    z_full[tree.n_steps] = term.copy()

    for n in range(tree.n_steps - 1, -1, -1):
        nxt = z_full[n + 1]
        w = conditional_average(nxt)
        Zn = martingale_difference(nxt[0::2], nxt[1::2], dt)
        # (I - dt Lap)^-T = (I - dt Lap)^-1: the implicit matrix is symmetric
        zeta = solve_banded_system(ab, w, grid.n_x)
        # transposes of the explicit stages; Dx^T = -Dx (centred stencil), so
        # (diag(a) + diag(b) Dx)^T u = a u - Dx(b u), the divergence form
        zn = (
            zeta
            + dt * (spec.a1[n] * zeta - apply_gradient(spec.b1[n] * zeta, grid))
            + dt * (spec.a2[n] * Zn - apply_gradient(spec.b2[n] * Zn, grid))
        )
        if source is not None:
            zn = zn - dt * source.data[n]
        z_pair[n] = zeta
        z_full[n] = zn
        z_mart[n] = Zn

    return BackwardPair(
        z=AdaptedField(tree, z_pair),
        Z=AdaptedField(tree, z_mart),
        z_nodes=AdaptedField(tree, z_full),
    )


def duality_check(
    spec: ProblemSpec,
    y0: np.ndarray,
    drift_source: AdaptedField | None,
    diffusion_source: AdaptedField | None,
    pair: BackwardPair,
    backward_source: AdaptedField | None = None,
) -> float:
    """Relative residual of the discrete duality identity; <= 1e-12 by construction.

    Runs the forward sweep for the given inputs (controls off), assembles

      E<y(T), z_T> - E<y0, z(0)> - <F_drift, z>_Q - <F_diff, Z>_Q - <y, S>_Q,

    and divides by the sum of the term magnitudes.
    """
    h = spec.grid.h
    y = solve_forward(spec, y0=y0, drift_source=drift_source, diffusion_source=diffusion_source)
    terms = [
        terminal_inner(spec.tree, y.data[-1], pair.terminal, h),
        -root_inner(np.asarray(y0, dtype=float), pair.z0, h),
    ]
    if drift_source is not None:
        terms.append(-inner_product(drift_source, pair.z, h))
    if diffusion_source is not None:
        terms.append(-inner_product(diffusion_source, pair.Z, h))
    if backward_source is not None:
        terms.append(-inner_product(y, backward_source, h))
    scale = sum(abs(t) for t in terms)
    return abs(sum(terms)) / max(scale, 1e-300)
