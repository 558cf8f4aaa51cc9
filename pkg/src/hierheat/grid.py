"""Interior 1-D Dirichlet grid and stencil operations.

h = L/(N_x+1), interior points x_j = j*h for j = 1..N_x; homogeneous
Dirichlet values at x = 0 and x = L are implicit (never stored).  All
operators act along the last axis so whole tree levels (shape (nodes, N_x))
go through in one call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded


@dataclass(frozen=True)
class SpatialGrid:
    n_x: int
    length: float

    def __post_init__(self) -> None:
        if self.n_x < 1:
            raise ValueError(f"n_x must be >= 1, got {self.n_x}")
        if not self.length > 0.0:
            raise ValueError(f"length must be positive, got {self.length}")

    @property
    def h(self) -> float:
        return self.length / (self.n_x + 1)

    @property
    def x(self) -> np.ndarray:
        """Interior grid points."""
        return self.h * np.arange(1, self.n_x + 1)

    @property
    def x_closed(self) -> np.ndarray:
        """Grid points including both boundary points."""
        return self.h * np.arange(0, self.n_x + 2)


@dataclass(frozen=True)
class Subdomain:
    """Open subinterval (lo, hi) of (0, L); realised on the grid as a 0/1 mask."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise ValueError(f"empty subdomain ({self.lo}, {self.hi})")

    def mask(self, grid: SpatialGrid) -> np.ndarray:
        x = grid.x
        return ((x > self.lo) & (x < self.hi)).astype(float)

    def intersects(self, other: "Subdomain") -> bool:
        return max(self.lo, other.lo) < min(self.hi, other.hi)

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)


def apply_laplacian(u: np.ndarray, grid: SpatialGrid) -> np.ndarray:
    """Second difference (u_{j-1} - 2 u_j + u_{j+1}) / h**2 with Dirichlet closure."""
    u = np.asarray(u, dtype=float)
    out = -2.0 * u.copy()
    out[..., 1:] += u[..., :-1]
    out[..., :-1] += u[..., 1:]
    return out / grid.h**2


def apply_gradient(u: np.ndarray, grid: SpatialGrid) -> np.ndarray:
    """Centred difference (u_{j+1} - u_{j-1}) / (2h); boundary neighbours are 0."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    out[..., :-1] += u[..., 1:]
    out[..., 1:] -= u[..., :-1]
    return out / (2.0 * grid.h)


def implicit_banded(grid: SpatialGrid, coeff: float) -> np.ndarray:
    """Banded (ab) form of I - coeff * Lap_h for scipy.linalg.solve_banded."""
    if coeff < 0.0:
        raise ValueError(f"implicit coefficient must be >= 0, got {coeff}")
    r = coeff / grid.h**2
    ab = np.zeros((3, grid.n_x))
    ab[0, 1:] = -r  # superdiagonal
    ab[1, :] = 1.0 + 2.0 * r
    ab[2, :-1] = -r  # subdiagonal
    return ab


def implicit_step_solve(rhs: np.ndarray, grid: SpatialGrid, coeff: float) -> np.ndarray:
    """Solve (I - coeff * Lap_h) u = rhs along the last axis.

    The matrix is symmetric tridiagonal and strictly diagonally dominant for
    coeff >= 0, so the solve is unconditionally well posed.
    """
    ab = implicit_banded(grid, coeff)
    rhs = np.asarray(rhs, dtype=float)
    if rhs.ndim == 1:
        return solve_banded((1, 1), ab, rhs)
    flat = rhs.reshape(-1, grid.n_x)
    sol = solve_banded((1, 1), ab, flat.T).T
    return sol.reshape(rhs.shape)


def solve_banded_system(ab: np.ndarray, rhs: np.ndarray, n_x: int) -> np.ndarray:
    """Inner-loop variant of implicit_step_solve with a prebuilt ab matrix."""
    if rhs.ndim == 1:
        return solve_banded((1, 1), ab, rhs)
    flat = rhs.reshape(-1, n_x)
    return solve_banded((1, 1), ab, flat.T).T.reshape(rhs.shape)


def restrict(u: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Multiply by a subdomain indicator (self-adjoint, idempotent)."""
    return np.asarray(u, dtype=float) * mask


def laplacian_matrix(grid: SpatialGrid) -> np.ndarray:
    """Dense N_x x N_x second-difference matrix (oracle and direct checks)."""
    n = grid.n_x
    m = np.zeros((n, n))
    np.fill_diagonal(m, -2.0)
    idx = np.arange(n - 1)
    m[idx, idx + 1] = 1.0
    m[idx + 1, idx] = 1.0
    return m / grid.h**2


def gradient_matrix(grid: SpatialGrid) -> np.ndarray:
    """Dense centred-difference matrix; exactly antisymmetric."""
    n = grid.n_x
    m = np.zeros((n, n))
    idx = np.arange(n - 1)
    m[idx, idx + 1] = 1.0
    m[idx + 1, idx] = -1.0
    return m / (2.0 * grid.h)
