"""Problem data: coefficients, control geometry, game weights, targets.

The forward dynamics controlled here are

    dy = [Lap y + a1 y + b1 dy/dx + 1_O u1 + 1_O1 v1 + 1_O2 v2 + f] dt
         + [a2 y + b2 dy/dx + u2 + g] dW,    y(0) = y0,

with homogeneous Dirichlet boundary values.  (u1, u2) are the leader pair,
(v1, v2) the follower pair, f/g free sources.  Coefficients are deterministic
time-space fields sampled at the left endpoint of each step.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .grid import SpatialGrid, Subdomain
from .tree import AdaptedField, TreeTopology, norm_sq


def as_coefficient(value, tree: TreeTopology, grid: SpatialGrid) -> np.ndarray:
    """Coerce a scalar / per-time / full (N_t, N_x) spec to a coefficient array."""
    arr = np.asarray(value, dtype=float)
    target = (tree.n_steps, grid.n_x)
    if arr.ndim == 0:
        return np.full(target, float(arr))
    if arr.ndim == 1 and arr.shape[0] == tree.n_steps:
        return np.repeat(arr[:, None], grid.n_x, axis=1)
    if arr.shape == target:
        return arr.copy()
    raise ValueError(f"coefficient shape {arr.shape} incompatible with {target}")


@dataclass
class ProblemSpec:
    """Everything the solvers need; validates the standing assumptions."""

    tree: TreeTopology
    grid: SpatialGrid
    a1: np.ndarray
    a2: np.ndarray
    b1: np.ndarray
    b2: np.ndarray
    leader_domain: Subdomain
    follower_domains: tuple[Subdomain, Subdomain]
    target_domain: Subdomain
    alpha: tuple[float, float]
    beta: tuple[float, float]
    y0: np.ndarray
    targets: tuple[AdaptedField, AdaptedField] | None = None

    mask_leader: np.ndarray = field(init=False, repr=False)
    mask_followers: tuple[np.ndarray, np.ndarray] = field(init=False, repr=False)
    mask_target: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        tree, grid = self.tree, self.grid
        for name in ("a1", "a2", "b1", "b2"):
            arr = as_coefficient(getattr(self, name), tree, grid)
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"coefficient {name} must be bounded (finite)")
            setattr(self, name, arr)

        self.alpha = (float(self.alpha[0]), float(self.alpha[1]))
        self.beta = (float(self.beta[0]), float(self.beta[1]))
        if min(self.alpha) <= 0.0:
            raise ValueError(f"alpha weights must be positive, got {self.alpha}")
        if min(self.beta) <= 0.0:
            raise ValueError(f"beta weights must be positive, got {self.beta}")

        self.y0 = np.asarray(self.y0, dtype=float).reshape(grid.n_x)

        # single shared observation domain for both followers; it must meet
        # the leader region, otherwise the hierarchy cannot act on the costs
        if not self.target_domain.intersects(self.leader_domain):
            raise ValueError(
                f"target domain {self.target_domain} does not intersect "
                f"leader domain {self.leader_domain}"
            )

        self.mask_leader = self.leader_domain.mask(grid)
        self.mask_followers = (
            self.follower_domains[0].mask(grid),
            self.follower_domains[1].mask(grid),
        )
        self.mask_target = self.target_domain.mask(grid)
        for label, mask in (
            ("leader", self.mask_leader),
            ("follower 1", self.mask_followers[0]),
            ("follower 2", self.mask_followers[1]),
            ("target", self.mask_target),
        ):
            if not mask.any():
                raise ValueError(f"{label} domain contains no grid point at n_x={grid.n_x}")
        if not (self.mask_leader * self.mask_target).any():
            warnings.warn(
                "leader and target domains intersect as intervals but share no "
                "grid point at this resolution",
                stacklevel=2,
            )

        if self.targets is None:
            zero = AdaptedField.zeros(tree, grid.n_x, tree.n_steps)
            self.targets = (zero, zero.copy())
        for i, tgt in enumerate(self.targets):
            if tgt.n_levels < tree.n_steps or tgt.n_x != grid.n_x:
                raise ValueError(f"target {i + 1} must cover levels 0..N_t-1 on the grid")

    @property
    def n_x(self) -> int:
        return self.grid.n_x

    @property
    def h(self) -> float:
        return self.grid.h

    def homogeneous(self) -> "ProblemSpec":
        """Same operators, zero initial state and zero targets (linear-part solves)."""
        zero = AdaptedField.zeros(self.tree, self.grid.n_x, self.tree.n_steps)
        return replace(self, y0=np.zeros(self.grid.n_x), targets=(zero, zero.copy()))


# -- control containers -----------------------------------------------------


@dataclass
class FollowerPair:
    """Follower controls (v1, v2), each supported on its own subdomain."""

    v1: AdaptedField
    v2: AdaptedField

    @classmethod
    def build(cls, spec: ProblemSpec, v1: AdaptedField, v2: AdaptedField) -> "FollowerPair":
        m1, m2 = spec.mask_followers
        return cls(
            AdaptedField(spec.tree, [a * m1 for a in v1.data[: spec.tree.n_steps]]),
            AdaptedField(spec.tree, [a * m2 for a in v2.data[: spec.tree.n_steps]]),
        )

    @classmethod
    def zeros(cls, spec: ProblemSpec) -> "FollowerPair":
        z = AdaptedField.zeros(spec.tree, spec.grid.n_x, spec.tree.n_steps)
        return cls(z, z.copy())

    def __add__(self, other: "FollowerPair") -> "FollowerPair":
        return FollowerPair(self.v1 + other.v1, self.v2 + other.v2)

    def __sub__(self, other: "FollowerPair") -> "FollowerPair":
        return FollowerPair(self.v1 - other.v1, self.v2 - other.v2)

    def __mul__(self, s: float) -> "FollowerPair":
        return FollowerPair(s * self.v1, s * self.v2)

    __rmul__ = __mul__


@dataclass
class LeaderPair:
    """Leader controls: u1 acts on the leader domain (drift), u2 everywhere (noise)."""

    u1: AdaptedField
    u2: AdaptedField

    @classmethod
    def build(cls, spec: ProblemSpec, u1: AdaptedField, u2: AdaptedField) -> "LeaderPair":
        m = spec.mask_leader
        return cls(
            AdaptedField(spec.tree, [a * m for a in u1.data[: spec.tree.n_steps]]),
            AdaptedField(spec.tree, [a.copy() for a in u2.data[: spec.tree.n_steps]]),
        )

    @classmethod
    def zeros(cls, spec: ProblemSpec) -> "LeaderPair":
        z = AdaptedField.zeros(spec.tree, spec.grid.n_x, spec.tree.n_steps)
        return cls(z, z.copy())

    def __add__(self, other: "LeaderPair") -> "LeaderPair":
        return LeaderPair(self.u1 + other.u1, self.u2 + other.u2)

    def __sub__(self, other: "LeaderPair") -> "LeaderPair":
        return LeaderPair(self.u1 - other.u1, self.u2 - other.u2)

    def __mul__(self, s: float) -> "LeaderPair":
        return LeaderPair(s * self.u1, s * self.u2)

    __rmul__ = __mul__


def follower_norm_sq(spec: ProblemSpec, fp: FollowerPair) -> float:
    m1, m2 = spec.mask_followers
    return norm_sq(fp.v1, spec.h, m1) + norm_sq(fp.v2, spec.h, m2)


def leader_norm_sq(spec: ProblemSpec, lp: LeaderPair) -> float:
    return norm_sq(lp.u1, spec.h, spec.mask_leader) + norm_sq(lp.u2, spec.h)


# -- canonical data builders -------------------------------------------------


def time_bump(t: np.ndarray, horizon: float) -> np.ndarray:
    """Smooth profile equal to 1 at t=0, supported on [0, 3T/4]."""
    t = np.asarray(t, dtype=float)
    cutoff = 0.75 * horizon
    out = np.where(t < cutoff, np.cos(0.5 * np.pi * np.minimum(t / cutoff, 1.0)) ** 2, 0.0)
    return out


def space_bump(grid: SpatialGrid, sub: Subdomain) -> np.ndarray:
    """Smooth bump supported on the subdomain, peak value 1 at its midpoint."""
    x = grid.x
    inside = (x > sub.lo) & (x < sub.hi)
    s = np.zeros_like(x)
    s[inside] = np.sin(np.pi * (x[inside] - sub.lo) / (sub.hi - sub.lo)) ** 2
    return s


def make_target(
    tree: TreeTopology, grid: SpatialGrid, sub: Subdomain, amplitude: float
) -> AdaptedField:
    """Deterministic tracking target: amplitude * time bump * space bump, levels 0..N_t-1."""
    t = tree.times()[: tree.n_steps]
    profile = amplitude * time_bump(t, tree.horizon)
    values = profile[:, None] * space_bump(grid, sub)[None, :]
    return AdaptedField.deterministic(tree, values)


def y0_sine(grid: SpatialGrid, amplitude: float = 1.0) -> np.ndarray:
    return amplitude * np.sin(np.pi * grid.x / grid.length)


def y0_bump(grid: SpatialGrid, amplitude: float = 1.0) -> np.ndarray:
    mid = Subdomain(0.25 * grid.length, 0.75 * grid.length)
    return amplitude * space_bump(grid, mid)


def y0_random_fourier(
    grid: SpatialGrid, amplitude: float, rng: np.random.Generator, n_modes: int = 4
) -> np.ndarray:
    """Smooth random initial state: decaying random sine series."""
    x = grid.x / grid.length
    coeffs = rng.standard_normal(n_modes)
    out = np.zeros_like(x)
    for k in range(1, n_modes + 1):
        out += coeffs[k - 1] / k * np.sin(k * np.pi * x)
    return amplitude * out
