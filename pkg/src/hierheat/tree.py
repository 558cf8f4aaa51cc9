"""Binary scenario tree: topology, adapted fields, probabilistic quadrature.

Conventions used throughout the package:

* time levels n = 0..N_t, t_n = n*dt, dt = T/N_t; level n carries 2**n nodes
* node (n, k) has children (n+1, 2k) ["up", increment +sqrt(dt)] and
  (n+1, 2k+1) ["down", increment -sqrt(dt)]; every node has probability 2**-n
* a flat heap numbering (root 0, children of i at 2i+1 / 2i+2) is exposed for
  node-level bookkeeping; field storage is per level for vectorisation
* the space-time inner product uses left-endpoint time quadrature: levels
  0..N_t-1 enter with weight dt, the terminal level never does
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


def build_tree(n_steps: int, horizon: float) -> "TreeTopology":
    """Construct the non-recombining binary tree with n_steps time steps on [0, horizon]."""
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    if not horizon > 0.0:
        raise ValueError(f"horizon must be positive, got {horizon}")
    return TreeTopology(n_steps=int(n_steps), horizon=float(horizon))


@dataclass(frozen=True)
class TreeTopology:
    """Shape and weights of the binary scenario tree (no payload)."""

    n_steps: int
    horizon: float

    @property
    def dt(self) -> float:
        return self.horizon / self.n_steps

    @property
    def sqrt_dt(self) -> float:
        # weak order-1 surrogate: the two branch increments are +-sqrt(dt)
        return math.sqrt(self.dt)

    @property
    def n_levels(self) -> int:
        return self.n_steps + 1

    @property
    def n_nodes(self) -> int:
        return 2 ** (self.n_steps + 1) - 1

    @property
    def n_leaves(self) -> int:
        return 2**self.n_steps

    def level_size(self, level: int) -> int:
        self._check_level(level)
        return 2**level

    def level_prob(self, level: int) -> float:
        """Probability of each single node at a level (uniform: 2**-level)."""
        self._check_level(level)
        return 2.0 ** (-level)

    def times(self) -> np.ndarray:
        """Grid times t_0..t_{N_t}."""
        return np.linspace(0.0, self.horizon, self.n_steps + 1)

    # -- flat heap numbering ------------------------------------------------
    # node i lives at level depth(i) with in-level index i + 1 - 2**depth(i)

    def depth(self, node: int) -> int:
        self._check_node(node)
        return (node + 1).bit_length() - 1

    def prob(self, node: int) -> float:
        return 2.0 ** (-self.depth(node))

    def parent(self, node: int) -> int:
        self._check_node(node)
        if node == 0:
            raise ValueError("root node has no parent")
        return (node - 1) // 2

    def children(self, node: int) -> tuple[int, int]:
        self._check_node(node)
        if self.depth(node) == self.n_steps:
            raise ValueError(f"node {node} is a leaf")
        return 2 * node + 1, 2 * node + 2

    def node_id(self, level: int, index: int) -> int:
        self._check_level(level)
        if not 0 <= index < 2**level:
            raise ValueError(f"index {index} out of range at level {level}")
        return 2**level - 1 + index

    def _check_level(self, level: int) -> None:
        if not 0 <= level <= self.n_steps:
            raise ValueError(f"level {level} outside 0..{self.n_steps}")

    def _check_node(self, node: int) -> None:
        if not 0 <= node < self.n_nodes:
            raise ValueError(f"node {node} outside 0..{self.n_nodes - 1}")


@dataclass
class AdaptedField:
    """One spatial array per tree node; adaptedness is structural.

    data[n] has shape (2**n, n_x).  State-like fields carry N_t+1 levels,
    source-like fields (and martingale components) carry N_t levels.
    """

    tree: TreeTopology
    data: list[np.ndarray] = field(repr=False)

    def __post_init__(self) -> None:
        if not self.data:
            raise ValueError("AdaptedField needs at least one level")
        if len(self.data) > self.tree.n_levels:
            raise ValueError(
                f"{len(self.data)} levels exceed tree depth {self.tree.n_levels}"
            )
        n_x = np.asarray(self.data[0]).shape[-1]
        coerced = []
        for n, arr in enumerate(self.data):
            a = np.array(arr, dtype=float, copy=True)
            if a.ndim == 1:
                a = a[np.newaxis, :]
            if a.shape != (2**n, n_x):
                raise ValueError(
                    f"level {n}: expected shape {(2 ** n, n_x)}, got {a.shape}"
                )
            coerced.append(a)
        self.data = coerced

    # -- constructors -------------------------------------------------------

    @classmethod
    def zeros(cls, tree: TreeTopology, n_x: int, n_levels: int | None = None) -> "AdaptedField":
        m = tree.n_levels if n_levels is None else n_levels
        return cls(tree, [np.zeros((2**n, n_x)) for n in range(m)])

    @classmethod
    def deterministic(cls, tree: TreeTopology, values: np.ndarray) -> "AdaptedField":
        """Broadcast one array per level (values[n] identical on all level-n nodes)."""
        values = np.atleast_2d(np.asarray(values, dtype=float))
        return cls(
            tree,
            [np.broadcast_to(values[n], (2**n, values.shape[1])).copy() for n in range(values.shape[0])],
        )

    # -- basic access -------------------------------------------------------

    @property
    def n_levels(self) -> int:
        return len(self.data)

    @property
    def n_x(self) -> int:
        return self.data[0].shape[1]

    def level(self, n: int) -> np.ndarray:
        return self.data[n]

    def node_value(self, node: int) -> np.ndarray:
        """Spatial array at a flat heap node id."""
        n = self.tree.depth(node)
        return self.data[n][node + 1 - 2**n]

    def copy(self) -> "AdaptedField":
        return AdaptedField(self.tree, [a.copy() for a in self.data])

    # small arithmetic surface used by the damped fixed-point loops

    def _binary(self, other: "AdaptedField", op) -> "AdaptedField":
        if other.n_levels != self.n_levels:
            raise ValueError("level count mismatch")
        return AdaptedField(self.tree, [op(a, b) for a, b in zip(self.data, other.data)])

    def __add__(self, other: "AdaptedField") -> "AdaptedField":
        return self._binary(other, np.add)

    def __sub__(self, other: "AdaptedField") -> "AdaptedField":
        return self._binary(other, np.subtract)

    def __mul__(self, scalar: float) -> "AdaptedField":
        return AdaptedField(self.tree, [scalar * a for a in self.data])

    __rmul__ = __mul__


def expectation_at(f: AdaptedField, level: int) -> np.ndarray:
    """E[f(t_level)] as a spatial array: probability-weighted node sum (uniform 2**-level)."""
    if not 0 <= level < f.n_levels:
        raise ValueError(f"level {level} outside stored range 0..{f.n_levels - 1}")
    return f.data[level].mean(axis=0)


def conditional_average(level_values: np.ndarray) -> np.ndarray:
    """One-step conditional expectation: average sibling pairs of a level array."""
    if level_values.shape[0] % 2 != 0:
        raise ValueError("level must have an even node count")
    return 0.5 * (level_values[0::2] + level_values[1::2])


def martingale_difference(child_plus: np.ndarray, child_minus: np.ndarray, dt: float) -> np.ndarray:
    """Z = (f(up child) - f(down child)) / (2 sqrt(dt)).

    This is the exact discrete analogue of the diffusion coefficient: the
    two-point field child = base +- sqrt(dt) * Z is recovered exactly.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    child_plus = np.asarray(child_plus, dtype=float)
    child_minus = np.asarray(child_minus, dtype=float)
    if child_plus.shape != child_minus.shape:
        raise ValueError("sibling arrays must share a shape")
    return (child_plus - child_minus) / (2.0 * math.sqrt(dt))


def martingale_difference_field(f: AdaptedField) -> AdaptedField:
    """Per-level martingale differences of a state field (levels 0..N_t-1)."""
    tree = f.tree
    out = []
    for n in range(f.n_levels - 1):
        nxt = f.data[n + 1]
        out.append(martingale_difference(nxt[0::2], nxt[1::2], tree.dt))
    return AdaptedField(tree, out)


def inner_product(
    f: AdaptedField,
    g: AdaptedField,
    h: float,
    mask: np.ndarray | None = None,
) -> float:
    """Space-time-probability inner product with left-endpoint time quadrature.

    sum_{n=0}^{N_t-1} dt * sum_nodes 2**-n * sum_j h * f * g, optionally
    restricted by a 0/1 spatial mask.  Summation order is fixed (level by
    level, numpy reductions), so results do not depend on thread count.
    """
    tree = f.tree
    if g.tree != tree:
        raise ValueError("fields live on different trees")
    n_levels = tree.n_steps
    if f.n_levels < n_levels or g.n_levels < n_levels:
        raise ValueError("fields must cover levels 0..N_t-1")
    total = 0.0
    for n in range(n_levels):
        prod = f.data[n] * g.data[n]
        if mask is not None:
            prod = prod * mask
        total += tree.dt * tree.level_prob(n) * h * float(np.sum(prod))
    return total


def norm_sq(f: AdaptedField, h: float, mask: np.ndarray | None = None) -> float:
    return inner_product(f, f, h, mask)


def terminal_inner(tree: TreeTopology, a: np.ndarray, b: np.ndarray, h: float) -> float:
    """E<a, b> over leaf fields: sum_leaves 2**-N_t * h * sum_j a*b."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.shape[0] != tree.n_leaves:
        raise ValueError("leaf arrays must both have shape (n_leaves, n_x)")
    return tree.level_prob(tree.n_steps) * h * float(np.sum(a * b))


def terminal_norm_sq(tree: TreeTopology, a: np.ndarray, h: float) -> float:
    return terminal_inner(tree, a, a, h)


def root_inner(a: np.ndarray, b: np.ndarray, h: float) -> float:
    """<a, b> at the root (probability 1): h-weighted spatial dot."""
    return h * float(np.sum(np.asarray(a, dtype=float) * np.asarray(b, dtype=float)))


# -- flat views for Krylov iterations --------------------------------------


def flatten_source(f: AdaptedField) -> np.ndarray:
    """Concatenate levels 0..N_t-1 into one vector (CG works on these)."""
    n = f.tree.n_steps
    return np.concatenate([f.data[m].ravel() for m in range(n)])


def unflatten_source(tree: TreeTopology, n_x: int, vec: np.ndarray) -> AdaptedField:
    out, pos = [], 0
    for n in range(tree.n_steps):
        size = 2**n * n_x
        out.append(vec[pos : pos + size].reshape(2**n, n_x).copy())
        pos += size
    if pos != vec.size:
        raise ValueError(f"vector length {vec.size} does not match tree/source layout {pos}")
    return AdaptedField(tree, out)


def source_quadrature_weights(
    tree: TreeTopology, n_x: int, h: float, mask: np.ndarray | None = None
) -> np.ndarray:
    """Weight vector w with <f, g>_Q = sum(w * flat(f) * flat(g)) on source layout."""
    parts = []
    base = np.ones(n_x) if mask is None else np.asarray(mask, dtype=float)
    for n in range(tree.n_steps):
        w = tree.dt * tree.level_prob(n) * h * base
        parts.append(np.tile(w, 2**n))
    return np.concatenate(parts)
