"""Desk-scale laboratory for hierarchical control of a stochastic heat equation.

Layers, bottom up: binary scenario tree and adapted fields (tree), interior
Dirichlet grid (grid), problem data (problem), forward/backward sweeps that
are exact algebraic transposes of each other (forward, backward), the
two-follower equilibrium layer (nash), the penalised terminal-control layer
(nullctrl), weight-function diagnostics (carleman), dense brute-force
cross-checks (oracle), and the command line (cli).
"""

from .tree import (
    AdaptedField,
    TreeTopology,
    build_tree,
    expectation_at,
    inner_product,
    martingale_difference,
)
from .grid import SpatialGrid, Subdomain, apply_gradient, apply_laplacian, implicit_step_solve, restrict
from .problem import FollowerPair, LeaderPair, ProblemSpec
from .forward import solve_forward, solve_follower_response, solve_free_drift
from .backward import BackwardPair, duality_check, solve_backward
from .exceptions import ConfigError, CoercivityViolation, CouplingDivergence, SolverFailure

__version__ = "0.1.0"

__all__ = [
    "AdaptedField",
    "TreeTopology",
    "build_tree",
    "expectation_at",
    "inner_product",
    "martingale_difference",
    "SpatialGrid",
    "Subdomain",
    "apply_gradient",
    "apply_laplacian",
    "implicit_step_solve",
    "restrict",
    "FollowerPair",
    "LeaderPair",
    "ProblemSpec",
    "solve_forward",
    "solve_follower_response",
    "solve_free_drift",
    "BackwardPair",
    "duality_check",
    "solve_backward",
    "ConfigError",
    "CoercivityViolation",
    "CouplingDivergence",
    "SolverFailure",
    "__version__",
]
