"""Failure types surfaced by the solvers (and mapped to CLI exit codes)."""

from __future__ import annotations


class ConfigError(ValueError):
    """Bad configuration input; carries file/line when known."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix = f"{path}:" if line is None else f"{path}:{line}:"
        super().__init__(f"{prefix} {message}" if prefix else message)


class SolverFailure(RuntimeError):
    """An iterative solve did not reach its tolerance."""

    def __init__(self, message: str, residual_history: list[float] | None = None):
        self.residual_history = residual_history or []
        super().__init__(message)


class CoercivityViolation(RuntimeError):
    """A sampled Rayleigh quotient of the game operator came out non-positive."""

    def __init__(self, player: int, beta: float, quotient: float):
        self.player = player
        self.beta = beta
        self.quotient = quotient
        super().__init__(
            f"game operator lost coercivity on a sampled direction: player {player} "
            f"contribution {quotient:.3e} <= 0 with beta{player} = {beta}; "
            f"increase beta{player} (or reduce alpha) to restore a dominant penalty"
        )


class CouplingDivergence(RuntimeError):
    """The damped fixed-point iteration for a coupled system failed."""

    def __init__(self, message: str, contraction_estimate: float, damping: float):
        self.contraction_estimate = contraction_estimate
        self.damping = damping
        super().__init__(
            f"{message} (contraction estimate {contraction_estimate:.3g}, "
            f"final damping {damping})"
        )
