"""Conjugate-gradient iteration over an injected inner product.

Both the follower game and the penalised terminal solve run CG on weighted
L2 spaces; the metric comes in as a dot callable so one loop serves both.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .exceptions import SolverFailure


@dataclass
class CGResult:
    x: np.ndarray
    iterations: int
    residuals: list[float] = field(repr=False)
    converged: bool = True


def conjugate_gradient(
    apply_op: Callable[[np.ndarray], np.ndarray],
    rhs: np.ndarray,
    dot: Callable[[np.ndarray, np.ndarray], float],
    tol: float,
    max_iters: int,
    x0: np.ndarray | None = None,
    label: str = "cg",
) -> CGResult:
    """Solve A x = rhs for symmetric positive definite A in the given metric.

    Convergence is on the relative residual sqrt(<r,r>)/sqrt(<rhs,rhs>).
    Raises SolverFailure when max_iters is exhausted or curvature turns
    non-positive (A not positive definite in this metric).
    """
    rhs_norm = np.sqrt(dot(rhs, rhs))
    if rhs_norm == 0.0:
        return CGResult(np.zeros_like(rhs), 0, [0.0])

    if x0 is None:
        x = np.zeros_like(rhs)
        r = rhs.copy()
    else:
        x = x0.copy()
        r = rhs - apply_op(x)
    p = r.copy()
    rr = dot(r, r)
    history = [np.sqrt(rr) / rhs_norm]
    if history[-1] <= tol:
        return CGResult(x, 0, history)

    for k in range(1, max_iters + 1):
        ap = apply_op(p)
        pap = dot(p, ap)
        if pap <= 0.0:
            raise SolverFailure(
                f"{label}: non-positive curvature {pap:.3e} at iteration {k}; "
                "operator is not positive definite in this metric",
                history,
            )
        a = rr / pap
        x = x + a * p
        r = r - a * ap
        rr_new = dot(r, r)
        history.append(np.sqrt(rr_new) / rhs_norm)
        if history[-1] <= tol:
            return CGResult(x, k, history)
        p = r + (rr_new / rr) * p
        rr = rr_new

    raise SolverFailure(
        f"{label}: no convergence to {tol:.1e} within {max_iters} iterations "
        f"(last relative residual {history[-1]:.3e})",
        history,
    )
