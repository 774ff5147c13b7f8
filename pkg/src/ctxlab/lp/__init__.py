"""Linear programming with exact rational answers and checkable certificates.

``solve`` returns an :class:`LPResult` whose witness has already been
re-verified against every constraint:

* rational mode: exact primal, a dual witness matching the objective value,
  a Farkas certificate on infeasibility, a ray on unboundedness;
* float mode: HiGHS values checked at residual 1e-9.  Infeasible and unbounded
  outcomes are re-derived in rational mode so they still carry certificates.

The rational path first asks HiGHS for an optimal basis and re-solves that
basis exactly; when the basis does not verify (or HiGHS is unavailable) the
exact Bland-rule simplex runs from scratch.
"""

from __future__ import annotations

from .crossover import HAVE_HIGHS, FloatSession, float_primal, solve_crossover, solve_float
from .model import (
    FLOAT_TOL,
    INFEASIBLE,
    OPTIMAL,
    UNBOUNDED,
    DualWitness,
    FarkasCertificate,
    LinearProgram,
    LPError,
    LPResult,
    objective_value,
    verify_dual,
    verify_farkas,
    verify_primal,
    verify_ray,
    verify_result,
)
from .simplex import solve_simplex

__all__ = [
    "FLOAT_TOL", "FloatSession", "INFEASIBLE", "OPTIMAL", "UNBOUNDED", "DualWitness", "FarkasCertificate",
    "LinearProgram", "LPError", "LPResult", "LPVerificationError", "feasibility", "float_primal",
    "objective_value", "solve", "verify_dual", "verify_farkas", "verify_primal", "verify_ray",
    "verify_result",
]


class LPVerificationError(ArithmeticError):
    """A solver produced a witness that failed independent re-verification."""


def _check(lp: LinearProgram, res: LPResult, tol: float = 0.0) -> LPResult:
    if res.status == OPTIMAL and not tol and res.dual is None:
        raise LPVerificationError("optimal result without dual witness")
    if res.status == INFEASIBLE and res.certificate is None:
        raise LPVerificationError("infeasible result without certificate")
    if not verify_result(lp, res, tol):
        raise LPVerificationError(f"{res.method} result failed verification ({res.status})")
    return res


def solve(lp: LinearProgram, mode: str = "rational", method: str = "auto") -> LPResult:
    """Maximize ``lp.objective``; ``method`` is ``auto``, ``simplex`` or ``crossover``."""
    if mode not in ("rational", "float"):
        raise LPError(f"unknown mode {mode!r}")
    if method not in ("auto", "simplex", "crossover"):
        raise LPError(f"unknown method {method!r}")
    if mode == "float":
        if not HAVE_HIGHS:  # pragma: no cover
            return solve(lp, "rational", "simplex")
        res = solve_float(lp)
        if res.status == OPTIMAL:
            return _check(lp, res, FLOAT_TOL)
        return solve(lp, "rational", method)
    if method != "simplex" and HAVE_HIGHS:
        res = solve_crossover(lp)
        if res is not None:
            return _check(lp, res)
        if method == "crossover":
            raise LPVerificationError("HiGHS basis could not be certified exactly")
    return _check(lp, solve_simplex(lp))


def feasibility(lp: LinearProgram, mode: str = "rational", method: str = "auto") -> LPResult:
    """Solve with a zero objective; ``OPTIMAL`` means feasible."""
    return solve(lp.with_objective(None), mode, method)
