"""Linear programs, results, and solver-independent verification.

Programs are always *maximization* problems::

    max  c.x
    s.t. a_e . x == b_e          (equalities)
         a_i . x <= b_i          (inequalities)
         x_j >= l_j              (only for variables with a lower bound)

Certificates are stated against exactly this form and verified here with
plain ``Fraction`` arithmetic, independently of whichever path produced them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

FLOAT_TOL = 1e-9

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


class LPError(ValueError):
    """Malformed program (dimension mismatch, bad index)."""


def _num(v, mode="rational"):
    if mode == "float":
        return float(v)
    if isinstance(v, float):
        return Fraction(v)
    if isinstance(v, Fraction):
        return v
    return Fraction(v)


def _row(row, n: int) -> dict:
    if isinstance(row, Mapping):
        out = {}
        for j, v in row.items():
            j = int(j)
            if not 0 <= j < n:
                raise LPError(f"column index {j} out of range for {n} variables")
            if v:
                out[j] = v
        return out
    row = list(row)
    if len(row) != n:
        raise LPError(f"row has length {len(row)}, expected {n}")
    return {j: v for j, v in enumerate(row) if v}


class LinearProgram:
    """Maximization LP with sparse rows; rows may be added incrementally."""

    def __init__(self, variable_count: int, objective=None, equalities=(), inequalities=(),
                 lower_bounds=None):
        if variable_count < 0:
            raise LPError("variable_count must be nonnegative")
        self.variable_count = n = variable_count
        self.objective = _row(objective, n) if objective is not None else {}
        self.equalities: list[tuple[dict, object]] = []
        self.inequalities: list[tuple[dict, object]] = []
        if lower_bounds is None:
            self.lower_bounds = [None] * n
        else:
            lb = list(lower_bounds)
            if len(lb) != n:
                raise LPError("lower_bounds must have one entry per variable")
            self.lower_bounds = lb
        for row, rhs in equalities:
            self.add_equality(row, rhs)
        for row, rhs in inequalities:
            self.add_inequality(row, rhs)

    def add_equality(self, row, rhs) -> int:
        self.equalities.append((_row(row, self.variable_count), rhs))
        return len(self.equalities) - 1

    def add_inequality(self, row, rhs) -> int:
        self.inequalities.append((_row(row, self.variable_count), rhs))
        return len(self.inequalities) - 1

    def copy(self) -> "LinearProgram":
        out = LinearProgram(self.variable_count, dict(self.objective), lower_bounds=list(self.lower_bounds))
        out.equalities = [(dict(r), b) for r, b in self.equalities]
        out.inequalities = [(dict(r), b) for r, b in self.inequalities]
        return out

    def with_objective(self, objective) -> "LinearProgram":
        out = self.copy()
        out.objective = _row(objective, self.variable_count) if objective is not None else {}
        return out

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.equalities) + len(self.inequalities), self.variable_count

    def __repr__(self):
        m, n = self.shape
        return f"LinearProgram(vars={n}, eq={len(self.equalities)}, le={len(self.inequalities)})"


@dataclass(frozen=True)
class FarkasCertificate:
    """Multipliers proving infeasibility: combining the constraints gives ``0 <= negative``.

    ``inequalities`` and ``bounds`` multipliers are nonnegative; ``equalities``
    are free.  ``bounds[j]`` multiplies ``-x_j <= -l_j`` (zero for free variables).
    """

    equalities: tuple
    inequalities: tuple
    bounds: tuple

    def verify(self, lp: LinearProgram, tol: float = 0.0) -> bool:
        return verify_farkas(lp, self, tol)


@dataclass(frozen=True)
class DualWitness:
    """Dual solution in the same shape as a Farkas certificate; bounds carry ``z = g - c``."""

    equalities: tuple
    inequalities: tuple
    bounds: tuple

    def verify(self, lp: LinearProgram, value, tol: float = 0.0) -> bool:
        return verify_dual(lp, self, value, tol)


@dataclass(frozen=True)
class LPResult:
    status: str
    primal: tuple | None = None
    objective_value: object = None
    certificate: FarkasCertificate | None = None
    dual: DualWitness | None = None
    ray: tuple | None = None
    method: str = field(default="", compare=False)

    @property
    def feasible(self) -> bool:
        return self.status in (OPTIMAL, UNBOUNDED)


# --- verification -----------------------------------------------------------

def _dot(row: dict, x) -> object:
    return sum((v * x[j] for j, v in row.items()), Fraction(0))


def _le(a, b, tol):
    return a <= b + tol if tol else a <= b


def _eq(a, b, tol):
    return abs(a - b) <= tol if tol else a == b


def verify_primal(lp: LinearProgram, x, tol: float = 0.0) -> bool:
    if x is None or len(x) != lp.variable_count:
        return False
    if tol:
        x = [float(v) for v in x]
    for row, b in lp.equalities:
        if not _eq(_dot(row, x), b, tol):
            return False
    for row, b in lp.inequalities:
        if not _le(_dot(row, x), b, tol):
            return False
    for j, lb in enumerate(lp.lower_bounds):
        if lb is not None and not _le(lb, x[j], tol):
            return False
    return True


def _combination(lp: LinearProgram, eq_mult, le_mult) -> list:
    g = [Fraction(0)] * lp.variable_count
    for (row, _), lam in zip(lp.equalities, eq_mult):
        if lam:
            for j, v in row.items():
                g[j] += lam * v
    for (row, _), lam in zip(lp.inequalities, le_mult):
        if lam:
            for j, v in row.items():
                g[j] += lam * v
    return g


def _shape_ok(lp, w) -> bool:
    return (len(w.equalities) == len(lp.equalities)
            and len(w.inequalities) == len(lp.inequalities)
            and len(w.bounds) == lp.variable_count)


def verify_farkas(lp: LinearProgram, cert: FarkasCertificate, tol: float = 0.0) -> bool:
    if cert is None or not _shape_ok(lp, cert):
        return False
    if any(not _le(0, lam, tol) for lam in cert.inequalities):
        return False
    g = _combination(lp, cert.equalities, cert.inequalities)
    rhs = sum((lam * b for (_, b), lam in zip(lp.equalities, cert.equalities)), Fraction(0))
    rhs += sum((lam * b for (_, b), lam in zip(lp.inequalities, cert.inequalities)), Fraction(0))
    for j, lb in enumerate(lp.lower_bounds):
        z = cert.bounds[j]
        if lb is None:
            if not _eq(z, 0, tol) or not _eq(g[j], 0, tol):
                return False
        else:
            if not _le(0, z, tol) or not _eq(g[j], z, tol):
                return False
            rhs -= z * lb
    return rhs < -tol if tol else rhs < 0


def verify_dual(lp: LinearProgram, dual: DualWitness, value, tol: float = 0.0) -> bool:
    """Weak-duality witness: every feasible ``x`` has ``c.x <= value``."""
    if dual is None or not _shape_ok(lp, dual):
        return False
    if any(not _le(0, lam, tol) for lam in dual.inequalities):
        return False
    g = _combination(lp, dual.equalities, dual.inequalities)
    bound = sum((lam * b for (_, b), lam in zip(lp.equalities, dual.equalities)), Fraction(0))
    bound += sum((lam * b for (_, b), lam in zip(lp.inequalities, dual.inequalities)), Fraction(0))
    for j, lb in enumerate(lp.lower_bounds):
        c = lp.objective.get(j, 0)
        z = dual.bounds[j]
        if lb is None:
            if not _eq(z, 0, tol) or not _eq(g[j], c, tol):
                return False
        else:
            if not _le(0, z, tol) or not _eq(g[j] - c, z, tol):
                return False
            bound -= z * lb
    return _eq(bound, value, tol)


def verify_ray(lp: LinearProgram, d, tol: float = 0.0) -> bool:
    if d is None or len(d) != lp.variable_count:
        return False
    for row, _ in lp.equalities:
        if not _eq(_dot(row, d), 0, tol):
            return False
    for row, _ in lp.inequalities:
        if not _le(_dot(row, d), 0, tol):
            return False
    for j, lb in enumerate(lp.lower_bounds):
        if lb is not None and not _le(0, d[j], tol):
            return False
    growth = _dot(lp.objective, d)
    return growth > tol


def objective_value(lp: LinearProgram, x):
    return _dot(lp.objective, x)


def verify_result(lp: LinearProgram, res: LPResult, tol: float = 0.0) -> bool:
    if res.status == OPTIMAL:
        ok = verify_primal(lp, res.primal, tol)
        if res.dual is not None:
            ok = ok and verify_dual(lp, res.dual, res.objective_value, tol)
        return ok
    if res.status == INFEASIBLE:
        return res.certificate is None or verify_farkas(lp, res.certificate, tol)
    if res.status == UNBOUNDED:
        return verify_primal(lp, res.primal, tol) and verify_ray(lp, res.ray, tol)
    return False


def dense(row: dict, n: int, zero=Fraction(0)) -> list:
    out = [zero] * n
    for j, v in row.items():
        out[j] = v
    return out


def as_sequence(x) -> Sequence:
    return tuple(x) if x is not None else None
