"""Float-guided exact solving.

HiGHS solves the program in floating point and reports an optimal basis.  The
basis is then re-solved in exact rational arithmetic and accepted only if it is
exactly primal and dual feasible; otherwise the caller falls back to the exact
simplex.  HiGHS only *proposes*; nothing it computes is trusted directly.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .linalg import SingularMatrix, ZERO, solve_square, to_fraction, to_q
from .model import (
    FLOAT_TOL,
    INFEASIBLE,
    OPTIMAL,
    UNBOUNDED,
    DualWitness,
    FarkasCertificate,
    LinearProgram,
    LPResult,
    verify_primal,
)

try:
    import highspy

    HAVE_HIGHS = True
except ImportError:  # pragma: no cover
    highspy = None
    HAVE_HIGHS = False


def _highs_model(lp: LinearProgram, objective=None):
    n = lp.variable_count
    rows = [(r, b, True) for r, b in lp.equalities] + [(r, b, False) for r, b in lp.inequalities]
    m = len(rows)
    inf = highspy.kHighsInf
    model = highspy.HighsLp()
    model.num_col_ = n
    model.num_row_ = m
    obj = lp.objective if objective is None else objective
    cost = np.zeros(n)
    for j, v in obj.items():
        cost[j] = float(v)
    model.col_cost_ = cost
    model.col_lower_ = np.array([-inf if lb is None else float(lb) for lb in lp.lower_bounds], dtype=float)
    model.col_upper_ = np.full(n, inf)
    model.row_lower_ = np.array([float(b) if eq else -inf for _, b, eq in rows], dtype=float)
    model.row_upper_ = np.array([float(b) for _, b, _ in rows], dtype=float)
    cols: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    for i, (r, _, _) in enumerate(rows):
        for j, v in r.items():
            cols[j].append((i, float(v)))
    start = [0]
    index, value = [], []
    for col in cols:
        for i, v in col:
            index.append(i)
            value.append(v)
        start.append(len(index))
    model.a_matrix_.format_ = highspy.MatrixFormat.kColwise
    model.a_matrix_.start_ = np.array(start, dtype=np.int32)
    model.a_matrix_.index_ = np.array(index, dtype=np.int32)
    model.a_matrix_.value_ = np.array(value, dtype=float)
    model.sense_ = highspy.ObjSense.kMaximize
    return model, rows


def _run(model):
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("threads", 1)
    h.setOptionValue("solver", "simplex")
    h.setOptionValue("random_seed", 0)
    h.passModel(model)
    h.run()
    return h


def solve_float(lp: LinearProgram) -> LPResult:
    """Plain floating-point solve; residuals checked at ``FLOAT_TOL``."""
    model, rows = _highs_model(lp)
    h = _run(model)
    st = h.getModelStatus()
    S = highspy.HighsModelStatus
    if st == S.kOptimal:
        sol = h.getSolution()
        x = tuple(float(v) for v in sol.col_value)
        value = math.fsum(float(v) * x[j] for j, v in lp.objective.items())
        duals = list(sol.row_dual)
        n_eq = len(lp.equalities)
        col_dual = list(sol.col_dual)
        dual = DualWitness(
            tuple(duals[:n_eq]), tuple(duals[n_eq:]),
            tuple(0.0 if lb is None else -col_dual[j] for j, lb in enumerate(lp.lower_bounds)),
        )
        if not verify_primal(lp, x, FLOAT_TOL):
            raise ArithmeticError("HiGHS primal fails float residual check")
        return LPResult(OPTIMAL, primal=x, objective_value=value, dual=dual, method="highs")
    if st == S.kInfeasible:
        return LPResult(INFEASIBLE, method="highs")
    if st in (S.kUnbounded, S.kUnboundedOrInfeasible):
        return LPResult(UNBOUNDED, method="highs")
    raise ArithmeticError(f"HiGHS returned {h.modelStatusToString(st)}")


def float_primal(lp: LinearProgram):
    """(status, x) from HiGHS without exact post-processing (used inside row generation)."""
    model, _ = _highs_model(lp)
    h = _run(model)
    st = h.getModelStatus()
    S = highspy.HighsModelStatus
    if st == S.kOptimal:
        return OPTIMAL, np.array(h.getSolution().col_value, dtype=float)
    if st == S.kInfeasible:
        return INFEASIBLE, None
    if st in (S.kUnbounded, S.kUnboundedOrInfeasible):
        return UNBOUNDED, None
    raise ArithmeticError(f"HiGHS returned {h.modelStatusToString(st)}")


class FloatSession:
    """A live HiGHS instance for cutting-plane loops.

    Rows added through :meth:`add_inequality` are appended to the running
    model and the next solve warm-starts from the previous basis.  Only the
    float primal is exposed by :meth:`solve`; :meth:`exact` re-solves the
    current basis in rational arithmetic.
    """

    def __init__(self, lp: LinearProgram):
        self.n = lp.variable_count
        model, _ = _highs_model(lp)
        self.h = highspy.Highs()
        self.h.setOptionValue("output_flag", False)
        self.h.setOptionValue("threads", 1)
        self.h.setOptionValue("solver", "simplex")
        self.h.setOptionValue("random_seed", 0)
        self.h.passModel(model)
        self._pending: list[tuple[dict, object]] = []

    def add_inequality(self, row: dict, rhs) -> None:
        self._pending.append((row, rhs))

    def _flush(self):
        if not self._pending:
            return
        inf = highspy.kHighsInf
        starts, index, value = [], [], []
        for row, _ in self._pending:
            starts.append(len(index))
            for j, v in sorted(row.items()):
                index.append(j)
                value.append(float(v))
        k = len(self._pending)
        self.h.addRows(k, np.full(k, -inf), np.array([float(b) for _, b in self._pending]),
                       len(index), np.array(starts, dtype=np.int32), np.array(index, dtype=np.int32),
                       np.array(value, dtype=float))
        self._pending.clear()

    def solve(self):
        self._flush()
        self.h.run()
        st = self.h.getModelStatus()
        S = highspy.HighsModelStatus
        if st == S.kOptimal:
            return OPTIMAL, np.array(self.h.getSolution().col_value, dtype=float)
        if st == S.kInfeasible:
            return INFEASIBLE, None
        if st in (S.kUnbounded, S.kUnboundedOrInfeasible):
            return UNBOUNDED, None
        return None, None

    def exact(self, lp: LinearProgram):
        """Exact optimum at the session's current basis, or ``None``.

        ``lp`` must hold the same rows in the same order as the session.
        """
        self._flush()
        rows = [(r, b, True) for r, b in lp.equalities] + [(r, b, False) for r, b in lp.inequalities]
        if self.h.getNumRow() != len(rows):
            raise ValueError("session and program are out of sync")
        return _exact_from_basis(lp, rows, self.h.getBasis(), lp.objective)


def solve_crossover(lp: LinearProgram) -> LPResult | None:
    """Exact result from a HiGHS basis, or ``None`` when it does not verify."""
    model, rows = _highs_model(lp)
    h = _run(model)
    S = highspy.HighsModelStatus
    st = h.getModelStatus()
    if st == S.kOptimal:
        return _exact_from_basis(lp, rows, h.getBasis(), lp.objective)
    if st == S.kInfeasible:
        return _exact_infeasibility(lp)
    return None


def _exact_from_basis(lp: LinearProgram, rows, basis, objective):
    B = highspy.HighsBasisStatus
    n = lp.variable_count
    m = len(rows)
    if not basis.valid:
        return None
    col_status = list(basis.col_status)
    row_status = list(basis.row_status)
    basic_cols = [j for j in range(n) if col_status[j] == B.kBasic]
    nonbasic_rows = [i for i in range(m) if row_status[i] != B.kBasic]
    if len(basic_cols) != len(nonbasic_rows):
        return None
    x = [ZERO] * n
    for j in range(n):
        if col_status[j] != B.kBasic:
            lb = lp.lower_bounds[j]
            if col_status[j] == B.kLower and lb is not None:
                x[j] = to_q(lb)
            elif col_status[j] in (B.kZero, B.kNonbasic) and lb is None:
                x[j] = ZERO
            else:
                return None
    qrows = [{j: to_q(v) for j, v in r.items()} for r, _, _ in rows]
    bset = set(basic_cols)
    sys_rows, sys_rhs = [], []
    for i in nonbasic_rows:
        r = qrows[i]
        rhs = to_q(rows[i][1])
        part = {}
        for j, v in r.items():
            if j in bset:
                part[j] = v
            elif x[j]:
                rhs -= v * x[j]
        sys_rows.append(part)
        sys_rhs.append(rhs)
    try:
        xb = solve_square(sys_rows, sys_rhs, basic_cols)
    except SingularMatrix:
        return None
    for j, v in xb.items():
        x[j] = v
    for j in basic_cols:
        lb = lp.lower_bounds[j]
        if lb is not None and x[j] < to_q(lb):
            return None
    for i in range(m):
        if row_status[i] == B.kBasic:
            act = sum((v * x[j] for j, v in qrows[i].items()), ZERO)
            b = to_q(rows[i][1])
            if rows[i][2]:
                if act != b:
                    return None
            elif act > b:
                return None
    # duals: rows of the transposed basis system, one per basic column
    obj = {j: to_q(v) for j, v in objective.items()}
    col_rows: dict[int, dict] = {j: {} for j in range(n)}
    for i in nonbasic_rows:
        for j, v in qrows[i].items():
            col_rows[j][i] = v
    t_rows = [col_rows[j] for j in basic_cols]
    t_rhs = [obj.get(j, ZERO) for j in basic_cols]
    try:
        y = solve_square(t_rows, t_rhs, nonbasic_rows)
    except SingularMatrix:
        return None
    for i in nonbasic_rows:
        if not rows[i][2] and y[i] < 0:
            return None
    z = []
    for j in range(n):
        g = sum((v * y[i] for i, v in col_rows[j].items()), ZERO)
        d = obj.get(j, ZERO) - g  # reduced cost
        lb = lp.lower_bounds[j]
        if lb is None:
            if d != 0:
                return None
            z.append(Fraction(0))
        else:
            if d > 0:
                return None
            z.append(to_fraction(-d))
    n_eq = len(lp.equalities)
    lam = [to_fraction(y.get(i, ZERO)) for i in range(m)]
    primal = tuple(to_fraction(v) for v in x)
    value = sum((Fraction(v) * primal[j] for j, v in lp.objective.items()), Fraction(0))
    dual = DualWitness(tuple(lam[:n_eq]), tuple(lam[n_eq:]), tuple(z))
    return LPResult(OPTIMAL, primal=primal, objective_value=value, dual=dual, method="crossover")


def _exact_infeasibility(lp: LinearProgram):
    """Farkas multipliers from the exact optimum of the elastic program.

    Every row gets nonnegative violation variables and the total violation is
    minimized.  At an optimum with negative value the row duals restricted to
    the original columns are already a Farkas certificate.
    """
    n = lp.variable_count
    extra = 2 * len(lp.equalities) + len(lp.inequalities)
    el = LinearProgram(n + extra, lower_bounds=list(lp.lower_bounds) + [0] * extra)
    obj = {}
    k = n
    for r, b in lp.equalities:
        row = dict(r)
        row[k], row[k + 1] = 1, -1
        obj[k] = obj[k + 1] = -1
        el.add_equality(row, b)
        k += 2
    for r, b in lp.inequalities:
        row = dict(r)
        row[k] = -1
        obj[k] = -1
        el.add_inequality(row, b)
        k += 1
    el.objective = obj
    model, rows = _highs_model(el)
    h = _run(model)
    if h.getModelStatus() != highspy.HighsModelStatus.kOptimal:
        return None
    res = _exact_from_basis(el, rows, h.getBasis(), el.objective)
    if res is None or res.objective_value >= 0:
        return None
    lam_eq, lam_le = res.dual.equalities, res.dual.inequalities
    g = [Fraction(0)] * n
    for (r, _), lam in zip(lp.equalities + lp.inequalities, lam_eq + lam_le):
        if lam:
            for j, v in r.items():
                g[j] += lam * Fraction(v)
    bounds = tuple(Fraction(0) if lb is None else g[j] for j, lb in enumerate(lp.lower_bounds))
    cert = FarkasCertificate(lam_eq, lam_le, bounds)
    if not cert.verify(lp):
        return None
    return LPResult(INFEASIBLE, certificate=cert, method="crossover")
