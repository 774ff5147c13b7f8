"""Exact two-phase tableau simplex with Bland's rule.

Pivoting is deterministic: the entering column is the lowest-index column with
positive reduced cost, the leaving row is the minimum-ratio row whose basic
column has the lowest index.  Columns are ordered structural, slack,
artificial, so "lowest index" is well defined for any program.
"""

from __future__ import annotations

from fractions import Fraction

from .linalg import ONE, ZERO, to_fraction, to_q
from .model import (
    INFEASIBLE,
    OPTIMAL,
    UNBOUNDED,
    DualWitness,
    FarkasCertificate,
    LinearProgram,
    LPResult,
)


class _StandardForm:
    """``max c.x  s.t.  A x = b, x >= 0`` with ``b >= 0`` plus bookkeeping."""

    def __init__(self, lp: LinearProgram):
        n = lp.variable_count
        self.lp = lp
        self.var_cols: list[tuple[int, ...]] = []
        col = 0
        for j in range(n):
            if lp.lower_bounds[j] is None:
                self.var_cols.append((col, col + 1))
                col += 2
            else:
                self.var_cols.append((col,))
                col += 1
        self.n_struct = col
        shift = {j: to_q(lb) for j, lb in enumerate(lp.lower_bounds) if lb is not None and lb != 0}

        rows = []  # (coef dict over struct cols, rhs, is_le)
        for row, b in lp.equalities:
            rows.append((row, b, False))
        for row, b in lp.inequalities:
            rows.append((row, b, True))
        self.m = m = len(rows)
        self.n_eq = len(lp.equalities)
        n_slack = sum(1 for r in rows if r[2])
        self.slack_col = [None] * m
        self.sigma = [1] * m
        self.a_std: list[dict] = []
        self.b_std = []
        s = self.n_struct
        for i, (row, b, is_le) in enumerate(rows):
            d = {}
            rhs = to_q(b)
            for j, v in row.items():
                v = to_q(v)
                cols = self.var_cols[j]
                d[cols[0]] = v
                if len(cols) == 2:
                    d[cols[1]] = -v
                if j in shift:
                    rhs -= v * shift[j]
            if is_le:
                d[s] = ONE
                self.slack_col[i] = s
                s += 1
            if rhs < 0:
                d = {k: -v for k, v in d.items()}
                rhs = -rhs
                self.sigma[i] = -1
            self.a_std.append(d)
            self.b_std.append(rhs)
        self.n_slack = n_slack
        self.n_real = self.n_struct + n_slack
        c = [ZERO] * self.n_real
        for j, v in lp.objective.items():
            v = to_q(v)
            cols = self.var_cols[j]
            c[cols[0]] = v
            if len(cols) == 2:
                c[cols[1]] = -v
        self.c = c
        self.shift = shift


def solve_simplex(lp: LinearProgram) -> LPResult:
    sf = _StandardForm(lp)
    m = sf.m
    # initial basis: slack where its coefficient is +1, artificial otherwise
    art_rows = [i for i in range(m) if sf.slack_col[i] is None or sf.sigma[i] < 0]
    n_art = len(art_rows)
    width = sf.n_real + n_art
    T = []
    basis = [0] * m
    init_col = [0] * m
    art_col = {}
    for k, i in enumerate(art_rows):
        art_col[i] = sf.n_real + k
    for i in range(m):
        row = [ZERO] * (width + 1)
        for j, v in sf.a_std[i].items():
            row[j] = v
        if i in art_col:
            row[art_col[i]] = ONE
            basis[i] = init_col[i] = art_col[i]
        else:
            basis[i] = init_col[i] = sf.slack_col[i]
        row[width] = sf.b_std[i]
        T.append(row)
    allowed = width  # columns >= allowed may not enter

    # phase 1: maximize -sum(artificials)
    obj = [ZERO] * (width + 1)
    for i in art_rows:
        obj[art_col[i]] = -ONE
    for i in art_rows:  # price out basic artificials
        for j in range(width + 1):
            if T[i][j]:
                obj[j] += T[i][j]
    if n_art:
        status, _ = _iterate(T, obj, basis, width, allowed)
        assert status == OPTIMAL
        phase1 = -obj[width]
        if phase1 < 0:
            # duals of phase 1 give the Farkas multipliers
            y = []
            for i in range(m):
                cj = -ONE if i in art_col else ZERO
                y.append(cj - obj[init_col[i]])
            return LPResult(INFEASIBLE, certificate=_map_multipliers(sf, y, farkas=True), method="simplex")
        # drive remaining artificials out of the basis
        for i in range(m):
            if basis[i] >= sf.n_real:
                for j in range(sf.n_real):
                    if T[i][j]:
                        _pivot(T, obj, basis, i, j, width)
                        break
    allowed = sf.n_real

    # phase 2
    obj = [ZERO] * (width + 1)
    for j in range(sf.n_real):
        obj[j] = sf.c[j]
    for i in range(m):
        cb = sf.c[basis[i]] if basis[i] < sf.n_real else ZERO
        if cb:
            for j in range(width + 1):
                if T[i][j]:
                    obj[j] -= cb * T[i][j]
    status, q = _iterate(T, obj, basis, width, allowed)
    x_std = [ZERO] * sf.n_real
    for i in range(m):
        if basis[i] < sf.n_real:
            x_std[basis[i]] = T[i][width]
    x = _map_primal(sf, x_std)
    if status == UNBOUNDED:
        d_std = [ZERO] * sf.n_real
        d_std[q] = ONE
        for i in range(m):
            if basis[i] < sf.n_real:
                d_std[basis[i]] = -T[i][q]
        ray = tuple(to_fraction(v) for v in _map_direction(sf, d_std))
        return LPResult(UNBOUNDED, primal=x, ray=ray, method="simplex")
    y = [-obj[init_col[i]] for i in range(m)]
    value = sum((Fraction(v) * x[j] for j, v in lp.objective.items()), Fraction(0))
    dual = _map_multipliers(sf, y, farkas=False)
    return LPResult(OPTIMAL, primal=x, objective_value=value, dual=dual, method="simplex")


def _iterate(T, obj, basis, width, allowed) -> tuple[str, int]:
    m = len(T)
    while True:
        q = -1
        for j in range(allowed):
            if obj[j] > 0:
                q = j
                break
        if q < 0:
            return OPTIMAL, -1
        r = -1
        best = None
        for i in range(m):
            a = T[i][q]
            if a > 0:
                ratio = T[i][width] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[r]):
                    best, r = ratio, i
        if r < 0:
            return UNBOUNDED, q
        _pivot(T, obj, basis, r, q, width)


def _pivot(T, obj, basis, r, q, width):
    prow = T[r]
    piv = prow[q]
    if piv != ONE:
        inv = ONE / piv
        for j in range(width + 1):
            if prow[j]:
                prow[j] = prow[j] * inv
    nz = [j for j in range(width + 1) if prow[j]]
    for i, row in enumerate(T):
        if i == r:
            continue
        f = row[q]
        if f:
            for j in nz:
                row[j] = row[j] - f * prow[j]
    f = obj[q]
    if f:
        for j in nz:
            obj[j] = obj[j] - f * prow[j]
    basis[r] = q


def _map_primal(sf: _StandardForm, x_std) -> tuple:
    out = []
    for j, cols in enumerate(sf.var_cols):
        v = x_std[cols[0]]
        if len(cols) == 2:
            v = v - x_std[cols[1]]
        v = v + sf.shift.get(j, ZERO)
        out.append(to_fraction(v))
    return tuple(out)


def _map_direction(sf: _StandardForm, d_std) -> list:
    out = []
    for cols in sf.var_cols:
        v = d_std[cols[0]]
        if len(cols) == 2:
            v = v - d_std[cols[1]]
        out.append(v)
    return out


def _map_multipliers(sf: _StandardForm, y, farkas: bool):
    """Translate standard-form row duals into multipliers on the original rows."""
    lp = sf.lp
    lam = [to_fraction(y[i] * sf.sigma[i]) for i in range(sf.m)]
    eq = tuple(lam[: sf.n_eq])
    le = tuple(lam[sf.n_eq:])
    g = [Fraction(0)] * lp.variable_count
    for (row, _), l in zip(lp.equalities + lp.inequalities, lam):
        if l:
            for j, v in row.items():
                g[j] += l * v
    bounds = []
    for j, lb in enumerate(lp.lower_bounds):
        if lb is None:
            bounds.append(Fraction(0))
        elif farkas:
            bounds.append(g[j])
        else:
            bounds.append(g[j] - Fraction(lp.objective.get(j, 0)))
    if farkas:
        return FarkasCertificate(eq, le, tuple(bounds))
    return DualWitness(eq, le, tuple(bounds))
