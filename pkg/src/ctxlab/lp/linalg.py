"""Exact sparse linear algebra over the rationals.

``Q`` is ``gmpy2.mpq`` when gmpy2 is importable (much faster), otherwise
``fractions.Fraction``.  Public results are always converted back to
``Fraction`` by the callers.
"""

from __future__ import annotations

from fractions import Fraction

try:  # pragma: no cover - depends on environment
    from gmpy2 import mpq as Q

    def to_fraction(v) -> Fraction:
        return Fraction(int(v.numerator), int(v.denominator))

    def to_q(v):
        if isinstance(v, Fraction):
            return Q(v.numerator, v.denominator)
        return Q(v)
except ImportError:  # pragma: no cover
    Q = Fraction

    def to_fraction(v) -> Fraction:
        return Fraction(v)

    def to_q(v):
        return Fraction(v)


ZERO = Q(0)
ONE = Q(1)


class SingularMatrix(ArithmeticError):
    pass


def solve_square(rows: list[dict], rhs: list, unknowns: list[int]) -> dict:
    """Solve ``rows . x = rhs`` for the listed unknown columns.

    ``rows`` are sparse ``{column: Q}`` dicts mentioning only ``unknowns``; the
    system must be square and nonsingular.  Elimination picks the sparsest
    remaining row and, inside it, the column touching the fewest rows.
    """
    m = len(rows)
    if m != len(unknowns):
        raise SingularMatrix("system is not square")
    rows = [dict(r) for r in rows]
    rhs = list(rhs)
    col_rows: dict[int, set] = {c: set() for c in unknowns}
    for i, r in enumerate(rows):
        for c in r:
            if c not in col_rows:
                raise SingularMatrix(f"column {c} is not an unknown")
            col_rows[c].add(i)
    remaining = set(range(m))
    order = []  # (row, col) pivots in elimination order
    while remaining:
        i = min(remaining, key=lambda k: (len(rows[k]), k))
        row = rows[i]
        if not row:
            raise SingularMatrix("matrix is singular")
        c = min(row, key=lambda k: (len(col_rows[k]), k))
        piv = row[c]
        remaining.discard(i)
        for k in list(col_rows[c]):
            if k == i or k not in remaining:
                continue
            rk = rows[k]
            f = rk[c] / piv
            for cc, v in row.items():
                nv = rk.get(cc, ZERO) - f * v
                if nv:
                    if cc not in rk:
                        col_rows[cc].add(k)
                    rk[cc] = nv
                else:
                    if cc in rk:
                        del rk[cc]
                        col_rows[cc].discard(k)
            rhs[k] = rhs[k] - f * rhs[i]
        for cc in row:
            col_rows[cc].discard(i)
        order.append((i, c))
    x: dict[int, object] = {}
    for i, c in reversed(order):
        row = rows[i]
        acc = rhs[i]
        for cc, v in row.items():
            if cc != c:
                acc -= v * x[cc]
        x[c] = acc / row[c]
    return x
