"""Pure-Python versions of the compiled kernels.

Same signatures, same visiting order, same tie-breaking; Python integers serve
as bitsets.  Used when the extension is not built or CTXLAB_PURE_PYTHON=1.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


class CliqueCapExceeded(RuntimeError):
    pass


def _rows_to_ints(adj) -> list[int]:
    adj = np.asarray(adj, dtype=np.uint64)
    out = []
    for row in adj:
        v = 0
        for w in range(row.shape[0] - 1, -1, -1):
            v = (v << 64) | int(row[w])
        out.append(v)
    return out


def _bits(m: int):
    while m:
        low = m & -m
        yield low.bit_length() - 1
        m ^= low


def _enumerate(adj, cap: int, leaf):
    nbr = _rows_to_ints(adj)
    n = len(nbr)
    count = 0
    R: list[int] = []

    def rec(P: int, X: int):
        nonlocal count
        if not P and not X:
            count += 1
            if count > cap:
                raise CliqueCapExceeded(f"more than {cap} maximal cliques")
            leaf(R)
            return
        best, u = -1, -1
        for v in _bits(P | X):
            c = (P & nbr[v]).bit_count()
            if c > best:
                best, u = c, v
        for v in _bits(P & ~nbr[u]):
            R.append(v)
            rec(P & nbr[v], X & nbr[v])
            R.pop()
            P &= ~(1 << v)
            X |= 1 << v

    if n:
        rec((1 << n) - 1, 0)
    return count


def enumerate_cliques(adj, cap):
    out = []
    _enumerate(adj, cap, lambda R: out.append(list(R)))
    return out


def _max_weight(adj, weights, cap, conv):
    w = [conv(v) for v in weights]
    state = {"best": None, "clique": []}

    def leaf(R):
        s = sum((w[v] for v in R), conv(0))
        if state["best"] is None or s > state["best"]:
            state["best"] = s
            state["clique"] = list(R)

    count = _enumerate(adj, cap, leaf)
    return count, state["best"], state["clique"]


def max_weight_clique_int(adj, weights, cap):
    return _max_weight(adj, weights, cap, int)


def max_weight_clique_float(adj, weights, cap):
    return _max_weight(adj, weights, cap, float)


def clique_signatures(adj, classes, n_classes, cap):
    cls = [int(c) for c in classes]
    n_classes = max(n_classes, 1)
    index: dict[tuple, int] = {}
    reps: list[list[int]] = []

    def leaf(R):
        h = [0] * n_classes
        for v in R:
            h[cls[v]] += 1
        key = tuple(h)
        if key not in index:
            index[key] = len(index)
            reps.append(list(R))

    count = _enumerate(adj, cap, leaf)
    sig = np.array(list(index), dtype=np.int64).reshape(len(index), n_classes)
    return count, sig, reps


def _matrix(g, Q):
    n = len(g)
    conv = int if np.asarray(g).dtype.kind in "iu" else float
    return n, [conv(v) for v in g], [[conv(Q[i][j]) for j in range(n)] for i in range(n)], conv


def qpb_gray(g, Q):
    n, g, Q, conv = _matrix(g, Q)
    if n > 62:
        raise ValueError("exhaustive minimization supports at most 62 elements")
    d = list(g)
    val = best = conv(0)
    mask = best_mask = 0
    for i in range(1, 1 << n):
        k = (i & -i).bit_length() - 1
        row = Q[k]
        if mask >> k & 1:
            mask &= ~(1 << k)
            val -= d[k]
            for j in range(n):
                d[j] -= row[j]
        else:
            mask |= 1 << k
            val += d[k]
            for j in range(n):
                d[j] += row[j]
        if val < best or (val == best and mask < best_mask):
            best, best_mask = val, mask
    return best, best_mask


def qpb_branch_and_bound(g, Q):
    n, g, Q, conv = _matrix(g, Q)
    if n > 63:
        raise ValueError("branch and bound supports at most 63 elements")
    neg = [[conv(0)] * n for _ in range(n + 1)]
    for t in range(n - 1, -1, -1):
        for k in range(n):
            q = Q[k][t] if k != t else 0
            neg[t][k] = neg[t + 1][k] + (q if q < 0 else 0)
    state = {"best": conv(0), "mask": 0, "have": False}

    def rec(h, t, f2, mask):
        if t == n:
            if not state["have"] or f2 < state["best"] or (f2 == state["best"] and mask < state["mask"]):
                state.update(best=f2, mask=mask, have=True)
            return
        bound = f2
        for k in range(t, n):
            term = h[k] + neg[t][k]
            if term < 0:
                bound += term
        if state["have"] and bound > state["best"]:
            return
        include_first = h[t] < 0
        for side in range(2):
            if (side == 0) == include_first:
                h2 = list(h)
                row = Q[t]
                for k in range(t + 1, n):
                    h2[k] = h[k] + 2 * row[k]
                rec(h2, t + 1, f2 + h[t], mask | (1 << t))
            else:
                rec(h, t + 1, f2, mask)

    rec([2 * v for v in g], 0, conv(0), 0)
    best = state["best"]
    return (best / 2.0 if conv is float else best // 2), state["mask"]
