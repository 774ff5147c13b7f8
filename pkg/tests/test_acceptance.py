"""Acceptance criteria, each computed directly through the library API.

Every criterion records one PASS/FAIL line (shown in the pytest terminal
summary, or printed when this file is run as a script) and then asserts.
Runtime budgets are part of each criterion.
"""

import itertools
import math
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np
import pytest
import sympy

from ctxlab.ce import ce_check, ce_optimize, consistent_optimize, nc_optimize, threshold_search
from ctxlab.probability import gyni_winning_events, power_probability, preset_box, preset_functional
from ctxlab.qm import PairMeasure, mu_eval, qm_optimize, sample_qm_vertex, sorkin_residual
from ctxlab.scenario import COARSE, Outcome, exclusive, exclusivity_graph, power_scenario, preset_scenario

F = Fraction
RESULTS: list[str] = []

pytestmark = pytest.mark.slow


def criterion(number, budget):
    """Run the body, time it, record one line, then assert on the outcome."""

    def wrap(fn):
        def test():
            t0 = time.perf_counter()
            try:
                ok, detail = fn()
            except Exception as exc:  # recorded as a failure, then re-raised
                ok, detail = False, f"{type(exc).__name__}: {exc}"
                RESULTS.append(_line(number, ok, detail, time.perf_counter() - t0, budget))
                raise
            dt = time.perf_counter() - t0
            within = dt <= budget
            RESULTS.append(_line(number, ok and within, detail, dt, budget))
            assert ok, detail
            assert within, f"took {dt:.1f} s, budget {budget} s"

        test.__name__ = fn.__name__
        test.__doc__ = fn.__doc__
        return test

    return wrap


def _line(number, ok, detail, seconds, budget):
    return f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}  [{seconds:.1f} s / {budget} s]"


@criterion(1, budget=5)
def test_c01_pentagon_ladder():
    s = preset_scenario("pentagon")
    f = preset_functional("kcbs", s)
    nc, ce1, cons = nc_optimize(s, f).value, ce_optimize(s, f).value, consistent_optimize(s, f).value
    ok = nc == 2 and ce1 == F(5, 2) and cons == F(5, 2)
    return ok, f"kcbs: nc={nc} ce1={ce1} consistent={cons}"


def _pentagram(s):
    n = s.element_count
    A = [s.cell((i, (i + 1) % 5), "10") for i in range(5)]
    return [Outcome(tuple(a * n + b for a in A[i].members for b in A[(2 * i) % 5].members)) for i in range(5)]


@criterion(2, budget=120)
def test_c02_sqrt5_threshold():
    s = preset_scenario("pentagon")
    r = threshold_search("uniform-cycle", s, copies=2, tol=F(1, 10**6))
    value_ok = abs(float(r.value) - math.sqrt(5)) <= 1e-4
    # the exact boundary table: the pentagram clique sums to exactly one
    p = preset_box("uniform_cycle", s, 1 / sympy.sqrt(5))
    p2 = power_probability(p, 2)
    star = _pentagram(s)
    g = exclusivity_graph(power_scenario(s, 2), COARSE)
    star_is_clique = g.is_clique([g.index(o) for o in star])
    star_sum = sympy.simplify(sum(p2.values[o] for o in star))
    rep = ce_check(s, p, copies=2)
    boundary_ok = rep.holds and star_is_clique and star_sum == 1 and sympy.simplify(rep.worst_sum - 1) == 0
    above = ce_check(s, preset_box("uniform_cycle", s, F(4573, 10000)), copies=2)
    ok = value_ok and boundary_ok and not above.holds
    return ok, (f"KCBS*={float(r.value):.7f} (sqrt5={math.sqrt(5):.7f}); 1/sqrt5 holds with pentagram sum "
                f"{star_sum}; 0.4573 fails with {above.worst_sum}")


@criterion(3, budget=600)
def test_c03_isotropic_threshold():
    s = preset_scenario("chsh")
    r = threshold_search("isotropic", s, copies=2, tol=F(1, 10**5))
    S = float(r.value)
    hard = 2 * math.sqrt(2) - 1e-6 <= S <= 2.8840
    soft = abs(S - 2.883) <= 0.005
    pr = preset_box("pr", s)
    one, two = ce_check(s, pr), ce_check(s, pr, copies=2)
    ok = hard and one.holds and not two.holds
    return ok, (f"S*={S:.7f} in [2sqrt2, 2.8840]={hard}; |S*-2.883|<=0.005 {'pass' if soft else 'WARN'}; "
                f"PR k=1 holds={one.holds}, k=2 holds={two.holds}")


@criterion(4, budget=60)
def test_c04_gyni():
    s = preset_scenario("gyni3")
    wins = gyni_winning_events(s)
    pairwise = all(exclusive(s, a, b, COARSE) for a, b in itertools.combinations(wins, 2))
    f = preset_functional("gyni", s)
    ce1, nc = ce_optimize(s, f).value, nc_optimize(s, f).value
    ok = len(wins) == 4 and pairwise and ce1 == nc == F(1, 4)
    return ok, f"4 winning events pairwise exclusive={pairwise}; ce1={ce1} nc={nc}"


@criterion(5, budget=30)
def test_c05_chsh_anchors():
    s = preset_scenario("chsh")
    f = preset_functional("chsh", s)
    nc, cons, ce1 = nc_optimize(s, f).value, consistent_optimize(s, f).value, ce_optimize(s, f).value
    return (nc == 2 and cons == 4 and ce1 == 4), f"chsh: nc={nc} consistent={cons} ce1={ce1}"


@criterion(6, budget=600)
def test_c06_quantum_vertices_obey_ce():
    details, ok = [], True
    for name in ("chsh", "pentagon"):
        s = preset_scenario(name)
        bad = 0
        for seed in range(200):
            p, _ = sample_qm_vertex(s, seed)
            assert all(isinstance(v, (int, F)) for v in p.values.values())
            if not ce_check(s, p).holds:
                bad += 1
        ok &= bad == 0
        details.append(f"{name} {200 - bad}/200")
    return ok, "quantum-measure vertices pass single-copy CE: " + ", ".join(details)


def _lemma_case(rng):
    n = int(rng.integers(2, 11))
    sing = [F(int(v), 3) for v in rng.integers(-15, 16, n)]
    q = {(i, j): F(int(rng.integers(-15, 16)), 4) for i in range(n) for j in range(i + 1, n)}
    X = sorted(int(i) for i in rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False))
    k = int(rng.integers(1, len(X) + 1))
    cut = sorted(int(c) for c in rng.choice(range(1, len(X)), size=k - 1, replace=False)) if k > 1 else []
    blocks = [X[a:b] for a, b in zip([0] + cut, cut + [len(X)])]
    # enforce pairwise additivity: cross interference of each block pair sums to zero
    for A, B in itertools.combinations(blocks, 2):
        cross = [(min(a, b), max(a, b)) for a in A for b in B]
        q[cross[-1]] -= sum(q[c] for c in cross)
    pair = tuple(sing[i] + sing[j] + q[(i, j)] for i in range(n) for j in range(i + 1, n))
    return PairMeasure(tuple(sing), pair), X, blocks


@criterion(7, budget=120)
def test_c07_pairwise_implies_joint():
    rng = np.random.default_rng(20260101)
    bad = 0
    for _ in range(500):
        pm, X, blocks = _lemma_case(rng)
        assert all(mu_eval(pm, A) + mu_eval(pm, B) == mu_eval(pm, A + B)
                   for A, B in itertools.combinations(blocks, 2))
        if mu_eval(pm, X) != sum((mu_eval(pm, A) for A in blocks), F(0)):
            bad += 1
    return bad == 0, f"{500 - bad}/500 pairwise-additive partitions jointly additive"


def _triples(n):
    for labels in itertools.product(range(4), repeat=n):
        m = [0, 0, 0, 0]
        for i, l in enumerate(labels):
            m[l] |= 1 << i
        yield m[1], m[2], m[3]


def _sorkin_projector(n):
    """Exact orthogonal projector onto tables with mu(empty)=0 obeying the rule on every disjoint triple."""
    N = 1 << n
    rows, seen = [[1] + [0] * (N - 1)], set()
    for a, b, c in _triples(n):
        key = tuple(sorted((a, b, c)))
        if key in seen:
            continue
        seen.add(key)
        r = [0] * N
        for sign, m in ((1, a), (1, b), (1, c), (-1, a | b), (-1, b | c), (-1, a | c), (1, a | b | c)):
            r[m] += sign
        if any(r):
            rows.append(r)
    basis = sympy.Matrix(rows).nullspace()
    B = sympy.Matrix.hstack(*basis)
    return B * (B.T * B).inv() * B.T, len(basis)


@criterion(8, budget=120)
def test_c08_sorkin_extension():
    rng = np.random.default_rng(8)
    checked = nonzero = 0
    for n in range(1, 7):
        for _ in range(3):
            sing = tuple(F(int(v), int(d)) for v, d in zip(rng.integers(-9, 10, n), rng.integers(1, 7, n)))
            m = n * (n - 1) // 2
            pair = tuple(F(int(v), int(d)) for v, d in zip(rng.integers(-9, 10, m), rng.integers(1, 7, m)))
            table = [mu_eval(PairMeasure(sing, pair), k) for k in range(1 << n)]
            for a, b, c in _triples(n):
                checked += 1
                nonzero += sorkin_residual(table, a, b, c) != 0
    projectors = {n: _sorkin_projector(n) for n in range(1, 7)}
    dims_ok = all(d == n + n * (n - 1) // 2 for n, (_, d) in projectors.items())
    mismatch = 0
    for t in range(100):
        n = 1 + t % 6
        P, _ = projectors[n]
        raw = sympy.Matrix([sympy.Rational(int(v), int(d))
                            for v, d in zip(rng.integers(-9, 10, 1 << n), rng.integers(1, 5, 1 << n))])
        table = [F(int(x.p), int(x.q)) for x in P * raw]
        pm = PairMeasure(tuple(table[1 << i] for i in range(n)),
                         tuple(table[(1 << i) | (1 << j)] for i in range(n) for j in range(i + 1, n)))
        mismatch += any(mu_eval(pm, k) != table[k] for k in range(1 << n))
    ok = nonzero == 0 and dims_ok and mismatch == 0
    return ok, (f"(a) {checked - nonzero}/{checked} disjoint triples with zero residual; "
                f"(b) {100 - mismatch}/100 projected tables equal their pair extension")


def _all_subsets_nonnegative(pm):
    """Every subset value, computed from scratch in scaled integer arithmetic."""
    n = pm.n
    L = math.lcm(*(F(v).denominator for v in pm.sing + pm.pair))
    sing = np.array([int(F(v) * L) for v in pm.sing], dtype=object)
    Q = np.zeros((n, n), dtype=object)
    for i, j in itertools.combinations(range(n), 2):
        Q[i, j] = Q[j, i] = int(F(pm.pair_value(i, j)) * L) - sing[i] - sing[j]
    B = ((np.arange(1 << n)[:, None] >> np.arange(n)) & 1).astype(object)
    mu = B.dot(sing) + (B.dot(Q) * B).sum(axis=1) // 2
    return bool((mu >= 0).all()) and mu[-1] == L, 1 << n


@criterion(9, budget=900)
def test_c09_nesting():
    ok, parts = True, []
    for name, fname in (("chsh", "chsh"), ("pentagon", "kcbs"), ("gyni3", "gyni")):
        s = preset_scenario(name)
        f = preset_functional(fname, s)
        nc, ce1, cons = nc_optimize(s, f).value, ce_optimize(s, f).value, consistent_optimize(s, f).value
        if s.element_count <= 20:
            q = qm_optimize(s, f)
            verified, subsets = _all_subsets_nonnegative(q.witness)
            marg = all(mu_eval(q.witness, o) == q.probability.values[o] for o in s.fine_outcomes())
            ok &= nc <= q.value <= ce1 <= cons and verified and marg
            parts.append(f"{name}: {nc} <= {q.value} <= {ce1} <= {cons}, witness ok on {subsets} subsets")
        else:
            # 2^64 subsets is out of reach; nc = ce1 pins qm between them anyway
            ok &= nc <= ce1 <= cons and nc == ce1
            parts.append(f"{name}: {nc} = qm = {ce1} <= {cons}")
    return ok, "; ".join(parts)


@criterion(10, budget=900)
def test_c10_report_is_deterministic():
    cmd = [sys.executable, "-m", "ctxlab.cli", "bounds-report", "--json"]
    a = subprocess.run(cmd, capture_output=True, check=False)
    b = subprocess.run(cmd, capture_output=True, check=False)
    same = a.stdout == b.stdout and len(a.stdout) > 0
    return same and a.returncode == 0, (f"two bounds-report --json runs byte-identical={same} "
                                        f"({len(a.stdout)} bytes), exit codes {a.returncode}/{b.returncode}")


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_c"):
            try:
                fn()
            except AssertionError:
                pass
    print("\n".join(RESULTS))
