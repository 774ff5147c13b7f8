"""Compiled vs pure-Python kernels on the workloads the library actually runs.

    python benchmarks/bench_kernels.py [--repeat 3] [--quick]

Each case runs on both backends, checks that the results are identical and
prints the best-of-N wall time and the speedup.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from ctxlab import kernels
from ctxlab.probability import power_probability, preset_box
from ctxlab.scenario import exclusivity_graph, power_scenario, preset_scenario


def _best(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _weights(s, copies, box):
    p = power_probability(preset_box(box, s), copies)
    g = exclusivity_graph(power_scenario(s, copies))
    vals = [p.values[v] for v in g.vertices]
    L = int(np.lcm.reduce([v.denominator for v in vals]))
    return g, np.array([int(v * L) for v in vals], dtype=np.int64)


def cases(quick: bool):
    cap = 10**9
    pent = preset_scenario("pentagon")
    chsh = preset_scenario("chsh")
    g5, w5 = _weights(pent, 2, "uniform_cycle(2/5)")
    yield "pentagon x2 max-weight clique", lambda k: k.max_weight_clique_int(g5.adjacency_words(), w5, cap)
    yield "pentagon x2 enumerate cliques", lambda k: len(k.enumerate_cliques(g5.adjacency_words(), cap))
    if not quick:
        gc, wc = _weights(chsh, 2, "isotropic(7/10)")
        yield "chsh x2 max-weight clique (10.5M cliques)", \
            lambda k: k.max_weight_clique_int(gc.adjacency_words(), wc, cap)
    rng = np.random.default_rng(0)
    n = 18 if quick else 22
    g = rng.integers(-50, 51, n).astype(np.int64)
    Q = np.triu(rng.integers(-50, 51, (n, n)), 1)
    Q = (Q + Q.T).astype(np.int64)
    yield f"subset minimum, Gray code, n={n}", lambda k: k.qpb_gray(g, Q)
    m = 24 if quick else 30
    g2 = rng.normal(size=m)
    Q2 = np.triu(rng.normal(size=(m, m)), 1)
    Q2 = Q2 + Q2.T
    yield f"subset minimum, branch and bound, n={m}", lambda k: k.qpb_branch_and_bound(g2, Q2)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="skip the slow cases")
    args = ap.parse_args(argv)
    compiled = kernels.compiled_backend()
    if compiled is None:
        raise SystemExit("compiled extension not built; run `python setup.py build_ext --inplace`")
    pure = kernels.python_backend
    print(f"{'case':45} {'compiled':>10} {'python':>10} {'speedup':>8}")
    for name, fn in cases(args.quick):
        tc, rc = _best(lambda: fn(compiled), args.repeat)
        tp, rp = _best(lambda: fn(pure), 1)
        if repr(rc) != repr(rp):
            raise SystemExit(f"{name}: backends disagree: {rc!r} vs {rp!r}")
        print(f"{name:45} {tc:9.3f}s {tp:9.3f}s {tp / tc:7.1f}x")


if __name__ == "__main__":
    main()
