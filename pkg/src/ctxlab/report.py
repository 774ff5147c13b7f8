"""The bounds report: every headline number, recomputed and gated.

Each row is a function returning a :class:`Row`.  Rows never catch
:class:`~ctxlab.limits.ResourceLimitError`; a cap hit aborts the report so the
CLI can exit with the resource-error code instead of printing a false fail.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import sympy

from .ce import ce_check, ce_optimize, consistent_optimize, nc_optimize, threshold_search
from .limits import Limits, get_limits
from .probability import gyni_winning_events, preset_box, preset_functional, uniform_cycle_box
from .qm import PairMeasure, mu_eval, qm_optimize, sample_qm_vertex, sorkin_residual, verify_witness
from .scenario import COARSE, exclusive, exclusivity_graph, preset_scenario

PASS, FAIL, WARN = "pass", "fail", "warn"


@dataclass
class Row:
    key: str
    title: str
    status: str = PASS
    details: dict = field(default_factory=dict)
    seconds: float = 0.0
    budget: float | None = None

    def gate(self, ok: bool, label: str, value="") -> None:
        self.details[label] = f"{'ok' if ok else 'FAILED'} {value}".rstrip()
        if not ok:
            self.status = FAIL

    def soft(self, ok: bool, label: str, value="") -> None:
        self.details[label] = f"{'ok' if ok else 'warn'} {value}".rstrip()
        if not ok and self.status == PASS:
            self.status = WARN


def _q(x) -> str:
    x = Fraction(x)
    return str(x) if x.denominator == 1 else f"{x} ({float(x):.10g})"


# --- rows -------------------------------------------------------------------

def row_pentagon_ladder(lim: Limits) -> Row:
    r = Row("pentagon-ladder", "pentagon KCBS: nc = 2, ce1 = consistent = 5/2", budget=5)
    s = preset_scenario("pentagon")
    f = preset_functional("kcbs", s)
    nc = nc_optimize(s, f, lim).value
    ce1 = ce_optimize(s, f, limits=lim).value
    cons = consistent_optimize(s, f).value
    r.gate(nc == 2, "nc", _q(nc))
    r.gate(ce1 == Fraction(5, 2), "ce1", _q(ce1))
    r.gate(cons == Fraction(5, 2), "consistent", _q(cons))
    return r


def row_sqrt5(lim: Limits) -> Row:
    r = Row("kcbs-two-copy-threshold", "pentagon two-copy CE threshold reaches KCBS sqrt(5)", budget=120)
    s = preset_scenario("pentagon")
    t = threshold_search("uniform-cycle", s, copies=2, tol=Fraction(1, 10**6), limits=lim)
    target = math.sqrt(5)
    r.gate(not t.never_fails and abs(float(t.value) - target) <= 1e-4, "KCBS at threshold",
           f"{float(t.value):.7f} (exact {t.exact_value})")
    p = uniform_cycle_box(s, 1 / sympy.sqrt(5))
    rep = ce_check(s, p, copies=2, limits=lim)
    worst = sympy.nsimplify(rep.worst_sum)
    r.gate(rep.holds and worst == 1, "uniform_cycle(1/sqrt5) two-copy worst clique sum", str(worst))
    bad = ce_check(s, preset_box("uniform_cycle(0.4573)", s), copies=2, limits=lim)
    r.gate(not bad.holds, "uniform_cycle(0.4573) fails two-copy CE", _q(bad.worst_sum))
    return r


def row_isotropic(lim: Limits) -> Row:
    r = Row("chsh-two-copy-threshold", "chsh two-copy CE threshold on the isotropic line", budget=600)
    s = preset_scenario("chsh")
    t = threshold_search("isotropic", s, copies=2, tol=Fraction(1, 10**6), limits=lim)
    S = float(t.value)
    r.gate(not t.never_fails and 2 * math.sqrt(2) - 1e-6 <= S <= 2.8840, "CHSH S* in [2 sqrt2, 2.8840]",
           f"{S:.7f} (exact {t.exact_value})")
    r.soft(abs(S - 2.883) <= 0.005, "|S* - 2.883| <= 0.005", f"{abs(S - 2.883):.2e}")
    pr = preset_box("pr", s)
    r.gate(ce_check(s, pr, copies=1, limits=lim).holds, "PR obeys single-copy CE")
    two = ce_check(s, pr, copies=2, limits=lim)
    r.gate(not two.holds, "PR violates two-copy CE", _q(two.worst_sum))
    return r


def row_gyni(lim: Limits) -> Row:
    r = Row("gyni", "GYNI: winning events exclusive, ce1 = nc = 1/4", budget=60)
    s = preset_scenario("gyni3")
    ev = gyni_winning_events(s)
    r.gate(all(exclusive(s, a, b, COARSE) for a, b in itertools.combinations(ev, 2)),
           "winning events pairwise exclusive")
    f = preset_functional("gyni", s)
    ce1 = ce_optimize(s, f, limits=lim).value
    nc = nc_optimize(s, f, lim).value
    r.gate(ce1 == Fraction(1, 4), "ce1", _q(ce1))
    r.gate(nc == Fraction(1, 4), "nc", _q(nc))
    return r


def row_chsh_anchors(lim: Limits) -> Row:
    r = Row("chsh-anchors", "CHSH: nc = 2, consistent = ce1 = 4", budget=30)
    s = preset_scenario("chsh")
    f = preset_functional("chsh", s)
    for name, v, want in (("nc", nc_optimize(s, f, lim).value, 2),
                          ("consistent", consistent_optimize(s, f).value, 4),
                          ("ce1", ce_optimize(s, f, limits=lim).value, 4)):
        r.gate(v == want, name, _q(v))
    return r


def row_qm_vertices(lim: Limits, samples: int = 200) -> Row:
    r = Row("qm-vertices-obey-ce", f"{samples} quantum-measure vertices per scenario obey CE", budget=600)
    for name in ("chsh", "pentagon"):
        s = preset_scenario(name)
        bad = [seed for seed in range(samples) if not ce_check(s, sample_qm_vertex(s, seed, lim)[0],
                                                               limits=lim).holds]
        r.gate(not bad, name, f"{samples - len(bad)}/{samples}")
    return r


def lemma_instance(rng: np.random.Generator):
    """Random measure and partition with pairwise additivity forced; returns the pieces."""
    n = int(rng.integers(2, 11))
    sing = [Fraction(int(v), 7) for v in rng.integers(-20, 21, n)]
    q = {(i, j): Fraction(int(rng.integers(-20, 21)), 5) for i in range(n) for j in range(i + 1, n)}
    X = [i for i in range(n) if rng.random() < 0.8] or [0]
    k = int(rng.integers(1, len(X) + 1))
    labels = [int(v) for v in rng.integers(0, k, len(X))]
    blocks = [b for b in ([x for x, l in zip(X, labels) if l == c] for c in range(k)) if b]
    for A, B in itertools.combinations(blocks, 2):
        pairs = sorted(tuple(sorted((a, b))) for a in A for b in B)
        q[pairs[0]] -= sum(q[p] for p in pairs)
    pair = [sing[i] + sing[j] + q[(i, j)] for i in range(n) for j in range(i + 1, n)]
    return PairMeasure(tuple(sing), tuple(pair)), X, blocks


def row_lemma(lim: Limits, instances: int = 500, seed: int = 1) -> Row:
    r = Row("pairwise-implies-joint", f"{instances} pairwise-additive partitions are jointly additive", budget=120)
    rng = np.random.default_rng(seed)
    bad = unforced = 0
    for _ in range(instances):
        pm, X, blocks = lemma_instance(rng)
        if any(mu_eval(pm, A) + mu_eval(pm, B) != mu_eval(pm, A + B)
               for A, B in itertools.combinations(blocks, 2)):
            unforced += 1
        if mu_eval(pm, X) != sum((mu_eval(pm, A) for A in blocks), Fraction(0)):
            bad += 1
    r.gate(unforced == 0, "pairwise additivity enforced", f"{instances - unforced}/{instances}")
    r.gate(bad == 0, "joint additivity", f"{instances - bad}/{instances}")
    return r


def random_pair_measure(rng: np.random.Generator, n: int) -> PairMeasure:
    sing = tuple(Fraction(int(v), int(d)) for v, d in zip(rng.integers(-9, 10, n), rng.integers(1, 6, n)))
    m = n * (n - 1) // 2
    pair = tuple(Fraction(int(v), int(d)) for v, d in zip(rng.integers(-9, 10, m), rng.integers(1, 6, m)))
    return PairMeasure(sing, pair)


def disjoint_triples(n: int):
    """Every ordered triple of pairwise disjoint subsets, as bitmasks (4^n of them)."""
    for labels in itertools.product(range(4), repeat=n):
        masks = [0, 0, 0, 0]
        for i, l in enumerate(labels):
            masks[l] |= 1 << i
        yield masks[1], masks[2], masks[3]


def sorkin_nullspace(n: int) -> list[list[Fraction]]:
    """Basis of subset tables with mu(empty) = 0 obeying the three-set rule on every disjoint triple.

    Computed by exact row reduction of the constraint system, independently
    of the pair-extension formula.
    """
    N = 1 << n
    pivots: dict[int, list[Fraction]] = {}
    seen = set()

    def reduce(row):
        for c in sorted(pivots):
            if row[c]:
                f = row[c]
                prow = pivots[c]
                row = [a - f * b for a, b in zip(row, prow)]
        return row

    rows = [[Fraction(int(i == 0)) for i in range(N)]]
    for a, b, c in disjoint_triples(n):
        key = tuple(sorted((a, b, c)))
        if key in seen:
            continue
        seen.add(key)
        row = [Fraction(0)] * N
        for sign, mask in ((1, a), (1, b), (1, c), (-1, a | b), (-1, b | c), (-1, a | c), (1, a | b | c)):
            row[mask] += sign
        rows.append(row)
    for row in rows:
        row = reduce(row)
        piv = next((i for i, v in enumerate(row) if v), None)
        if piv is None:
            continue
        row = [v / row[piv] for v in row]
        for c in list(pivots):
            if pivots[c][piv]:
                f = pivots[c][piv]
                pivots[c] = [x - f * y for x, y in zip(pivots[c], row)]
        pivots[piv] = row
    free = [i for i in range(N) if i not in pivots]
    basis = []
    for fcol in free:
        vec = [Fraction(0)] * N
        vec[fcol] = Fraction(1)
        for c, prow in pivots.items():
            vec[c] = -prow[fcol]
        basis.append(vec)
    return basis


def row_sorkin(lim: Limits, tables: int = 100, seed: int = 2) -> Row:
    r = Row("sorkin-extension", "pair extension: sound on all disjoint triples, complete for |Xi| <= 6", budget=120)
    rng = np.random.default_rng(seed)
    nonzero = 0
    checked = 0
    for n in range(1, 7):
        for _ in range(3):
            pm = random_pair_measure(rng, n)
            vals = [mu_eval(pm, m) for m in range(1 << n)]
            for a, b, c in disjoint_triples(n):
                checked += 1
                if sorkin_residual(vals, a, b, c) != 0:
                    nonzero += 1
    r.gate(nonzero == 0, "soundness (exhaustive triples)", f"{checked - nonzero}/{checked}")
    bases = {n: sorkin_nullspace(n) for n in range(1, 7)}
    r.gate(all(len(bases[n]) == n + n * (n - 1) // 2 for n in bases), "solution-space dimension n + C(n,2)")
    mismatches = 0
    for k in range(tables):
        n = 1 + k % 6
        coeffs = rng.integers(-9, 10, len(bases[n]))
        table = [sum((int(c) * v[m] for c, v in zip(coeffs, bases[n])), Fraction(0)) for m in range(1 << n)]
        sing = tuple(table[1 << i] for i in range(n))
        pair = tuple(table[(1 << i) | (1 << j)] for i in range(n) for j in range(i + 1, n))
        pm = PairMeasure(sing, pair)
        if any(mu_eval(pm, m) != table[m] for m in range(1 << n)):
            mismatches += 1
    r.gate(mismatches == 0, "completeness (projected tables)", f"{tables - mismatches}/{tables}")
    return r


NESTING_PAIRS = (("chsh", "chsh"), ("pentagon", "kcbs"), ("gyni3", "gyni"))


def row_nesting(lim: Limits) -> Row:
    r = Row("nesting", "nc <= qm <= ce1 <= consistent for every preset functional", budget=900)
    for scen, fn in NESTING_PAIRS:
        s = preset_scenario(scen)
        f = preset_functional(fn, s)
        nc = nc_optimize(s, f, lim).value
        ce1 = ce_optimize(s, f, limits=lim).value
        cons = consistent_optimize(s, f).value
        if s.element_count <= lim.qm_enumerate:
            q = qm_optimize(s, f, lim)
            verify_witness(s, q.probability, q.witness, limits=lim)
            r.gate(nc <= q.value <= ce1 <= cons, f"{scen}/{fn}",
                   f"{_q(nc)} <= {_q(q.value)} <= {_q(ce1)} <= {_q(cons)}; "
                   f"witness checked on {2 ** s.element_count} subsets")
        else:
            r.gate(nc <= ce1 <= cons, f"{scen}/{fn}",
                   f"{_q(nc)} <= qm <= {_q(ce1)} <= {_q(cons)}; "
                   f"qm not solved, |Xi|={s.element_count} exceeds the enumeration cap {lim.qm_enumerate}")
    return r


ROWS = (
    ("1", row_pentagon_ladder),
    ("2", row_sqrt5),
    ("3", row_isotropic),
    ("4", row_gyni),
    ("5", row_chsh_anchors),
    ("6", row_qm_vertices),
    ("7", row_lemma),
    ("8", row_sorkin),
    ("9", row_nesting),
)


def run_report(limits: Limits | None = None, only=None) -> list[Row]:
    lim = limits or get_limits()
    out = []
    for num, fn in ROWS:
        if only and num not in only:
            continue
        t0 = time.perf_counter()
        row = fn(lim)
        row.seconds = time.perf_counter() - t0
        row.key = f"{num}:{row.key}"
        out.append(row)
    return out
