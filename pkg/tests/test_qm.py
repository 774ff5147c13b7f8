import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctxlab import qm, report
from ctxlab.ce import nc_check
from ctxlab.limits import Limits, ResourceLimitError
from ctxlab.lp import LPVerificationError
from ctxlab.probability import preset_box, preset_functional
from ctxlab.qm import (
    BRANCH_AND_BOUND,
    EXHAUSTIVE,
    FEASIBLE,
    HEURISTIC,
    HEURISTIC_REGIME,
    INFEASIBLE,
    PairMeasure,
    mu_eval,
    pair_index,
    qm_feasible,
    qm_optimize,
    sample_qm_vertex,
    separation_oracle,
    sorkin_residual,
    verify_witness,
)
from ctxlab.scenario import Outcome, build_marginal_scenario, preset_scenario

F = Fraction


def test_pair_index():
    n = 5
    seen = [pair_index(n, i, j) for i in range(n) for j in range(i + 1, n)]
    assert seen == list(range(10))
    assert pair_index(n, 3, 1) == pair_index(n, 1, 3)
    with pytest.raises(IndexError):
        pair_index(n, 2, 2)
    with pytest.raises(IndexError):
        pair_index(n, 0, 5)


def test_mu_examples():
    pm = PairMeasure((F(1, 5),) * 3, (F(1, 2), F(2, 5), F(2, 5)))
    assert mu_eval(pm, [1]) == F(1, 5)
    assert mu_eval(pm, [0, 1, 2]) == F(7, 10)
    assert mu_eval(pm, []) == 0
    assert sorkin_residual(pm, {0}, {1}, {2}) == 0
    with pytest.raises(IndexError):
        mu_eval(pm, [3])


@given(st.lists(st.fractions(min_value=-2, max_value=2, max_denominator=9), min_size=1, max_size=7),
       st.integers(0, 127))
def test_additive_measure_sums(w, mask):
    pm = PairMeasure.additive(w)
    mask &= (1 << len(w)) - 1
    assert mu_eval(pm, mask) == sum((w[i] for i in range(len(w)) if mask >> i & 1), F(0))


def test_sorkin_exhaustive_small():
    rng = np.random.default_rng(11)
    for n in range(1, 6):
        for _ in range(3):
            pm = report.random_pair_measure(rng, n)
            table = [mu_eval(pm, m) for m in range(1 << n)]
            for a, b, c in report.disjoint_triples(n):
                assert sorkin_residual(table, a, b, c) == 0


def test_sorkin_rejects_overlap_and_flags_residual():
    pm = PairMeasure.additive([F(1)] * 3)
    with pytest.raises(ValueError):
        sorkin_residual(pm, {0, 1}, {1}, {2})
    table = {m: F(0) for m in range(8)}
    table[0b111] = F(1)
    assert sorkin_residual(table, {0}, {1}, {2}) == 1
    assert sorkin_residual(table, set(), set(), set()) == 0


def test_sorkin_nullspace_dimension():
    for n in range(1, 6):
        basis = report.sorkin_nullspace(n)
        assert len(basis) == n + n * (n - 1) // 2


def test_separation_examples():
    pm = PairMeasure.additive([F(1, 3), F(0), F(2)])
    assert separation_oracle(None, pm).subset is None
    pm = PairMeasure((F(1), F(1)), (F(-1),))
    sep = separation_oracle(None, pm)
    assert sep.subset == Outcome((0, 1)) and sep.value == -1 and sep.exact
    for regime in (BRANCH_AND_BOUND, HEURISTIC_REGIME):
        assert separation_oracle(None, pm, regime).subset == Outcome((0, 1))
    with pytest.raises(ValueError):
        separation_oracle(None, pm, "magic")
    with pytest.raises(ResourceLimitError):
        separation_oracle(None, PairMeasure.additive([F(1)] * 30))


@pytest.mark.parametrize("seed", range(30))
def test_separation_matches_brute_force(seed):
    rng = np.random.default_rng(50 + seed)
    n = int(rng.integers(1, 9))
    pm = report.random_pair_measure(rng, n)
    best = min(mu_eval(pm, m) for m in range(1 << n))
    for regime in (EXHAUSTIVE, BRANCH_AND_BOUND):
        sep = separation_oracle(None, pm, regime)
        if best >= 0:
            assert sep.subset is None
        else:
            assert sep.value == best and mu_eval(pm, sep.subset) == best


def test_float_separation():
    pm = PairMeasure((1.0, 1.0), (-1.0,))
    sep = separation_oracle(None, pm)
    assert not sep.exact and sep.value == pytest.approx(-1.0)


def _full_check(S, P, pm):
    """Direct re-verification over every subset, in scaled integer arithmetic."""
    n = S.element_count
    vals = [F(v) for v in pm.sing + pm.pair]
    L = math.lcm(*(v.denominator for v in vals))
    sing = np.array([int(v * L) for v in pm.sing], dtype=object)
    Q = np.array([[int(pm.q(i, j) * L) if i != j else 0 for j in range(n)] for i in range(n)], dtype=object)
    bits = (np.arange(1 << n)[:, None] >> np.arange(n)) & 1
    B = bits.astype(object)
    mu = B.dot(sing) + (B.dot(Q) * B).sum(axis=1) // 2
    assert (mu >= 0).all()
    for o in S.fine_outcomes():
        assert F(int(mu[o.mask]), L) == P.values[o]


@pytest.mark.parametrize("name,box", [("chsh", "deterministic(5)"), ("pentagon", "deterministic(2)"),
                                      ("chsh", "isotropic(1/5)"), ("specker", "uniform")])
def test_classical_tables_are_quantum(name, box):
    S = preset_scenario(name)
    P = preset_box(box, S)
    nc = nc_check(S, P)
    assert nc.feasible
    _full_check(S, P, qm.additive_measure(nc.joint))
    r = qm_feasible(S, P)
    assert r.status == FEASIBLE
    _full_check(S, P, r.witness)


@pytest.mark.parametrize("name,box", [("chsh", "pr"), ("pentagon", "uniform_cycle(1/2)")])
def test_enumerate_examples_reverify(name, box):
    S = preset_scenario(name)
    P = preset_box(box, S)
    r = qm_feasible(S, P, "enumerate")
    if r.status == FEASIBLE:
        _full_check(S, P, r.witness)
    else:
        assert r.status == INFEASIBLE and r.certificate is not None and r.certificate_terms()


def test_rowgen_agrees_with_enumerate():
    S = preset_scenario("pentagon")
    for box in ("uniform_cycle(1/2)", "uniform_cycle(2/5)", "uniform"):
        P = preset_box(box, S)
        assert qm_feasible(S, P, "enumerate").status == qm_feasible(S, P, "rowgen").status


def test_heuristic_regime_is_labelled():
    S = preset_scenario("pentagon")
    P = preset_box("uniform_cycle(1/2)", S)
    lim = Limits(qm_enumerate=4, qm_exact=5)
    r = qm_feasible(S, P, "rowgen", limits=lim)
    assert r.status == HEURISTIC and r.feasible and r.unverified_note
    with pytest.raises(ResourceLimitError):
        qm_feasible(S, P, "enumerate", limits=lim)
    with pytest.raises(ValueError):
        qm_feasible(S, P, "guess")


def test_out_of_range_measure_rejected():
    S = preset_scenario("chsh")
    P = preset_box("pr", S)
    bad = PairMeasure.additive([F(1, 16)] * 16)
    with pytest.raises(LPVerificationError):
        verify_witness(S, P, bad)


def test_qm_optimize_values():
    S = preset_scenario("pentagon")
    r = qm_optimize(S, preset_functional("kcbs", S))
    assert r.value == F(5, 2)
    _full_check(S, r.probability, r.witness)


def test_sample_determinism():
    S = preset_scenario("pentagon")
    a = sample_qm_vertex(S, 3)
    b = sample_qm_vertex(S, 3)
    assert a == b


@settings(max_examples=10)
@given(st.integers(0, 10**6))
def test_sampled_vertices_are_quantum(seed):
    S = build_marginal_scenario(3, [(0, 1), (1, 2)])
    P, pm = sample_qm_vertex(S, seed)
    _full_check(S, P, pm)


@settings(max_examples=60)
@given(st.integers(0, 2**32 - 1))
def test_pairwise_additive_blocks_are_jointly_additive(seed):
    pm, X, blocks = report.lemma_instance(np.random.default_rng(seed))
    for A, B in itertools.combinations(blocks, 2):
        assert mu_eval(pm, A) + mu_eval(pm, B) == mu_eval(pm, A + B)
    assert mu_eval(pm, X) == sum((mu_eval(pm, A) for A in blocks), F(0))


def test_subset_table_cap():
    with pytest.raises(ResourceLimitError):
        qm.subset_table(PairMeasure.additive([F(0)] * 17))
    t = qm.subset_table(PairMeasure.additive([F(1), F(2)]))
    assert t[Outcome((0, 1))] == 3 and len(t) == 4
    assert list(itertools.islice(qm.iter_subsets(3), 8)) == list(range(8))


def test_sorkin_random_triples_large():
    rng = np.random.default_rng(17)
    for n in (8, 12, 16):
        pm = report.random_pair_measure(rng, n)
        for _ in range(10**4 // 3):
            labels = rng.integers(0, 4, n)
            a, b, c = ([int(i) for i in np.flatnonzero(labels == k)] for k in (1, 2, 3))
            assert sorkin_residual(pm, a, b, c) == 0


def test_branch_and_bound_separation_n12():
    rng = np.random.default_rng(12)
    for _ in range(100):
        pm = report.random_pair_measure(rng, 12)
        a = separation_oracle(None, pm, EXHAUSTIVE)
        b = separation_oracle(None, pm, BRANCH_AND_BOUND)
        assert a.value == b.value


def test_constant_functional_and_valid_samples():
    from ctxlab.probability import LinearFunctional, validate

    S = preset_scenario("pentagon")
    assert qm_optimize(S, LinearFunctional((), F(3, 7), "", S)).value == F(3, 7)
    for seed in range(5):
        P, _ = sample_qm_vertex(S, seed)
        assert validate(P) == []
