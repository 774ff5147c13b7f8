import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ctxlab.probability import (
    JointDistribution,
    LinearFunctional,
    ProbabilityError,
    ProbabilityFunction,
    consistency_check,
    evaluate,
    is_valid,
    mix,
    power_probability,
    preset_box,
    preset_functional,
    product_probability,
    validate,
)
from ctxlab.scenario import Measurement, Outcome, Scenario, coarse_outcomes, preset_scenario, trivial_scenario

F = Fraction


@pytest.fixture(scope="module")
def chsh():
    return preset_scenario("chsh")


@pytest.fixture(scope="module")
def pent():
    return preset_scenario("pentagon")


def _signaling(chsh):
    # box 1 output 0 with probability 1 in context {1,3}, uniform in context {1,4}
    vals = {}
    for ctx, m in zip(chsh.contexts, chsh.measurements):
        for c in m.cells:
            lab = chsh.element_labels[c.members[0]]
            if ctx == (0, 2):
                vals[c] = F(1, 2) if lab[0] == "0" else F(0)
            else:
                vals[c] = F(1, 4)
    return ProbabilityFunction(chsh, vals)


def test_deterministic_is_valid(chsh, pent):
    for s in (chsh, pent, preset_scenario("gyni3")):
        for g in range(0, s.element_count, 3):
            assert is_valid(preset_box(f"deterministic({g})", s))


def test_signaling_table_flagged(chsh):
    bad = validate(_signaling(chsh))
    assert bad and all(v.kind == "consistency" for v in bad)
    assert any("box1=0" in v.detail for v in bad)


def test_pentagon_half_table(pent):
    p = preset_box("uniform_cycle(1/2)", pent)
    assert validate(p) == []
    for m in pent.measurements:
        assert sorted(p.values[c] for c in m.cells) == [0, F(1, 2), F(1, 2)]


def test_no_signaling_ok(chsh):
    for name in ("pr", "uniform", "isotropic(1/3)"):
        assert consistency_check(preset_box(name, chsh)) == []


def test_vacuous_consistency():
    s = Scenario(3, (Measurement((Outcome((0, 1)), Outcome((2,)))),
                     Measurement((Outcome((0, 2)), Outcome((1,))))))
    p = ProbabilityFunction(s, {Outcome((0, 1)): F(1, 3), Outcome((2,)): F(2, 3),
                                Outcome((0, 2)): F(1, 2), Outcome((1,)): F(1, 2)})
    assert consistency_check(p) == []


def test_missing_and_foreign_outcomes(chsh):
    vals = dict(preset_box("pr", chsh).values)
    vals.pop(next(iter(vals)))
    with pytest.raises(ProbabilityError):
        ProbabilityFunction(chsh, vals)


def test_functional_values(chsh, pent):
    f = preset_functional("chsh", chsh)
    assert evaluate(f, preset_box("pr", chsh)) == 4
    assert evaluate(f, preset_box("uniform", chsh)) == 0
    assert evaluate(f, preset_box("deterministic(0000)", chsh)) == 2
    assert evaluate(preset_functional("kcbs", pent), preset_box("uniform_cycle(1/2)", pent)) == F(5, 2)
    g = preset_scenario("gyni3")
    assert evaluate(preset_functional("gyni", g), preset_box("deterministic(000000)", g)) == F(1, 4)
    assert evaluate(LinearFunctional((), F(3, 7)), preset_box("pr", chsh)) == F(3, 7)


def test_isotropic_endpoints(chsh):
    assert preset_box("isotropic(1)", chsh) == preset_box("pr", chsh)
    assert preset_box("isotropic(0)", chsh) == preset_box("uniform", chsh)


def test_presets_reject_bad_inputs(chsh, pent):
    with pytest.raises(ProbabilityError):
        preset_box("uniform_cycle(3/5)", pent)
    with pytest.raises(ProbabilityError):
        preset_box("uniform_cycle(1/4)", chsh)
    with pytest.raises(ProbabilityError):
        preset_box("pr", pent)
    with pytest.raises(ProbabilityError):
        preset_functional("chsh", pent)


@given(st.fractions(min_value=0, max_value=1, max_denominator=50))
def test_chsh_linear_in_visibility(v):
    s = preset_scenario("chsh")
    assert evaluate(preset_functional("chsh", s), preset_box("isotropic", s, v)) == 4 * v


@given(st.fractions(min_value=0, max_value=F(1, 2), max_denominator=50))
def test_kcbs_linear(p):
    s = preset_scenario("pentagon")
    assert evaluate(preset_functional("kcbs", s), preset_box("uniform_cycle", s, p)) == 5 * p


@given(st.fractions(min_value=0, max_value=1, max_denominator=40),
       st.sampled_from(["pr", "uniform", "deterministic(0110)", "isotropic(1/2)"]),
       st.sampled_from(["pr", "uniform", "deterministic(1011)"]))
def test_evaluate_is_linear_under_mixing(alpha, a, b):
    s = preset_scenario("chsh")
    f = preset_functional("chsh", s)
    P, Q = preset_box(a, s), preset_box(b, s)
    assert evaluate(f, mix(P, Q, alpha)) == alpha * evaluate(f, P) + (1 - alpha) * evaluate(f, Q)


PAIRS = [("chsh", "pr"), ("chsh", "uniform"), ("pentagon", "uniform_cycle(2/5)"), ("specker", "uniform")]


@pytest.mark.parametrize("a,b", list(itertools.combinations_with_replacement(PAIRS, 2)))
def test_products_validate(a, b):
    P1 = preset_box(a[1], preset_scenario(a[0]))
    P2 = preset_box(b[1], preset_scenario(b[0]))
    assert is_valid(product_probability(P1, P2))


def test_product_with_point_mass(pent):
    P = preset_box("uniform_cycle(2/5)", pent)
    one = JointDistribution((F(1),)).marginal(trivial_scenario())
    Q = product_probability(P, one)
    assert list(Q.values.values()) == list(P.values.values())


def test_pentagram_product_value(pent):
    p = F(2, 5)
    P2 = power_probability(preset_box("uniform_cycle", pent, p), 2)
    n = pent.element_count
    A = [pent.cell((i, (i + 1) % 5), "10") for i in range(5)]
    for i in range(5):
        a, b = A[i], A[(2 * i) % 5]
        o = Outcome(tuple(x * n + y for x in a.members for y in b.members))
        assert P2[o] == p * p


def test_pr_squared_is_consistent(chsh):
    assert validate(power_probability(preset_box("pr", chsh), 2)) == []


def _brute_consistent(p):
    """Every outcome lying in two coarse algebras gets the same value in both."""
    s = p.scenario
    tables = []
    for m in s.measurements:
        t = {}
        for sel in range(1 << len(m.cells)):
            cells = [c for k, c in enumerate(m.cells) if sel >> k & 1]
            mask = 0
            for c in cells:
                mask |= c.mask
            t[mask] = sum((p.values[c] for c in cells), F(0))
        tables.append(t)
    for ta, tb in itertools.combinations(tables, 2):
        for mask in ta.keys() & tb.keys():
            if ta[mask] != tb[mask]:
                return False
    return True


@given(st.lists(st.integers(0, 4), min_size=16, max_size=16))
def test_consistency_matches_coarse_brute_force(weights):
    s = preset_scenario("chsh")
    # normalized per measurement, but otherwise arbitrary: may or may not signal
    vals = {}
    for m in s.measurements:
        raw = [weights[c.members[0]] + 1 for c in m.cells]
        tot = sum(raw)
        for c, r in zip(m.cells, raw):
            vals[c] = F(r, tot)
    p = ProbabilityFunction(s, vals)
    assert (consistency_check(p) == []) == _brute_consistent(p)


def test_coarse_algebra_sizes_used_by_brute_force(chsh):
    assert all(len(coarse_outcomes(m)) == 16 for m in chsh.measurements)


def test_decimal_tolerance():
    s = preset_scenario("specker")
    vals = {o: 0.25 for o in s.fine_outcomes()}
    p = ProbabilityFunction(s, vals)
    assert p.tolerance == 1e-9
    assert validate(p) == []
    vals[s.fine_outcomes()[0]] = 0.25 + 1e-7
    assert validate(ProbabilityFunction(s, vals))
