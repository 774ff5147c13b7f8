from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ctxlab.io import (
    ParseError,
    format_probability,
    format_scenario,
    functional_arg,
    load_functional,
    load_probability,
    load_scenario,
    parse_functional,
    parse_probability,
    parse_scenario,
    probability_arg,
    scenario_arg,
)
from ctxlab.probability import evaluate, preset_box, preset_functional
from ctxlab.scenario import power_scenario, preset_scenario

F = Fraction

PENTAGON = """\
# five boxes around a cycle
scenario pentagon
boxes 5
support cyclic-no-adjacent-ones
context 1 2
context 2 3
context 3 4
context 4 5
context 1 5
"""


def test_pentagon_file_matches_preset():
    s = parse_scenario(PENTAGON)
    assert s.measurements == preset_scenario("pentagon").measurements
    assert s.name == "pentagon"


@pytest.mark.parametrize("name", ["chsh", "specker", "pentagon", "gyni3", "cycle(4)"])
def test_scenario_round_trip(name):
    s = preset_scenario(name)
    t = parse_scenario(format_scenario(s))
    assert t.measurements == s.measurements
    assert t.element_labels == s.element_labels
    assert format_scenario(t) == format_scenario(s)


@pytest.mark.parametrize("name,box", [("chsh", "pr"), ("chsh", "isotropic(1/3)"),
                                      ("pentagon", "uniform_cycle(2/5)"), ("gyni3", "uniform")])
def test_probability_round_trip(name, box):
    s = preset_scenario(name)
    p = preset_box(box, s)
    q = parse_probability(format_probability(p), s)
    assert q == p and q.tolerance == 0


@given(st.lists(st.fractions(min_value=0, max_value=1, max_denominator=97), min_size=4, max_size=4))
def test_fractions_survive_text(ws):
    s = preset_scenario("chsh")
    tot = sum(ws) or F(1)
    ws = [w / tot for w in ws] if sum(ws) else [F(1, 4)] * 4
    lines = ["prob chsh"]
    for ctx in s.contexts:
        for bits, w in zip(("00", "01", "10", "11"), ws):
            lines.append(f"context {ctx[0] + 1} {ctx[1] + 1} outcome {bits} value {w}")
    p = parse_probability("\n".join(lines), s)
    assert [p.values[s.cell(s.contexts[0], b)] for b in ("00", "01", "10", "11")] == ws


def test_decimal_values_set_tolerance():
    s = preset_scenario("chsh")
    text = format_probability(preset_box("uniform", s)).replace("1/4", "0.25")
    p = parse_probability(text, s)
    assert p.tolerance == pytest.approx(1e-9)
    assert all(v == F(1, 4) for v in p.values.values())


def test_shared_cells_repeat_consistently():
    s = preset_scenario("pentagon")
    text = format_probability(preset_box("uniform_cycle(1/2)", s))
    assert parse_probability(text, s) == preset_box("uniform_cycle(1/2)", s)
    bad = text + "context 1 2 outcome 10 value 1/3\n"
    with pytest.raises(ParseError, match=r":\d+: .*was given value"):
        parse_probability(bad, s)


@pytest.mark.parametrize("text,line", [
    ("boxes 2\ncontext 1 3\n", 2),
    ("boxes 2\ncontext 1 x\n", 2),
    ("context 1 2\n", 1),
    ("boxes 2\nfrobnicate\n", 2),
    ("boxes 2\ncontext 1 2\ncontext 2 1\n", 3),
    ("boxes two\n", 1),
    ("preset chsh\nboxes 4\n", 2),
])
def test_scenario_errors_have_lines(text, line):
    with pytest.raises(ParseError) as exc:
        parse_scenario(text, "f.scn")
    assert exc.value.line == line
    assert str(exc.value).startswith(f"f.scn:{line}: ")


def test_scenario_errors_without_lines():
    for text in ("", "boxes 3\n", "preset nonsense\n"):
        with pytest.raises(ParseError):
            parse_scenario(text)


@pytest.mark.parametrize("body,line", [
    ("context 1 3 outcome 00 value x\n", 2),
    ("context 1 3 outcome 000 value 1/4\n", 2),
    ("context 1 2 outcome 00 value 1/4\n", 2),
    ("context 1 3 outcome 00\n", 2),
    ("outcome 00 value 1\n", 2),
])
def test_probability_errors_have_lines(body, line):
    s = preset_scenario("chsh")
    with pytest.raises(ParseError) as exc:
        parse_probability("prob chsh\n" + body, s, "t.prob")
    assert exc.value.line == line


def test_probability_header():
    s = preset_scenario("chsh")
    with pytest.raises(ParseError):
        parse_probability("context 1 3 outcome 00 value 1\n", s)
    with pytest.raises(ParseError):
        parse_probability("prob pentagon\n", s)
    # incomplete table: missing outcomes are reported without a line
    with pytest.raises(ParseError):
        parse_probability("prob chsh\ncontext 1 3 outcome 00 value 1\n", s)


def test_functional_parse():
    s = preset_scenario("chsh")
    text = "functional mine\nterm context 1 3 outcome 00 coeff 2\nterm context 1 3 outcome 00 coeff 1/2\nconstant -1\n"
    f = parse_functional(text, s)
    assert f.name == "mine" and f.constant == -1
    assert evaluate(f, preset_box("deterministic(0000)", s)) == F(3, 2)
    with pytest.raises(ParseError):
        parse_functional("weight 3\n", s)
    with pytest.raises(ParseError):
        parse_functional("constant\n", s)


def test_files_and_products(tmp_path):
    (tmp_path / "pent.scn").write_text(PENTAGON)
    (tmp_path / "sq.scn").write_text("scenario pent2\nproduct pent.scn pent.scn\n")
    s2 = load_scenario(str(tmp_path / "sq.scn"))
    assert s2.measurements == power_scenario(preset_scenario("pentagon"), 2).measurements
    assert s2.name == "pent2"
    s = load_scenario(str(tmp_path / "pent.scn"))
    (tmp_path / "half.prob").write_text(format_probability(preset_box("uniform_cycle(1/2)", s)))
    assert load_probability(str(tmp_path / "half.prob"), s) == preset_box("uniform_cycle(1/2)", s)
    (tmp_path / "k.fn").write_text("".join(
        f"term context {i + 1} {(i + 1) % 5 + 1} outcome 10 coeff 1\n" for i in range(5)))
    f = load_functional(str(tmp_path / "k.fn"), s)
    assert f.name == "k"
    assert evaluate(f, preset_box("uniform_cycle(1/2)", s)) == F(5, 2)
    with pytest.raises(ParseError):
        load_scenario(str(tmp_path / "missing.scn"))


def test_file_or_preset_arguments(tmp_path):
    s = scenario_arg("pentagon")
    assert s == preset_scenario("pentagon")
    assert probability_arg("uniform_cycle(1/2)", s) == preset_box("uniform_cycle(1/2)", s)
    assert functional_arg("kcbs", s) == preset_functional("kcbs", s)
    for bad in (lambda: scenario_arg("nope"), lambda: probability_arg("nope", s),
                lambda: functional_arg("nope", s)):
        with pytest.raises(ParseError):
            bad()
