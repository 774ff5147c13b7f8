"""Text formats for scenarios, probability tables and functionals.

All formats are UTF-8, one directive per line, ``#`` starts a comment.
Box indices are 1-based in files.

Scenario::

    scenario pentagon
    boxes 5
    support cyclic-no-adjacent-ones      # or: all | list 00000 10000 ...
    context 1 2
    context 2 3
    ...

or a single ``preset <name> [params]`` or ``product <fileA> <fileB>`` line
(paths relative to the file).

Probability table::

    prob chsh
    context 1 3 outcome 00 value 1/2
    ...

Functional::

    term context 1 3 outcome 00 coeff 1
    constant 0

Outcome bits are listed in the order the context's boxes are written.
Values may be ``a/b`` or decimals; a table containing any decimal is checked
with tolerance 1e-9.
"""

from __future__ import annotations

import os
from fractions import Fraction

from .numeric import DECIMAL_TOL, is_decimal_literal, parse_number
from .probability import LinearFunctional, ProbabilityError, ProbabilityFunction, preset_box, preset_functional
from .scenario import Scenario, ScenarioError, build_marginal_scenario, preset_scenario, product_scenario


class ParseError(ValueError):
    """Malformed input; ``line`` is 1-based (0 when not tied to a line)."""

    def __init__(self, message: str, path: str | None = None, line: int = 0):
        self.path = path
        self.line = line
        where = f"{path or '<input>'}:{line}: " if line else (f"{path}: " if path else "")
        super().__init__(where + message)


def _lines(text: str):
    for k, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            yield k, body.split()


def _boxes(tokens, k, path, n_boxes=None) -> list[int]:
    if not tokens:
        raise ParseError("context needs at least one box index", path, k)
    out = []
    for t in tokens:
        try:
            b = int(t)
        except ValueError:
            raise ParseError(f"box index {t!r} is not an integer", path, k) from None
        if b < 1 or (n_boxes is not None and b > n_boxes):
            limit = f" 1..{n_boxes}" if n_boxes is not None else " >= 1"
            raise ParseError(f"box index {b} out of range (expected{limit})", path, k)
        out.append(b - 1)
    return out


# --- scenarios --------------------------------------------------------------

def parse_scenario(text: str, path: str | None = None) -> Scenario:
    name = None
    n_boxes = None
    support = "all"
    contexts: list[tuple[int, list[int]]] = []
    single = None
    for k, tok in _lines(text):
        key, args = tok[0].lower(), tok[1:]
        if key in ("preset", "product"):
            if single is not None or contexts or n_boxes is not None:
                raise ParseError(f"'{key}' must be the only directive besides 'scenario'", path, k)
            single = (k, key, args)
        elif single is not None:
            raise ParseError(f"'{key}' cannot follow '{single[1]}'", path, k)
        elif key == "scenario":
            if len(args) != 1:
                raise ParseError("expected 'scenario <name>'", path, k)
            name = args[0]
        elif key == "boxes":
            if len(args) != 1 or not args[0].isdigit() or int(args[0]) < 1:
                raise ParseError("expected 'boxes <positive integer>'", path, k)
            n_boxes = int(args[0])
        elif key == "support":
            if not args:
                raise ParseError("expected 'support all | cyclic-no-adjacent-ones | list <bits>...'", path, k)
            if args[0].lower() == "list":
                if len(args) < 2:
                    raise ParseError("'support list' needs at least one bitstring", path, k)
                support = args[1:]
            elif len(args) == 1:
                support = args[0]
            else:
                raise ParseError(f"unexpected tokens after support {args[0]!r}", path, k)
        elif key == "context":
            if n_boxes is None:
                raise ParseError("'boxes' must precede the first context", path, k)
            contexts.append((k, _boxes(args, k, path, n_boxes)))
        else:
            raise ParseError(f"unknown directive {tok[0]!r}", path, k)
    if single is not None:
        k, key, args = single
        try:
            if key == "preset":
                if not args:
                    raise ParseError("expected 'preset <name> [params]'", path, k)
                s = preset_scenario(args[0], *args[1:])
            else:
                if len(args) != 2:
                    raise ParseError("expected 'product <fileA> <fileB>'", path, k)
                base = os.path.dirname(path) if path else "."
                s = product_scenario(*(load_scenario(os.path.join(base, a)) for a in args))
        except (ScenarioError, ValueError) as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(str(exc), path, k) from None
        if name is not None:
            s = Scenario(s.element_count, s.measurements, s.element_labels, name, s.contexts, s.n_boxes)
        return s
    if n_boxes is None:
        raise ParseError("missing 'boxes' (or 'preset' / 'product')", path)
    if not contexts:
        raise ParseError("no 'context' lines", path)
    seen: dict[tuple, int] = {}
    for k, c in contexts:
        key = tuple(sorted(c))
        if len(set(key)) != len(key):
            raise ParseError(f"repeated box in context {[b + 1 for b in c]}", path, k)
        if key in seen:
            raise ParseError(f"duplicate context (first on line {seen[key]})", path, k)
        seen[key] = k
    try:
        return build_marginal_scenario(n_boxes, [c for _, c in contexts], support, name or "")
    except ScenarioError as exc:
        raise ParseError(str(exc), path) from None


def load_scenario(path: str) -> Scenario:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read scenario file: {exc.strerror}", path) from None
    return parse_scenario(text, path)


def format_scenario(s: Scenario) -> str:
    if s.contexts is None or s.n_boxes is None:
        raise ScenarioError("only box scenarios have a text form")
    lines = [f"scenario {s.name or 'unnamed'}", f"boxes {s.n_boxes}"]
    all_strings = len(s.element_labels) == 2**s.n_boxes
    lines.append("support all" if all_strings else "support list " + " ".join(s.element_labels))
    lines += ["context " + " ".join(str(b + 1) for b in c) for c in s.contexts]
    return "\n".join(lines) + "\n"


# --- tables and functionals -------------------------------------------------

def _event(tok, k, path, s: Scenario, what: str):
    """Parse ``context i j ... outcome bits <what> v``; returns (outcome, value text)."""
    if not tok or tok[0].lower() != "context":
        raise ParseError("expected 'context'", path, k)
    try:
        i_out = [t.lower() for t in tok].index("outcome")
    except ValueError:
        raise ParseError("missing 'outcome'", path, k) from None
    rest = tok[i_out + 1:]
    if len(rest) != 3 or rest[1].lower() != what:
        raise ParseError(f"expected 'outcome <bits> {what} <number>'", path, k)
    boxes = _boxes(tok[1:i_out], k, path, s.n_boxes)
    try:
        outcome = s.cell(boxes, rest[0])
    except ScenarioError as exc:
        raise ParseError(str(exc), path, k) from None
    return outcome, rest[2]


def _number(text, k, path):
    try:
        return parse_number(text)
    except ValueError:
        raise ParseError(f"not a number: {text!r}", path, k) from None


def parse_probability(text: str, s: Scenario, path: str | None = None) -> ProbabilityFunction:
    if s.contexts is None:
        raise ParseError("probability files need a box scenario", path)
    header = None
    values: dict = {}
    first_line: dict = {}
    decimal = False
    for k, tok in _lines(text):
        if tok[0].lower() == "prob":
            if header is not None or values:
                raise ParseError("'prob' header must come first and only once", path, k)
            if len(tok) != 2:
                raise ParseError("expected 'prob <scenario-name>'", path, k)
            header = tok[1]
            if s.name and header != s.name:
                raise ParseError(f"table is for scenario {header!r}, not {s.name!r}", path, k)
            continue
        if header is None:
            raise ParseError("missing 'prob <scenario-name>' header", path, k)
        outcome, vtext = _event(tok, k, path, s, "value")
        v = _number(vtext, k, path)
        decimal |= is_decimal_literal(vtext)
        if outcome in values:
            # the same subset may be a cell of several contexts; it has one value
            if values[outcome] != v:
                raise ParseError(f"outcome {s.describe(outcome)} was given value {values[outcome]} "
                                 f"on line {first_line[outcome]}", path, k)
            continue
        values[outcome] = v
        first_line[outcome] = k
    if header is None:
        raise ParseError("missing 'prob <scenario-name>' header", path)
    try:
        return ProbabilityFunction(s, values, DECIMAL_TOL if decimal else 0.0)
    except (ProbabilityError, ScenarioError) as exc:
        raise ParseError(str(exc), path) from None


def parse_functional(text: str, s: Scenario, path: str | None = None, name: str = "") -> LinearFunctional:
    terms: dict = {}
    constant = Fraction(0)
    for k, tok in _lines(text):
        key = tok[0].lower()
        if key == "term":
            outcome, ctext = _event(tok[1:], k, path, s, "coeff")
            terms[outcome] = terms.get(outcome, Fraction(0)) + _number(ctext, k, path)
        elif key == "constant":
            if len(tok) != 2:
                raise ParseError("expected 'constant <number>'", path, k)
            constant += _number(tok[1], k, path)
        elif key == "functional" and len(tok) == 2:
            name = tok[1]
        else:
            raise ParseError(f"unknown directive {tok[0]!r}", path, k)
    try:
        return LinearFunctional(tuple(terms.items()), constant, name, s)
    except ScenarioError as exc:
        raise ParseError(str(exc), path) from None


def _read(path: str, what: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {what} file: {exc.strerror}", path) from None


def load_probability(path: str, s: Scenario) -> ProbabilityFunction:
    return parse_probability(_read(path, "probability"), s, path)


def load_functional(path: str, s: Scenario) -> LinearFunctional:
    base = os.path.splitext(os.path.basename(path))[0]
    return parse_functional(_read(path, "functional"), s, path, base)


def format_probability(p: ProbabilityFunction) -> str:
    s = p.scenario
    lines = [f"prob {s.name or 'unnamed'}"]
    for ctx, m in zip(s.contexts, s.measurements):
        for cell in m.cells:
            bits = "".join(s.element_labels[cell.members[0]][b] for b in ctx)
            v = p.values[cell]
            v = repr(v) if isinstance(v, float) else str(Fraction(v))
            lines.append(f"context {' '.join(str(b + 1) for b in ctx)} outcome {bits} value {v}")
    return "\n".join(lines) + "\n"


# --- "file or preset" arguments --------------------------------------------

def scenario_arg(text: str) -> Scenario:
    """A scenario file path, or a preset expression such as ``pentagon`` or ``cycle(7)``."""
    if os.path.exists(text):
        return load_scenario(text)
    try:
        return preset_scenario(text)
    except (ScenarioError, ValueError):
        raise ParseError(f"{text!r} is neither a readable file nor a preset scenario") from None


def probability_arg(text: str, s: Scenario) -> ProbabilityFunction:
    if os.path.exists(text):
        return load_probability(text, s)
    try:
        return preset_box(text, s)
    except (ProbabilityError, ScenarioError, ValueError) as exc:
        raise ParseError(f"{text!r} is neither a readable file nor a preset table ({exc})") from None


def functional_arg(text: str, s: Scenario) -> LinearFunctional:
    if os.path.exists(text):
        return load_functional(text, s)
    try:
        return preset_functional(text, s)
    except (ProbabilityError, ScenarioError, ValueError) as exc:
        raise ParseError(f"{text!r} is neither a readable file nor a preset functional ({exc})") from None
