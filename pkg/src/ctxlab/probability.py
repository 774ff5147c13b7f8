"""Experimental probability functions, named boxes and linear functionals."""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .numeric import is_zero, simplify, tolerance_for
from .scenario import (
    Outcome,
    Scenario,
    ScenarioError,
    power_scenario,
    product_scenario,
)


class ProbabilityError(ValueError):
    pass


@dataclass(frozen=True)
class ProbabilityFunction:
    """One value per fine-grained outcome (keyed by subset identity)."""

    scenario: Scenario
    values: Mapping[Outcome, object]
    tolerance: float = field(default=None)

    def __post_init__(self):
        s = self.scenario
        fine = set(s.fine_outcomes())
        vals = {}
        for k, v in dict(self.values).items():
            o = k if isinstance(k, Outcome) else Outcome(tuple(k))
            s.check_outcome(o)
            if o not in fine:
                raise ScenarioError(f"outcome {s.describe(o)} is not a fine-grained outcome of the scenario")
            if isinstance(v, int) and not isinstance(v, bool):
                v = Fraction(v)
            vals[o] = v
        missing = fine - vals.keys()
        if missing:
            o = min(missing)
            raise ProbabilityError(f"no value for outcome {s.describe(o)} ({len(missing)} missing)")
        object.__setattr__(self, "values", {o: vals[o] for o in s.fine_outcomes()})
        if self.tolerance is None:
            object.__setattr__(self, "tolerance", tolerance_for(vals.values()))

    def __getitem__(self, outcome) -> object:
        if not isinstance(outcome, Outcome):
            outcome = Outcome(tuple(outcome))
        return self.values[outcome]

    def __hash__(self):
        return hash((self.scenario, tuple(self.values.items())))

    def __eq__(self, other):
        if not isinstance(other, ProbabilityFunction):
            return NotImplemented
        return self.scenario == other.scenario and self.values == other.values

    def coarse_value(self, measurement_index: int, outcome: Outcome):
        """Additively induced value of a union of cells of one measurement."""
        m = self.scenario.measurements[measurement_index]
        total = Fraction(0)
        covered = 0
        for c in m.cells:
            if c.mask & outcome.mask:
                if c.mask & ~outcome.mask:
                    raise ProbabilityError("outcome is not a union of cells of this measurement")
                total = total + self.values[c]
                covered |= c.mask
        if covered != outcome.mask:
            raise ProbabilityError("outcome is not a union of cells of this measurement")
        return simplify(total)

    def vector(self) -> list:
        """Values in the scenario's canonical fine-outcome order."""
        return [self.values[o] for o in self.scenario.fine_outcomes()]

    @property
    def exact(self) -> bool:
        return self.tolerance == 0.0


@dataclass(frozen=True)
class JointDistribution:
    weights: tuple

    def __post_init__(self):
        ws = tuple(Fraction(w) if isinstance(w, int) else w for w in self.weights)
        object.__setattr__(self, "weights", ws)
        tol = tolerance_for(ws)
        if any(not (float(w) >= -tol) for w in ws):
            raise ProbabilityError("joint distribution has negative weights")
        if not is_zero(sum(ws) - 1, tol):
            raise ProbabilityError("joint distribution does not sum to 1")

    def marginal(self, s: Scenario) -> ProbabilityFunction:
        if len(self.weights) != s.element_count:
            raise ProbabilityError("joint distribution size does not match the scenario")
        vals = {o: simplify(sum((self.weights[i] for i in o.members), Fraction(0))) for o in s.fine_outcomes()}
        return ProbabilityFunction(s, vals)

    @classmethod
    def point_mass(cls, n: int, element: int) -> "JointDistribution":
        return cls(tuple(Fraction(int(i == element)) for i in range(n)))


@dataclass(frozen=True)
class Violation:
    kind: str  # "negative" | "normalization" | "consistency"
    detail: str
    measurements: tuple = ()
    outcome: Outcome | None = None
    values: tuple = ()


@dataclass(frozen=True)
class LinearFunctional:
    terms: tuple  # of (Outcome, coefficient)
    constant: object = Fraction(0)
    name: str = ""
    scenario: Scenario | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        merged: dict[Outcome, object] = {}
        for o, c in self.terms:
            o = o if isinstance(o, Outcome) else Outcome(tuple(o))
            c = Fraction(c) if isinstance(c, int) else c
            merged[o] = merged.get(o, Fraction(0)) + c
        if self.scenario is not None:
            fine = set(self.scenario.fine_outcomes())
            for o in merged:
                if o not in fine:
                    raise ScenarioError(
                        f"functional term {self.scenario.describe(o)} is not a fine-grained outcome"
                    )
        terms = tuple(sorted((o, c) for o, c in merged.items() if not is_zero(c)))
        object.__setattr__(self, "terms", terms)
        if isinstance(self.constant, int):
            object.__setattr__(self, "constant", Fraction(self.constant))

    def coefficients(self, vertices) -> list:
        d = dict(self.terms)
        return [d.get(v, Fraction(0)) for v in vertices]


# --- checks -----------------------------------------------------------------

def consistency_check(p: ProbabilityFunction) -> list[Violation]:
    """Compare cell sums over shared coarse outcomes of every measurement pair.

    For measurements M, M' the connected components of their cell-intersection
    graph are the minimal nonempty sets lying in both Boolean algebras.
    """
    s = p.scenario
    tol = p.tolerance
    full = (1 << s.element_count) - 1
    out = []
    ms = s.measurements
    for a in range(len(ms)):
        for b in range(a + 1, len(ms)):
            for comp_mask, cells_a, cells_b in _components(ms[a], ms[b]):
                if comp_mask == full:
                    continue
                va = simplify(sum((p.values[c] for c in cells_a), Fraction(0)))
                vb = simplify(sum((p.values[c] for c in cells_b), Fraction(0)))
                if not is_zero(va - vb, tol):
                    o = Outcome.from_mask(comp_mask)
                    out.append(Violation(
                        "consistency",
                        f"measurements {a} and {b} disagree on {s.describe(o)}: {va} vs {vb}",
                        (a, b), o, (va, vb),
                    ))
    return out


def _components(m1, m2):
    cells = list(m1.cells) + list(m2.cells)
    k1 = len(m1.cells)
    parent = list(range(len(cells)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(k1):
        for j in range(k1, len(cells)):
            if cells[i].mask & cells[j].mask:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
    groups: dict[int, list[int]] = {}
    for i in range(len(cells)):
        groups.setdefault(find(i), []).append(i)
    out = []
    for members in groups.values():
        mask = 0
        for i in members:
            if i < k1:
                mask |= cells[i].mask
        out.append((mask, [cells[i] for i in members if i < k1], [cells[i] for i in members if i >= k1]))
    out.sort(key=lambda t: Outcome.from_mask(t[0]))
    return out


def shared_components(s: Scenario):
    """``(a, b, cells_a, cells_b)`` for every proper shared component of every pair."""
    full = (1 << s.element_count) - 1
    ms = s.measurements
    for a in range(len(ms)):
        for b in range(a + 1, len(ms)):
            for mask, ca, cb in _components(ms[a], ms[b]):
                if mask != full:
                    yield a, b, ca, cb


def validate(p: ProbabilityFunction) -> list[Violation]:
    """All nonnegativity, normalization and consistency breaches; empty means ok."""
    s = p.scenario
    tol = p.tolerance
    out = []
    for o, v in p.values.items():
        if float(v) < -tol or (tol == 0.0 and not isinstance(v, float) and bool(simplify(v) < 0)):
            out.append(Violation("negative", f"P({s.describe(o)}) = {v} < 0", outcome=o, values=(v,)))
    for k, m in enumerate(s.measurements):
        total = simplify(sum((p.values[c] for c in m.cells), Fraction(0)))
        if not is_zero(total - 1, tol):
            out.append(Violation("normalization", f"measurement {k} sums to {total}", (k,), values=(total,)))
    if not any(v.kind == "normalization" for v in out):
        out.extend(consistency_check(p))
    return out


def is_valid(p: ProbabilityFunction) -> bool:
    return not validate(p)


def evaluate(f: LinearFunctional, p: ProbabilityFunction):
    if f.scenario is not None and f.scenario != p.scenario:
        raise ProbabilityError("functional and probability function live on different scenarios")
    total = f.constant
    for o, c in f.terms:
        if o not in p.values:
            raise ProbabilityError(f"functional term {o.members} is not an outcome of the table's scenario")
        total = total + c * p.values[o]
    return simplify(total)


def mix(p: ProbabilityFunction, q: ProbabilityFunction, alpha) -> ProbabilityFunction:
    """Valuewise mixture ``alpha*p + (1-alpha)*q``."""
    if p.scenario != q.scenario:
        raise ProbabilityError("cannot mix tables on different scenarios")
    return ProbabilityFunction(
        p.scenario, {o: simplify(alpha * p.values[o] + (1 - alpha) * q.values[o]) for o in p.values}
    )


@functools.lru_cache(maxsize=64)
def product_probability(p1: ProbabilityFunction, p2: ProbabilityFunction) -> ProbabilityFunction:
    """Two independent copies: ``P(A x B) = P1(A) * P2(B)``."""
    s = product_scenario(p1.scenario, p2.scenario)
    vals = {}
    k = 0
    for m1 in p1.scenario.measurements:
        for m2 in p2.scenario.measurements:
            m = s.measurements[k]
            k += 1
            n2 = p2.scenario.element_count
            for a in m1.cells:
                for b in m2.cells:
                    cell = Outcome(tuple(i1 * n2 + i2 for i1 in a.members for i2 in b.members))
                    if cell not in vals:
                        vals[cell] = simplify(p1.values[a] * p2.values[b])
            assert all(c in vals for c in m.cells)
    return ProbabilityFunction(s, vals, tolerance=max(p1.tolerance, p2.tolerance))


def power_probability(p: ProbabilityFunction, copies: int) -> ProbabilityFunction:
    if copies < 1:
        raise ProbabilityError("copies must be >= 1")
    out = p
    for _ in range(copies - 1):
        out = product_probability(out, p)
    assert out.scenario == power_scenario(p.scenario, copies)
    return out


# --- named boxes ------------------------------------------------------------

CHSH_CONTEXTS = ((0, 2), (0, 3), (1, 2), (1, 3))
GYNI_CONTEXTS = tuple((x1, 2 + x2, 4 + x3) for x1 in (0, 1) for x2 in (0, 1) for x3 in (0, 1))


def _is_chsh(s: Scenario) -> bool:
    return s.contexts == CHSH_CONTEXTS and s.n_boxes == 4 and s.element_count == 16


def _is_gyni3(s: Scenario) -> bool:
    return s.contexts == GYNI_CONTEXTS and s.n_boxes == 6 and s.element_count == 64


def _cycle_length(s: Scenario) -> int | None:
    if s.contexts is None or s.n_boxes is None or s.n_boxes < 3:
        return None
    n = s.n_boxes
    want = tuple(tuple(sorted((i, (i + 1) % n))) for i in range(n))
    return n if s.contexts == want else None


_CALL_RE = re.compile(r"^\s*([a-zA-Z_][\w-]*)\s*(?:\((.*)\))?\s*$")


def parse_call(text: str) -> tuple[str, list[str]]:
    """``"isotropic(1/2)"`` -> ``("isotropic", ["1/2"])``."""
    m = _CALL_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse {text!r}")
    args = [a.strip() for a in m.group(2).split(",")] if m.group(2) else []
    return m.group(1).lower().replace("-", "_"), [a for a in args if a]


def pr_value(x: int, y: int, a: int, b: int) -> Fraction:
    return Fraction(1, 2) if (a ^ b) == (x & y) else Fraction(0)


def preset_box(name: str, s: Scenario, param=None) -> ProbabilityFunction:
    """Named tables: pr, isotropic(v), uniform, deterministic(gamma), uniform_cycle(p)."""
    key, args = parse_call(name) if isinstance(name, str) else (name, [])
    if param is None and args:
        param = args[0]
    if key == "pr":
        return isotropic_box(s, Fraction(1))
    if key == "isotropic":
        if param is None:
            raise ProbabilityError("isotropic needs a visibility parameter")
        return isotropic_box(s, _param(param))
    if key == "uniform":
        n = s.element_count
        return JointDistribution(tuple(Fraction(1, n) for _ in range(n))).marginal(s)
    if key == "deterministic":
        if param is None:
            raise ProbabilityError("deterministic needs an element (label or index)")
        return deterministic_box(s, param)
    if key == "uniform_cycle":
        if param is None:
            raise ProbabilityError("uniform_cycle needs a parameter p")
        return uniform_cycle_box(s, _param(param))
    raise ProbabilityError(f"unknown preset box {name!r}")


def _param(v):
    if isinstance(v, str):
        from .numeric import parse_number
        return parse_number(v)
    return v


def isotropic_box(s: Scenario, v) -> ProbabilityFunction:
    """``v * PR + (1 - v) * uniform`` on the CHSH scenario."""
    if not _is_chsh(s):
        raise ProbabilityError("pr/isotropic boxes require the chsh scenario")
    if float(v) < 0 or float(v) > 1:
        raise ProbabilityError("isotropic visibility must lie in [0, 1]")
    vals = {}
    for x in (0, 1):
        for y in (0, 1):
            for a in (0, 1):
                for b in (0, 1):
                    cell = s.cell((x, 2 + y), f"{a}{b}")
                    vals[cell] = simplify(v * pr_value(x, y, a, b) + (1 - v) * Fraction(1, 4))
    return ProbabilityFunction(s, vals)


def deterministic_box(s: Scenario, gamma) -> ProbabilityFunction:
    if isinstance(gamma, str) and s.element_labels is not None and gamma in s.element_labels:
        idx = s.element_labels.index(gamma)
    else:
        try:
            idx = int(gamma)
        except (TypeError, ValueError):
            raise ProbabilityError(f"unknown element {gamma!r}") from None
    if not 0 <= idx < s.element_count:
        raise ProbabilityError(f"element {gamma!r} out of range")
    return JointDistribution.point_mass(s.element_count, idx).marginal(s)


def uniform_cycle_box(s: Scenario, p) -> ProbabilityFunction:
    """Each 'box full' event gets ``p``; neighbours never both full; rest ``1-2p``."""
    n = _cycle_length(s)
    if n is None:
        raise ProbabilityError("uniform_cycle requires a cycle scenario")
    if float(p) < 0 or float(p) > 0.5:
        raise ProbabilityError("uniform_cycle parameter must lie in [0, 1/2]")
    table = {"10": p, "01": p, "00": simplify(1 - 2 * p), "11": Fraction(0)}
    vals = {}
    for i in range(n):
        ctx = (i, (i + 1) % n)
        for bits, v in table.items():
            try:
                cell = s.cell(ctx, bits)
            except ScenarioError:
                if bits == "11" or is_zero(v):
                    continue
                raise
            vals[cell] = v
    return ProbabilityFunction(s, vals)


# --- named functionals ------------------------------------------------------

GYNI_PROMISE = ((0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0))


def gyni_winning_events(s: Scenario) -> list[Outcome]:
    """Cells where every party outputs its right neighbour's input."""
    if not _is_gyni3(s):
        raise ProbabilityError("gyni events require the gyni3 scenario")
    out = []
    for x in GYNI_PROMISE:
        a = (x[1], x[2], x[0])
        out.append(s.cell((x[0], 2 + x[1], 4 + x[2]), "".join(map(str, a))))
    return out


def kcbs_events(s: Scenario) -> list[Outcome]:
    """Per context ``{i, i+1}`` the cell with box ``i`` full and box ``i+1`` empty."""
    n = _cycle_length(s)
    if n is None:
        raise ProbabilityError("kcbs requires a cycle scenario")
    return [s.cell((i, (i + 1) % n), "10") for i in range(n)]


def preset_functional(name: str, s: Scenario) -> LinearFunctional:
    key, _ = parse_call(name)
    if key == "chsh":
        if not _is_chsh(s):
            raise ProbabilityError("chsh functional requires the chsh scenario")
        terms = []
        for x in (0, 1):
            for y in (0, 1):
                sign = -1 if x & y else 1
                for a in (0, 1):
                    for b in (0, 1):
                        terms.append((s.cell((x, 2 + y), f"{a}{b}"), sign * (1 if a == b else -1)))
        return LinearFunctional(tuple(terms), Fraction(0), "chsh", s)
    if key == "kcbs":
        return LinearFunctional(tuple((o, 1) for o in kcbs_events(s)), Fraction(0), "kcbs", s)
    if key in ("gyni", "gyni_payoff"):
        return LinearFunctional(
            tuple((o, Fraction(1, 4)) for o in gyni_winning_events(s)), Fraction(0), "gyni_payoff", s
        )
    raise ProbabilityError(f"unknown preset functional {name!r}")


def functional_from_vector(s: Scenario, coeffs: Iterable, constant=0, name: str = "") -> LinearFunctional:
    return LinearFunctional(tuple(zip(s.fine_outcomes(), coeffs)), constant, name, s)
