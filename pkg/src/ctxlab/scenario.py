"""Partition scenarios: sample spaces, measurements as partitions, exclusivity.

A scenario is a finite sample space ``{0, ..., n-1}`` together with an ordered
list of measurements, each a partition of the space.  Cells of a measurement
are the fine-grained outcomes; unions of cells are coarse-grained outcomes.
Outcomes are compared by subset identity, so the same cell appearing in two
measurements is a single outcome.

Marginal ("box") scenarios are built from a number of binary boxes, the
jointly openable contexts and a support of allowed assignment strings.
"""

from __future__ import annotations

import functools
import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

STRICT = "strict"
COARSE = "coarse"
MODES = (STRICT, COARSE)

COARSE_OUTCOME_LIMIT = 20


class ScenarioError(ValueError):
    """Invalid scenario construction or outcome reference."""


def _mask_of(members: Iterable[int]) -> int:
    m = 0
    for i in members:
        m |= 1 << i
    return m


def _members_of(mask: int) -> tuple[int, ...]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


@dataclass(frozen=True, order=True)
class Outcome:
    """A subset of sample-space elements, stored sorted and duplicate-free."""

    members: tuple[int, ...]
    mask: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        members = tuple(sorted(set(int(i) for i in self.members)))
        if members and members[0] < 0:
            raise ScenarioError(f"negative element index in {members}")
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "mask", _mask_of(members))

    @classmethod
    def from_mask(cls, mask: int) -> "Outcome":
        return cls(_members_of(mask))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def isdisjoint(self, other: "Outcome") -> bool:
        return not (self.mask & other.mask)

    def union(self, other: "Outcome") -> "Outcome":
        return Outcome.from_mask(self.mask | other.mask)


@dataclass(frozen=True)
class Measurement:
    """A partition of the sample space; cells kept in lexicographic order."""

    cells: tuple[Outcome, ...]

    def __post_init__(self):
        cells = tuple(sorted(c if isinstance(c, Outcome) else Outcome(tuple(c)) for c in self.cells))
        object.__setattr__(self, "cells", cells)

    def __len__(self) -> int:
        return len(self.cells)

    def hull(self, outcome: Outcome) -> Outcome:
        """Smallest coarse outcome of this measurement containing ``outcome``."""
        m = 0
        for c in self.cells:
            if c.mask & outcome.mask:
                m |= c.mask
        return Outcome.from_mask(m)


@dataclass(frozen=True, eq=True)
class Scenario:
    element_count: int
    measurements: tuple[Measurement, ...]
    element_labels: tuple[str, ...] | None = None
    name: str = ""
    # marginal-scenario metadata: 0-based box tuples aligned with measurements
    contexts: tuple[tuple[int, ...], ...] | None = None
    n_boxes: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "measurements", tuple(self.measurements))
        if self.element_labels is not None:
            object.__setattr__(self, "element_labels", tuple(self.element_labels))
        if self.contexts is not None:
            object.__setattr__(self, "contexts", tuple(tuple(c) for c in self.contexts))
        self._validate()

    def _validate(self):
        n = self.element_count
        if not isinstance(n, int) or n < 1:
            raise ScenarioError("element_count must be a positive integer")
        if not self.measurements:
            raise ScenarioError("a scenario needs at least one measurement")
        full = (1 << n) - 1
        for k, m in enumerate(self.measurements):
            seen = 0
            for c in m.cells:
                if not c.members:
                    raise ScenarioError(f"measurement {k} has an empty cell")
                if c.members[-1] >= n:
                    raise ScenarioError(f"measurement {k} references element {c.members[-1]} >= {n}")
                if seen & c.mask:
                    raise ScenarioError(f"cells of measurement {k} overlap")
                seen |= c.mask
            if seen != full:
                raise ScenarioError(f"cells of measurement {k} do not cover the sample space")
        if self.element_labels is not None:
            if len(self.element_labels) != n:
                raise ScenarioError("element_labels must have one entry per element")
            if len(set(self.element_labels)) != n:
                raise ScenarioError("element_labels must be pairwise distinct")
        if self.contexts is not None and len(self.contexts) != len(self.measurements):
            raise ScenarioError("contexts must align with measurements")

    def __hash__(self):
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = hash((self.element_count, self.measurements, self.element_labels, self.name, self.contexts))
            object.__setattr__(self, "_hash", h)
            return h

    @property
    def full(self) -> Outcome:
        return Outcome(tuple(range(self.element_count)))

    def fine_outcomes(self) -> tuple[Outcome, ...]:
        """Deduplicated fine-grained outcomes, lexicographically ordered."""
        return _fine_outcomes(self)

    def check_outcome(self, outcome: Outcome) -> None:
        if outcome.members and outcome.members[-1] >= self.element_count:
            raise ScenarioError(f"outcome {outcome.members} out of range for |Xi|={self.element_count}")

    def cell(self, context: Sequence[int], bits: str) -> Outcome:
        """Fine outcome of a marginal scenario: 0-based context, output bits in box order."""
        if self.contexts is None:
            raise ScenarioError("scenario has no box contexts")
        ctx = tuple(sorted(context))
        if len(set(ctx)) != len(ctx):
            raise ScenarioError(f"repeated box in context {context}")
        try:
            k = self.contexts.index(ctx)
        except ValueError:
            raise ScenarioError(f"no measurement for context {[c + 1 for c in ctx]}") from None
        if len(bits) != len(ctx):
            raise ScenarioError(f"outcome {bits!r} does not match context of size {len(ctx)}")
        order = list(context)
        want = {box: bits[i] for i, box in enumerate(order)}
        members = [
            e for e, lab in enumerate(self.element_labels)
            if all(lab[box] == want[box] for box in ctx)
        ]
        if not members:
            raise ScenarioError(f"outcome {bits!r} of context {[c + 1 for c in order]} is not realized")
        out = Outcome(tuple(members))
        if out not in self.measurements[k].cells:
            raise ScenarioError("internal: cell lookup mismatch")
        return out

    def describe(self, outcome: Outcome) -> str:
        """Readable name such as ``box1=0,box3=1`` when the outcome is a box event."""
        if self.element_labels is None or not outcome.members:
            return "{" + ",".join(map(str, outcome.members)) + "}"
        labels = [self.element_labels[i] for i in outcome.members]
        nb = len(labels[0])
        fixed = [(b, labels[0][b]) for b in range(nb) if all(l[b] == labels[0][b] for l in labels)]
        expected = [
            e for e, lab in enumerate(self.element_labels) if all(lab[b] == v for b, v in fixed)
        ]
        if tuple(expected) == outcome.members:
            if not fixed:
                return "Xi"
            return ",".join(f"box{b + 1}={v}" for b, v in fixed)
        return "{" + ",".join(labels) + "}"


@functools.lru_cache(maxsize=64)
def _fine_outcomes(s: Scenario) -> tuple[Outcome, ...]:
    seen = set()
    for m in s.measurements:
        seen.update(m.cells)
    return tuple(sorted(seen))


# --- construction -----------------------------------------------------------

_SUPPORT_ALIASES = {
    "no-adjacent-ones-cyclic": "no-adjacent-ones-cyclic",
    "cyclic-no-adjacent-ones": "no-adjacent-ones-cyclic",
}


def _support_strings(n_boxes: int, support) -> list[str]:
    if isinstance(support, str):
        key = support.strip().lower()
        if key == "all":
            return ["".join(bits) for bits in itertools.product("01", repeat=n_boxes)]
        if key in _SUPPORT_ALIASES:
            out = []
            for bits in itertools.product("01", repeat=n_boxes):
                if n_boxes > 1 and any(
                    bits[i] == "1" and bits[(i + 1) % n_boxes] == "1" for i in range(n_boxes)
                ):
                    continue
                out.append("".join(bits))
            return out
        raise ScenarioError(f"unknown support {support!r}")
    strings = list(support)
    if not strings:
        raise ScenarioError("support must be nonempty")
    for s in strings:
        if len(s) != n_boxes or set(s) - {"0", "1"}:
            raise ScenarioError(f"support string {s!r} is not a {n_boxes}-bit string")
    if len(set(strings)) != len(strings):
        raise ScenarioError("support contains duplicate strings")
    return sorted(strings)


def build_marginal_scenario(n_boxes: int, contexts, support="all", name: str = "") -> Scenario:
    """Marginal scenario over ``n_boxes`` binary boxes.

    ``contexts`` are 0-based box-index collections; each yields one measurement
    whose cells group the support strings by their restriction to the context.
    Restrictions not realized by the support give no cell.
    """
    if not isinstance(n_boxes, int) or n_boxes < 1:
        raise ScenarioError("n_boxes must be a positive integer")
    strings = _support_strings(n_boxes, support)
    if not strings:
        raise ScenarioError("support must be nonempty")
    ctxs = []
    seen = set()
    for c in contexts:
        c = tuple(sorted(int(b) for b in c))
        if not c:
            raise ScenarioError("contexts must be nonempty")
        if len(set(c)) != len(c):
            raise ScenarioError(f"repeated box in context {[b + 1 for b in c]}")
        if c[0] < 0 or c[-1] >= n_boxes:
            raise ScenarioError(f"context {[b + 1 for b in c]} has a box index out of range")
        if c in seen:
            raise ScenarioError(f"duplicate context {[b + 1 for b in c]}")
        seen.add(c)
        ctxs.append(c)
    if not ctxs:
        raise ScenarioError("at least one context is required")
    measurements = []
    for c in ctxs:
        groups: dict[str, list[int]] = {}
        for e, s in enumerate(strings):
            groups.setdefault("".join(s[b] for b in c), []).append(e)
        measurements.append(Measurement(tuple(Outcome(tuple(g)) for g in groups.values())))
    return Scenario(
        element_count=len(strings),
        measurements=tuple(measurements),
        element_labels=tuple(strings),
        name=name,
        contexts=tuple(ctxs),
        n_boxes=n_boxes,
    )


def bell_scenario(parties: int, inputs: int, outputs: int = 2, name: str | None = None) -> Scenario:
    """Bell scenario: box ``k*inputs + x`` is party ``k`` measuring input ``x``."""
    if outputs != 2:
        raise ScenarioError("box scenarios have binary outputs; outputs must be 2")
    if parties < 1 or inputs < 1:
        raise ScenarioError("parties and inputs must be positive")
    contexts = [
        tuple(k * inputs + x for k, x in enumerate(xs))
        for xs in itertools.product(range(inputs), repeat=parties)
    ]
    return build_marginal_scenario(
        parties * inputs, contexts, "all", name or f"bell({parties},{inputs},{outputs})"
    )


def cycle_scenario(n: int, support="all", name: str | None = None) -> Scenario:
    if n < 3:
        raise ScenarioError("cycle scenarios need at least 3 boxes")
    contexts = [(i, (i + 1) % n) for i in range(n)]
    return build_marginal_scenario(n, contexts, support, name or f"cycle({n})")


_PRESET_RE = re.compile(r"^\s*([a-zA-Z_][\w-]*)\s*(?:\((.*)\))?\s*$")


def preset_scenario(name: str, *params) -> Scenario:
    """Named scenario: chsh, specker, pentagon, cycle(n), bell(p, m, o), gyni3.

    ``name`` may carry its parameters inline, e.g. ``"cycle(5)"``.
    """
    m = _PRESET_RE.match(name)
    if not m:
        raise ScenarioError(f"unknown preset {name!r}")
    key = m.group(1).lower()
    if m.group(2):
        params = tuple(int(p) for p in m.group(2).split(",") if p.strip()) + tuple(params)
    params = tuple(int(p) for p in params)
    if key == "chsh" and not params:
        return bell_scenario(2, 2, 2, name="chsh")
    if key == "specker" and not params:
        return cycle_scenario(3, "all", name="specker")
    if key == "pentagon" and not params:
        return cycle_scenario(5, "no-adjacent-ones-cyclic", name="pentagon")
    if key == "gyni3" and not params:
        return bell_scenario(3, 2, 2, name="gyni3")
    if key == "cycle" and len(params) == 1:
        return cycle_scenario(params[0])
    if key == "bell" and len(params) in (2, 3):
        return bell_scenario(*params)
    if key == "trivial" and not params:
        return trivial_scenario()
    raise ScenarioError(f"unknown preset {name!r} with parameters {params}")


def trivial_scenario() -> Scenario:
    """One element, one single-cell measurement: the identity for products."""
    return Scenario(1, (Measurement((Outcome((0,)),)),), name="trivial")


@functools.lru_cache(maxsize=32)
def product_scenario(s1: Scenario, s2: Scenario) -> Scenario:
    """Independent-copy product; element ``(i1, i2)`` has index ``i1*|Xi2| + i2``."""
    n2 = s2.element_count
    measurements = []
    for m1 in s1.measurements:
        for m2 in s2.measurements:
            cells = []
            for a in m1.cells:
                for b in m2.cells:
                    cells.append(Outcome(tuple(i1 * n2 + i2 for i1 in a.members for i2 in b.members)))
            measurements.append(Measurement(tuple(cells)))
    labels = None
    if s1.element_labels is not None and s2.element_labels is not None:
        labels = tuple(a + b for a in s1.element_labels for b in s2.element_labels)
    contexts = n_boxes = None
    if s1.contexts is not None and s2.contexts is not None and labels is not None:
        off = s1.n_boxes
        contexts = tuple(c1 + tuple(b + off for b in c2) for c1 in s1.contexts for c2 in s2.contexts)
        n_boxes = s1.n_boxes + s2.n_boxes
    name = f"{s1.name}x{s2.name}" if s1.name and s2.name else ""
    return Scenario(s1.element_count * n2, tuple(measurements), labels, name, contexts, n_boxes)


def power_scenario(s: Scenario, copies: int) -> Scenario:
    if copies < 1:
        raise ScenarioError("copies must be >= 1")
    out = s
    for _ in range(copies - 1):
        out = product_scenario(out, s)
    return out


def coarse_outcomes(m: Measurement, limit: int = COARSE_OUTCOME_LIMIT) -> list[Outcome]:
    """All ``2**len(cells)`` unions of cells, lexicographically ordered."""
    k = len(m.cells)
    if k > limit:
        raise ScenarioError(f"measurement has {k} cells; coarse algebra limited to {limit}")
    masks = []
    for sel in range(1 << k):
        u = 0
        for i in range(k):
            if sel >> i & 1:
                u |= m.cells[i].mask
        masks.append(u)
    return sorted(Outcome.from_mask(u) for u in masks)


# --- exclusivity ------------------------------------------------------------

def _check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ScenarioError(f"exclusivity mode must be one of {MODES}, got {mode!r}")
    return mode


def exclusive(s: Scenario, a: Outcome, b: Outcome, mode: str = COARSE) -> bool:
    """Whether ``a`` and ``b`` are exclusive in ``s``.

    strict: disjoint and both cells of one measurement.
    coarse: some measurement has disjoint hulls for ``a`` and ``b``.
    """
    _check_mode(mode)
    s.check_outcome(a)
    s.check_outcome(b)
    if mode == STRICT:
        if a.mask & b.mask:
            return False
        return any(a in m.cells and b in m.cells for m in s.measurements)
    return any(not (m.hull(a).mask & m.hull(b).mask) for m in s.measurements)


@dataclass(frozen=True)
class ExclusivityGraph:
    vertices: tuple[Outcome, ...]
    edges: frozenset
    mode: str
    adjacency: tuple[int, ...] = field(compare=False, repr=False)

    @property
    def n(self) -> int:
        return len(self.vertices)

    def index(self, outcome: Outcome) -> int:
        return _vertex_index(self)[outcome]

    def adjacent(self, i: int, j: int) -> bool:
        return bool(self.adjacency[i] >> j & 1)

    def is_clique(self, vs: Iterable[int]) -> bool:
        vs = list(vs)
        return all(self.adjacent(i, j) for i, j in itertools.combinations(vs, 2))

    def adjacency_words(self) -> np.ndarray:
        """Adjacency as a ``(n, words)`` uint64 bitset array for the kernels."""
        words = max(1, (self.n + 63) // 64)
        out = np.zeros((self.n, words), dtype=np.uint64)
        for i, row in enumerate(self.adjacency):
            for w in range(words):
                out[i, w] = (row >> (64 * w)) & 0xFFFFFFFFFFFFFFFF
        return out

    def induced(self, vs: Sequence[int]) -> "ExclusivityGraph":
        vs = list(vs)
        pos = {v: k for k, v in enumerate(vs)}
        adj = []
        for v in vs:
            row = 0
            for u in vs:
                if self.adjacent(v, u):
                    row |= 1 << pos[u]
            adj.append(row)
        edges = frozenset((pos[i], pos[j]) for i, j in self.edges if i in pos and j in pos)
        return ExclusivityGraph(tuple(self.vertices[v] for v in vs), edges, self.mode, tuple(adj))


@functools.lru_cache(maxsize=64)
def _vertex_index(g: ExclusivityGraph) -> dict:
    return {v: k for k, v in enumerate(g.vertices)}


def graph_from_adjacency(n: int, edges: Iterable[tuple[int, int]], mode: str = COARSE) -> ExclusivityGraph:
    """Abstract graph on ``n`` vertices (vertex ``i`` labelled by outcome ``{i}``)."""
    adj = [0] * n
    es = set()
    for i, j in edges:
        if i == j:
            raise ScenarioError("self-loops are not allowed")
        i, j = min(i, j), max(i, j)
        adj[i] |= 1 << j
        adj[j] |= 1 << i
        es.add((i, j))
    return ExclusivityGraph(tuple(Outcome((i,)) for i in range(n)), frozenset(es), mode, tuple(adj))


@functools.lru_cache(maxsize=32)
def exclusivity_graph(s: Scenario, mode: str = COARSE) -> ExclusivityGraph:
    _check_mode(mode)
    verts = s.fine_outcomes()
    pos = {v: k for k, v in enumerate(verts)}
    n = len(verts)
    adj = [0] * n
    if mode == STRICT:
        for m in s.measurements:
            ids = [pos[c] for c in m.cells]
            group = _mask_of(ids)
            for i in ids:
                adj[i] |= group & ~(1 << i)
    else:
        for m in s.measurements:
            # hull of each vertex as a bitmask over this measurement's cells
            cellsets = []
            for v in verts:
                cs = 0
                for k, c in enumerate(m.cells):
                    if c.mask & v.mask:
                        cs |= 1 << k
                cellsets.append(cs)
            by_set: dict[int, int] = {}
            for i, cs in enumerate(cellsets):
                by_set[cs] = by_set.get(cs, 0) | (1 << i)
            items = list(by_set.items())
            for cs, vmask in items:
                nb = 0
                for cs2, vmask2 in items:
                    if not (cs & cs2):
                        nb |= vmask2
                rest = vmask
                while rest:
                    low = rest & -rest
                    i = low.bit_length() - 1
                    adj[i] |= nb & ~low
                    rest ^= low
    edges = frozenset(
        (i, j) for i in range(n) for j in _members_of(adj[i] >> (i + 1) << (i + 1))
    )
    return ExclusivityGraph(tuple(verts), edges, mode, tuple(adj))
