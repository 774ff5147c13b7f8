"""Joint quantum measures obeying the Sorkin sum rule.

A set function with vanishing third-order interference is fixed by its values
on singletons and pairs:

    mu(A) = sum_{i in A} sing_i + sum_{i<j in A} q_ij,   q_ij = pair_ij - sing_i - sing_j

so the LP lives on ``(sing, pair)`` only.  Nonnegativity of all ``2^n`` subset
values is enforced lazily: a separation oracle finds the most negative subset
of the current solution and the subset is added as a row.  Floating-point
solves drive the loop; the final point is recomputed exactly and verified with
integer arithmetic before it is reported as feasible.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import kernels
from . import lp as lpmod
from .limits import Limits, ResourceLimitError, get_limits
from .numeric import as_fraction
from .probability import (
    JointDistribution,
    LinearFunctional,
    ProbabilityError,
    ProbabilityFunction,
)
from .scenario import Outcome, Scenario, ScenarioError

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
HEURISTIC = "heuristically_feasible"

EXHAUSTIVE = "exhaustive"
BRANCH_AND_BOUND = "branch_and_bound"
HEURISTIC_REGIME = "heuristic"

_FLOAT_CUT = 1e-9
_CUTS_PER_ROUND = 64


# --- pair measures ----------------------------------------------------------

def pair_index(n: int, i: int, j: int) -> int:
    """Position of the unordered pair ``{i, j}`` in row-major ``i < j`` order."""
    if i > j:
        i, j = j, i
    if not 0 <= i < j < n:
        raise IndexError(f"pair ({i}, {j}) out of range for n={n}")
    return i * (2 * n - i - 1) // 2 + (j - i - 1)


@dataclass(frozen=True)
class PairMeasure:
    """Singleton and pair values; every other subset value follows by extension."""

    sing: tuple
    pair: tuple

    def __post_init__(self):
        n = len(self.sing)
        if len(self.pair) != n * (n - 1) // 2:
            raise ValueError(f"expected {n * (n - 1) // 2} pair values for {n} elements, got {len(self.pair)}")
        object.__setattr__(self, "sing", tuple(self.sing))
        object.__setattr__(self, "pair", tuple(self.pair))

    @property
    def n(self) -> int:
        return len(self.sing)

    def pair_value(self, i: int, j: int):
        return self.pair[pair_index(self.n, i, j)]

    def q(self, i: int, j: int):
        return self.pair_value(i, j) - self.sing[i] - self.sing[j]

    def q_matrix(self, dtype=object) -> np.ndarray:
        n = self.n
        Q = np.zeros((n, n), dtype=dtype)
        k = 0
        for i in range(n):
            for j in range(i + 1, n):
                Q[i, j] = Q[j, i] = self.pair[k] - self.sing[i] - self.sing[j]
                k += 1
        return Q

    def as_vector(self) -> tuple:
        return self.sing + self.pair

    @classmethod
    def from_vector(cls, n: int, x: Sequence) -> "PairMeasure":
        return cls(tuple(x[:n]), tuple(x[n:n + n * (n - 1) // 2]))

    @classmethod
    def additive(cls, weights: Sequence) -> "PairMeasure":
        """Classical measure: ``pair_ij = w_i + w_j`` (all ``q`` vanish)."""
        n = len(weights)
        return cls(tuple(weights), tuple(weights[i] + weights[j] for i in range(n) for j in range(i + 1, n)))


def _members(A, n: int) -> tuple[int, ...]:
    if isinstance(A, Outcome):
        m = A.members
    elif isinstance(A, int):
        m = tuple(i for i in range(max(n, A.bit_length())) if A >> i & 1)
    else:
        m = tuple(sorted(set(int(i) for i in A)))
    if m and (m[0] < 0 or m[-1] >= n):
        raise IndexError(f"subset {m} out of range for n={n}")
    return m


def mu_eval(pm: PairMeasure, A) -> object:
    """Extended measure of ``A`` (an Outcome, index iterable or bitmask)."""
    m = _members(A, pm.n)
    total = Fraction(0) if not any(isinstance(v, float) for v in pm.sing) else 0.0
    for i in m:
        total += pm.sing[i]
    for a in range(len(m)):
        for b in range(a + 1, len(m)):
            i, j = m[a], m[b]
            total += pm.pair[pair_index(pm.n, i, j)] - pm.sing[i] - pm.sing[j]
    return total


def _accessor(m):
    if isinstance(m, PairMeasure):
        return lambda mask: mu_eval(m, mask)
    if callable(m):
        return m
    if isinstance(m, Mapping):
        def get(mask):
            for key in (mask, Outcome.from_mask(mask), frozenset(Outcome.from_mask(mask).members)):
                if key in m:
                    return m[key]
            raise KeyError(f"subset {Outcome.from_mask(mask).members} missing from the table")
        return get
    return lambda mask: m[mask]


def _mask(A) -> int:
    if isinstance(A, int):
        return A
    if isinstance(A, Outcome):
        return A.mask
    mask = 0
    for i in A:
        mask |= 1 << int(i)
    return mask


def sorkin_residual(m, A, B, C):
    """Third-order interference of pairwise disjoint ``A, B, C`` under ``m``.

    ``m`` is a PairMeasure, a callable on bitmasks, a mapping keyed by bitmask,
    Outcome or frozenset, or a sequence indexed by bitmask.
    """
    a, b, c = _mask(A), _mask(B), _mask(C)
    if a & b or b & c or a & c:
        raise ValueError("sorkin_residual needs pairwise disjoint sets")
    mu = _accessor(m)
    return mu(a) + mu(b) + mu(c) - mu(a | b) - mu(b | c) - mu(c | a) + mu(a | b | c)


# --- subset minimization ----------------------------------------------------

def all_subset_values(sing, Q) -> np.ndarray:
    """``mu`` of every subset, indexed by bitmask (dynamic programming).

    Works with float64, int64 or object arrays; ``Q`` has zero diagonal.
    """
    sing = np.asarray(sing)
    Q = np.asarray(Q)
    n = len(sing)
    dtype = np.result_type(sing.dtype, Q.dtype)
    mu = np.zeros(1 << n, dtype=dtype)
    T = np.zeros(1 << n, dtype=dtype)
    for k in range(n):
        size = 1 << k
        T[0] = 0
        for j in range(k):
            s = 1 << j
            T[s:2 * s] = T[:s] + Q[k, j]
        mu[size:2 * size] = mu[:size] + sing[k] + T[:size]
    return mu


def _heuristic_min(g: np.ndarray, Q: np.ndarray, restarts: int = 32, seed: int = 0):
    """Best-improvement local search over single flips with seeded restarts."""
    n = len(g)
    rng = np.random.default_rng(seed)
    best_val, best_mask = 0.0, 0
    for r in range(restarts):
        x = np.zeros(n, dtype=bool) if r == 0 else rng.random(n) < 0.5
        while True:
            d = g + Q @ x  # change from adding i; removing a member changes mu by -d_i
            delta = np.where(x, -d, d)
            i = int(np.argmin(delta))
            if delta[i] >= -1e-12:
                break
            x[i] = not x[i]
        val = float(g @ x + 0.5 * x @ Q @ x)
        mask = sum(1 << int(i) for i in np.flatnonzero(x))
        if val < best_val or (val == best_val and mask < best_mask):
            best_val, best_mask = val, mask
    return best_val, best_mask


@dataclass(frozen=True)
class Separation:
    subset: Outcome | None   # most negative subset, None when mu >= 0 everywhere checked
    value: object
    regime: str
    exact: bool


def _int_scaled(pm: PairMeasure):
    """``(L, sing*L, Q*L)`` as Python ints, ``L`` the common denominator."""
    vals = [as_fraction(v) for v in pm.sing + pm.pair]
    L = 1
    for v in vals:
        L = math.lcm(L, v.denominator)
    n = pm.n
    sing = [int(as_fraction(v) * L) for v in pm.sing]
    Q = [[0] * n for _ in range(n)]
    k = 0
    for i in range(n):
        for j in range(i + 1, n):
            Q[i][j] = Q[j][i] = int(as_fraction(pm.pair[k]) * L) - sing[i] - sing[j]
            k += 1
    return L, sing, Q


def _fits_int64(sing, Q) -> bool:
    n = len(sing)
    bound = sum(abs(v) for v in sing) + sum(abs(Q[i][j]) for i in range(n) for j in range(i + 1, n))
    return 2 * bound < 2**62


def separation_oracle(S: Scenario | None, pm: PairMeasure, regime: str = EXHAUSTIVE,
                      limits: Limits | None = None) -> Separation:
    """Most negative ``mu(A)`` over all subsets (or a heuristic candidate).

    Exact regimes work in integer arithmetic when ``pm`` is rational and in
    float64 otherwise.
    """
    lim = limits or get_limits()
    n = pm.n
    if S is not None and S.element_count != n:
        raise ScenarioError("pair measure size does not match the scenario")
    if regime == EXHAUSTIVE and n > lim.qm_exhaustive:
        raise ResourceLimitError(f"exhaustive separation needs |Xi| <= {lim.qm_exhaustive}, got {n}")
    if regime == BRANCH_AND_BOUND and n > 63:
        raise ResourceLimitError("branch-and-bound separation supports |Xi| <= 63")
    if regime not in (EXHAUSTIVE, BRANCH_AND_BOUND, HEURISTIC_REGIME):
        raise ValueError(f"unknown separation regime {regime!r}")
    is_float = any(isinstance(v, float) for v in pm.sing + pm.pair)
    if regime == HEURISTIC_REGIME or is_float:
        g = np.array([float(v) for v in pm.sing])
        Q = np.array(pm.q_matrix(dtype=object), dtype=float)
        if regime == HEURISTIC_REGIME:
            val, mask = _heuristic_min(g, Q)
        elif regime == EXHAUSTIVE and n <= 20:
            mu = all_subset_values(g, Q)
            mask = int(np.lexsort((np.arange(len(mu)), mu))[0])
            val = float(mu[mask])
        elif regime == EXHAUSTIVE:
            val, mask = kernels.qpb_gray(g, np.ascontiguousarray(Q))
        else:
            val, mask = kernels.qpb_branch_and_bound(g, np.ascontiguousarray(Q))
        exact = False
    else:
        L, sing, Q = _int_scaled(pm)
        val_i, mask = _exact_min(sing, Q, regime)
        val = Fraction(val_i, L)
        exact = True
    if val >= 0:
        return Separation(None, 0 if exact else 0.0, regime, exact)
    return Separation(Outcome.from_mask(mask), val, regime, exact)


def _exact_min(sing, Q, regime):
    n = len(sing)
    if _fits_int64(sing, Q):
        g = np.array(sing, dtype=np.int64)
        Qa = np.array(Q, dtype=np.int64).reshape(n, n)
        if regime == EXHAUSTIVE and n <= 20:
            mu = all_subset_values(g, Qa)
            mask = int(np.lexsort((np.arange(len(mu)), mu))[0])
            return int(mu[mask]), mask
        if regime == EXHAUSTIVE:
            return kernels.qpb_gray(g, np.ascontiguousarray(Qa))
        return kernels.qpb_branch_and_bound(g, np.ascontiguousarray(Qa))
    g = [int(v) for v in sing]
    if regime == EXHAUSTIVE and n <= 20:
        mu = all_subset_values(np.array(g, dtype=object), np.array(Q, dtype=object))
        best = min(range(len(mu)), key=lambda m: (mu[m], m))
        return int(mu[best]), best
    from . import _pykernels
    fn = _pykernels.qpb_gray if regime == EXHAUSTIVE else _pykernels.qpb_branch_and_bound
    return fn(np.array(g, dtype=object), Q)


def _violated_float(g: np.ndarray, Q: np.ndarray, regime: str, k: int) -> list[int]:
    """Masks of up to ``k`` subsets with ``mu < -1e-9`` (most negative first)."""
    if regime == EXHAUSTIVE and len(g) <= 20:
        mu = all_subset_values(g, Q)
        bad = np.flatnonzero(mu < -_FLOAT_CUT)
        if bad.size == 0:
            return []
        if bad.size > k:
            part = np.argpartition(mu[bad], k)[:k]
            bad = bad[part]
        order = np.lexsort((bad, mu[bad]))
        return [int(b) for b in bad[order]]
    if regime == EXHAUSTIVE:
        val, mask = kernels.qpb_gray(g, np.ascontiguousarray(Q))
    elif regime == BRANCH_AND_BOUND:
        val, mask = kernels.qpb_branch_and_bound(g, np.ascontiguousarray(Q))
    else:
        val, mask = _heuristic_min(g, Q)
    masks = [mask] if val < -_FLOAT_CUT else []
    if regime != HEURISTIC_REGIME:
        hv, hm = _heuristic_min(g, Q, restarts=8)
        if hv < -_FLOAT_CUT and hm not in masks:
            masks.append(hm)
    return masks


def _exact_violations(pm: PairMeasure, regime: str, k: int) -> list[int]:
    L, sing, Q = _int_scaled(pm)
    n = pm.n
    if regime == EXHAUSTIVE and n <= 20:
        if _fits_int64(sing, Q):
            mu = all_subset_values(np.array(sing, dtype=np.int64), np.array(Q, dtype=np.int64))
        else:
            mu = all_subset_values(np.array(sing, dtype=object), np.array(Q, dtype=object))
        bad = [int(b) for b in np.flatnonzero(mu < 0)]
        bad.sort(key=lambda m: (mu[m], m))
        return bad[:k]
    val, mask = _exact_min(sing, Q, regime)
    return [mask] if val < 0 else []


# --- LP construction --------------------------------------------------------

def _mu_row(n: int, members: Sequence[int]) -> dict:
    """Coefficients of ``mu(A)`` over ``x = (sing, pair)``."""
    row = {}
    size = len(members)
    if size == 1:
        return {members[0]: 1}
    for i in members:
        if size != 2:
            row[i] = -(size - 2)
    for a in range(size):
        for b in range(a + 1, size):
            row[n + pair_index(n, members[a], members[b])] = 1
    return row


def _cross_row(n: int, A: Sequence[int], B: Sequence[int]) -> dict:
    """``sum_{i in A, j in B} q_ij`` = interference between disjoint blocks."""
    row: dict[int, int] = {}
    for i in A:
        row[i] = row.get(i, 0) - len(B)
    for j in B:
        row[j] = row.get(j, 0) - len(A)
    for i in A:
        for j in B:
            k = n + pair_index(n, i, j)
            row[k] = row.get(k, 0) + 1
    return {k: v for k, v in row.items() if v}


@dataclass
class _Model:
    S: Scenario
    lp: lpmod.LinearProgram
    eq_labels: list
    le_labels: list
    cut_masks: set = field(default_factory=set)
    session: object = None

    def add_cut(self, mask: int):
        if mask in self.cut_masks or mask == 0:
            return False
        self.cut_masks.add(mask)
        members = Outcome.from_mask(mask).members
        if len(members) <= 2:
            return False  # already a variable bound
        row = {k: -v for k, v in _mu_row(self.S.element_count, members).items()}
        self.lp.add_inequality(row, 0)
        if self.session is not None:
            self.session.add_inequality(row, 0)
        self.le_labels.append(f"mu({_name(self.S, mask)}) >= 0")
        return True


def _name(S: Scenario, mask: int) -> str:
    return "{" + ",".join(map(str, Outcome.from_mask(mask).members)) + "}"


def _base_model(S: Scenario, p: ProbabilityFunction | None) -> _Model:
    n = S.element_count
    nv = n + n * (n - 1) // 2
    prog = lpmod.LinearProgram(nv, lower_bounds=[0] * nv)
    eq, le = [], []
    prog.add_equality(_mu_row(n, tuple(range(n))) if n > 1 else {0: 1}, 1)
    eq.append("mu(Xi) = 1")
    for k, m in enumerate(S.measurements):
        cells = m.cells
        for a in range(len(cells)):
            for b in range(a + 1, len(cells)):
                row = _cross_row(n, cells[a].members, cells[b].members)
                if row:
                    prog.add_equality(row, 0)
                    eq.append(f"additivity m{k}: {S.describe(cells[a])} | {S.describe(cells[b])}")
    for o in S.fine_outcomes():
        if p is not None:
            prog.add_equality(_mu_row(n, o.members), _rational(p.values[o]))
            eq.append(f"mu({S.describe(o)}) = P")
        elif len(o.members) > 2:
            prog.add_inequality({k: -v for k, v in _mu_row(n, o.members).items()}, 0)
            le.append(f"mu({S.describe(o)}) >= 0")
    model = _Model(S, prog, eq, le)
    if p is None:
        model.cut_masks.update(o.mask for o in S.fine_outcomes())
    return model


def _rational(v) -> Fraction:
    if isinstance(v, float):
        return Fraction(repr(v))
    try:
        return as_fraction(v)
    except TypeError:
        raise ProbabilityError(f"value {v} is not rational; LP checks need rational or decimal data") from None


# --- results ----------------------------------------------------------------

@dataclass(frozen=True)
class QMResult:
    status: str
    witness: PairMeasure | None = None
    certificate: lpmod.FarkasCertificate | None = None
    unverified_note: str | None = None
    regime: str = EXHAUSTIVE
    iterations: int = 0
    cuts: int = 0
    row_labels: tuple = ()

    @property
    def feasible(self) -> bool:
        return self.status in (FEASIBLE, HEURISTIC)

    def certificate_terms(self) -> list[tuple[str, Fraction]]:
        if self.certificate is None:
            return []
        mult = list(self.certificate.equalities) + list(self.certificate.inequalities)
        return [(lab, m) for lab, m in zip(self.row_labels, mult) if m]


@dataclass(frozen=True)
class QMOptResult:
    value: Fraction
    probability: ProbabilityFunction
    witness: PairMeasure
    iterations: int = 0
    cuts: int = 0


def _regime_for(n: int, method: str, lim: Limits) -> str:
    if method == "enumerate":
        if n > lim.qm_enumerate:
            raise ResourceLimitError(f"enumerate needs |Xi| <= {lim.qm_enumerate}, got {n}; use rowgen")
        return EXHAUSTIVE
    if method != "rowgen":
        raise ValueError(f"unknown method {method!r}; expected enumerate or rowgen")
    if n <= lim.qm_enumerate:
        return EXHAUSTIVE
    if n <= lim.qm_exact:
        return BRANCH_AND_BOUND
    return HEURISTIC_REGIME


def _solve_rowgen(model: _Model, regime: str, lim: Limits):
    """Cutting-plane loop; returns ``(exact LPResult, iterations)``."""
    n = model.S.element_count
    iters = 0
    if lpmod.HAVE_HIGHS:
        model.session = lpmod.FloatSession(model.lp)
    while True:
        iters += 1
        if iters > lim.rowgen_iterations:
            raise ResourceLimitError(f"row generation did not converge within {lim.rowgen_iterations} rounds")
        status, x = (model.session.solve() if model.session is not None else (None, None))
        if status == lpmod.OPTIMAL:
            g = x[:n]
            pm = PairMeasure.from_vector(n, list(x))
            Q = np.array(pm.q_matrix(dtype=object), dtype=float)
            masks = _violated_float(np.asarray(g, dtype=float), Q, regime, _CUTS_PER_ROUND)
            if any([model.add_cut(m) for m in masks]):
                continue
        elif status == lpmod.INFEASIBLE:
            res = lpmod.solve(model.lp)
            if res.status == lpmod.INFEASIBLE:
                return res, iters
        # float loop converged (or was inconclusive): confirm exactly, first
        # at the warm basis so the exact vertex is the one just separated
        res = model.session.exact(model.lp) if model.session is not None else None
        res = lpmod._check(model.lp, res) if res is not None else lpmod.solve(model.lp)
        if res.status != lpmod.OPTIMAL:
            return res, iters
        pm = PairMeasure.from_vector(n, res.primal)
        if regime == HEURISTIC_REGIME:
            return res, iters
        masks = _exact_violations(pm, regime, _CUTS_PER_ROUND)
        if not masks:
            return res, iters
        if not any([model.add_cut(m) for m in masks]):
            raise lpmod.LPVerificationError("exact separation returned a subset already in the model")


def qm_feasible(S: Scenario, P: ProbabilityFunction, method: str = "enumerate",
                limits: Limits | None = None) -> QMResult:
    """Does ``P`` extend to a nonnegative measure obeying the Sorkin sum rule?

    ``enumerate`` imposes ``mu(A) >= 0`` for all ``2^|Xi|`` subsets; ``rowgen``
    chooses exhaustive, branch-and-bound or heuristic separation by size.
    Both add subset rows lazily and differ only in the separation regime.
    """
    if P.scenario != S:
        raise ProbabilityError("probability function belongs to a different scenario")
    lim = limits or get_limits()
    regime = _regime_for(S.element_count, method, lim)
    model = _base_model(S, P)
    res, iters = _solve_rowgen(model, regime, lim)
    labels = tuple(model.eq_labels + model.le_labels)
    if res.status == lpmod.INFEASIBLE:
        return QMResult(INFEASIBLE, certificate=res.certificate, regime=regime, iterations=iters,
                        cuts=len(model.le_labels), row_labels=labels)
    pm = PairMeasure.from_vector(S.element_count, res.primal)
    if regime == HEURISTIC_REGIME:
        return QMResult(HEURISTIC, pm, None,
                        f"|Xi|={S.element_count} exceeds the exact-separation cap {lim.qm_exact}; "
                        "nonnegativity checked by local search only",
                        regime, iters, len(model.le_labels), labels)
    verify_witness(S, P, pm, regime, lim)
    return QMResult(FEASIBLE, pm, None, None, regime, iters, len(model.le_labels), labels)


def verify_witness(S: Scenario, P: ProbabilityFunction | None, pm: PairMeasure,
                   regime: str = EXHAUSTIVE, limits: Limits | None = None) -> None:
    """Raise unless ``pm`` matches ``P`` on every coarse outcome and ``mu >= 0``."""
    n = S.element_count
    if pm.n != n:
        raise lpmod.LPVerificationError("witness size does not match the scenario")
    for k, m in enumerate(S.measurements):
        cells = m.cells
        if len(cells) <= 12:
            for sel in range(1 << len(cells)):
                members = [i for c, cell in enumerate(cells) if sel >> c & 1 for i in cell.members]
                want = sum((P.values[cell] for c, cell in enumerate(cells) if sel >> c & 1), Fraction(0)) \
                    if P is not None else None
                got = mu_eval(pm, members)
                if want is not None and got != _rational(want):
                    raise lpmod.LPVerificationError(f"mu differs from P on a coarse outcome of measurement {k}")
                if P is None and sel == (1 << len(cells)) - 1 and got != 1:
                    raise lpmod.LPVerificationError("mu(Xi) != 1")
        else:
            for a, b in itertools.combinations(cells, 2):
                if sum(pm.q(i, j) for i in a.members for j in b.members) != 0:
                    raise lpmod.LPVerificationError(f"interference between cells of measurement {k}")
            for cell in cells:
                if P is not None and mu_eval(pm, cell) != _rational(P.values[cell]):
                    raise lpmod.LPVerificationError("mu differs from P on a cell")
    sep = separation_oracle(S, pm, regime, limits)
    if sep.subset is not None:
        raise lpmod.LPVerificationError(f"mu({sep.subset.members}) = {sep.value} < 0")


def additive_measure(joint: JointDistribution) -> PairMeasure:
    return PairMeasure.additive(tuple(joint.weights))


def probability_from_measure(S: Scenario, pm: PairMeasure) -> ProbabilityFunction:
    return ProbabilityFunction(S, {o: mu_eval(pm, o) for o in S.fine_outcomes()})


def qm_optimize(S: Scenario, f: LinearFunctional, limits: Limits | None = None) -> QMOptResult:
    """Maximum of ``f`` over tables that admit a joint quantum measure."""
    lim = limits or get_limits()
    n = S.element_count
    if n > lim.qm_enumerate:
        raise ResourceLimitError(f"qm_optimize needs |Xi| <= {lim.qm_enumerate}, got {n}")
    model = _base_model(S, None)
    obj: dict[int, Fraction] = {}
    fine = set(S.fine_outcomes())
    for o, c in f.terms:
        if o not in fine:
            raise ProbabilityError(f"functional term {S.describe(o)} is not an outcome of the scenario")
        for k, v in _mu_row(n, o.members).items():
            obj[k] = obj.get(k, Fraction(0)) + _rational(c) * v
    model.lp.objective = {k: v for k, v in obj.items() if v}
    res, iters = _solve_rowgen(model, EXHAUSTIVE, lim)
    if res.status != lpmod.OPTIMAL:
        raise lpmod.LPVerificationError(f"quantum-measure LP is {res.status}")
    pm = PairMeasure.from_vector(n, res.primal)
    P = probability_from_measure(S, pm)
    verify_witness(S, P, pm, EXHAUSTIVE, lim)
    value = res.objective_value + _rational(f.constant)
    return QMOptResult(value, P, pm, iters, len(model.le_labels))


def random_functional(S: Scenario, seed: int, scale: int = 100) -> LinearFunctional:
    rng = np.random.default_rng(seed)
    coeffs = rng.integers(-scale, scale + 1, size=len(S.fine_outcomes()))
    return LinearFunctional(tuple(zip(S.fine_outcomes(), (int(c) for c in coeffs))), Fraction(0),
                            f"random[{seed}]", S)


def sample_qm_vertex(S: Scenario, seed: int, limits: Limits | None = None):
    """``(P, pm)`` at the optimum of a seeded random objective."""
    r = qm_optimize(S, random_functional(S, seed), limits)
    return r.probability, r.witness


def subset_table(pm: PairMeasure) -> dict[Outcome, object]:
    """Every subset's value (small ``n`` only)."""
    n = pm.n
    if n > 16:
        raise ResourceLimitError("subset tables are limited to |Xi| <= 16")
    return {Outcome.from_mask(m): mu_eval(pm, m) for m in range(1 << n)}


def iter_subsets(n: int) -> Iterable[int]:
    return range(1 << n)
