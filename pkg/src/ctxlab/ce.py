"""Consistent Exclusivity, non-contextuality and optimization over the three sets.

CE is decided on maximal cliques only: probabilities are nonnegative, so any
set of pairwise exclusive outcomes is dominated by a maximal clique containing
it.  The CE check streams cliques through the kernel and keeps the heaviest
one; nothing is materialized, so product graphs with millions of cliques stay
cheap in memory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import lp as lpmod
from .cliques import max_weight_float, max_weight_int, maximal_cliques, signatures, stream_cap
from .limits import Limits, ResourceLimitError, get_limits
from .numeric import DECIMAL_TOL, as_fraction, simplify
from .probability import (
    JointDistribution,
    LinearFunctional,
    ProbabilityError,
    ProbabilityFunction,
    _cycle_length,
    _is_chsh,
    isotropic_box,
    power_probability,
    shared_components,
    uniform_cycle_box,
)
from .scenario import COARSE, Outcome, Scenario, exclusivity_graph, power_scenario

_INT64_HEADROOM = 2**62


class NonMonotoneError(ValueError):
    """Bisection endpoints do not bracket a change of the predicate."""


@dataclass(frozen=True)
class CEReport:
    holds: bool
    worst_clique: tuple[int, ...]
    worst_sum: object
    copies: int
    mode: str
    worst_outcomes: tuple[Outcome, ...] = ()
    clique_count: int = 0
    scenario: Scenario | None = field(default=None, compare=False, repr=False)

    def describe_worst(self) -> list[str]:
        if self.scenario is None:
            return [str(o.members) for o in self.worst_outcomes]
        return [self.scenario.describe(o) for o in self.worst_outcomes]


@dataclass(frozen=True)
class NCResult:
    feasible: bool
    joint: JointDistribution | None
    certificate: lpmod.FarkasCertificate | None
    rows: tuple = ()  # row labels aligned with the certificate's equalities

    def certificate_terms(self) -> list[tuple[str, Fraction]]:
        if self.certificate is None:
            return []
        return [(r, m) for r, m in zip(self.rows, self.certificate.equalities) if m]


@dataclass(frozen=True)
class OptResult:
    value: Fraction
    witness: object
    set_name: str
    lp_result: lpmod.LPResult | None = field(default=None, compare=False, repr=False)


# --- helpers ----------------------------------------------------------------

def _rational(v) -> Fraction:
    if isinstance(v, float):
        return Fraction(repr(v))
    try:
        return as_fraction(v)
    except TypeError:
        raise ProbabilityError(f"value {v} is not rational; LP checks need rational or decimal data") from None


def _check_same(s: Scenario, p: ProbabilityFunction):
    if p.scenario != s:
        raise ProbabilityError("probability function belongs to a different scenario")


# --- CE ---------------------------------------------------------------------

def ce_check(s: Scenario, p: ProbabilityFunction, copies: int = 1, mode: str = COARSE,
             cap: int | None = None, limits: Limits | None = None) -> CEReport:
    """Decide CE for ``copies`` independent copies of ``p``."""
    _check_same(s, p)
    if copies < 1:
        raise ValueError("copies must be >= 1")
    pk = power_probability(p, copies) if copies > 1 else p
    sk = pk.scenario
    g = exclusivity_graph(sk, mode)
    vals = [pk.values[v] for v in g.vertices]
    cap = stream_cap(cap, limits)
    tol = pk.tolerance
    if any(isinstance(v, float) for v in vals):
        count, _, clique = max_weight_float(g, np.array([float(v) for v in vals]), cap)
        worst = math.fsum(float(vals[i]) for i in clique)
        holds = worst <= 1 + max(tol, DECIMAL_TOL)
    elif all(isinstance(v, (int, Fraction)) for v in vals):
        fr = [Fraction(v) for v in vals]
        L = 1
        for v in fr:
            L = math.lcm(L, v.denominator)
        ints = [int(v * L) for v in fr]
        if sum(abs(i) for i in ints) < _INT64_HEADROOM:
            count, best, clique = max_weight_int(g, np.array(ints, dtype=np.int64), cap)
            worst = Fraction(best, L) if best is not None else Fraction(0)
        else:
            count, worst, clique = _worst_by_signature(g, fr, cap)
        holds = worst <= 1 + Fraction(tol) if tol else worst <= 1
    else:
        count, worst, clique = _worst_by_signature(g, [simplify(v) for v in vals], cap)
        holds = bool(simplify(worst - 1) <= 0)
    return CEReport(bool(holds), clique, worst, copies, mode,
                    tuple(g.vertices[i] for i in clique), count, sk)


def _worst_by_signature(g, vals, cap):
    """Exact maximum over cliques by grouping vertices of equal value."""
    index: dict = {}
    classes = []
    reps = []
    for v in vals:
        k = index.setdefault(v, len(index))
        if k == len(reps):
            reps.append(v)
        classes.append(k)
    count, sig, cliques = signatures(g, np.array(classes, dtype=np.int32), len(reps), cap)
    best, best_k = None, -1
    for k in range(sig.shape[0]):
        total = simplify(sum((int(c) * reps[j] for j, c in enumerate(sig[k]) if c), Fraction(0)))
        if best is None or bool(simplify(total - best) > 0):
            best, best_k = total, k
    if best is None:
        return count, Fraction(0), ()
    return count, best, cliques[best_k]


# --- non-contextuality ------------------------------------------------------

def _nc_lp(s: Scenario, limits: Limits | None):
    lim = limits or get_limits()
    n = s.element_count
    if n > lim.nc_elements:
        raise ResourceLimitError(f"|Xi|={n} exceeds the joint-distribution cap {lim.nc_elements}")
    prog = lpmod.LinearProgram(n, lower_bounds=[0] * n)
    return prog


def nc_check(s: Scenario, p: ProbabilityFunction, limits: Limits | None = None) -> NCResult:
    """Is ``p`` the marginal of one joint distribution on the sample space?"""
    _check_same(s, p)
    prog = _nc_lp(s, limits)
    n = s.element_count
    rows = ["normalization"]
    prog.add_equality({i: 1 for i in range(n)}, 1)
    for o in s.fine_outcomes():
        prog.add_equality({i: 1 for i in o.members}, _rational(p.values[o]))
        rows.append(s.describe(o))
    mode = "float" if p.tolerance else "rational"
    res = lpmod.feasibility(prog, mode=mode)
    if res.status == lpmod.OPTIMAL:
        w = tuple(res.primal)
        if mode == "rational":
            joint = JointDistribution(w)
            if joint.marginal(s) != ProbabilityFunction(s, {o: _rational(v) for o, v in p.values.items()}):
                raise lpmod.LPVerificationError("joint distribution does not reproduce the table")
        else:
            joint = JointDistribution(tuple(max(0.0, float(x)) for x in w))
        return NCResult(True, joint, None, tuple(rows))
    return NCResult(False, None, res.certificate, tuple(rows))


def _objective(s: Scenario, f: LinearFunctional, cols: dict) -> dict:
    obj: dict[int, Fraction] = {}
    for o, c in f.terms:
        if o not in cols:
            raise ProbabilityError(f"functional term {s.describe(o)} is not an outcome of the scenario")
        for j in cols[o]:
            obj[j] = obj.get(j, Fraction(0)) + _rational(c)
    return obj


def _finish(res, f: LinearFunctional, what: str):
    if res.status != lpmod.OPTIMAL:
        raise lpmod.LPVerificationError(f"{what} LP is {res.status}; expected a bounded optimum")
    return res.objective_value + _rational(f.constant)


def nc_optimize(s: Scenario, f: LinearFunctional, limits: Limits | None = None) -> OptResult:
    """Maximum of ``f`` over marginals of joint distributions."""
    prog = _nc_lp(s, limits)
    n = s.element_count
    prog.add_equality({i: 1 for i in range(n)}, 1)
    cols = {o: o.members for o in s.fine_outcomes()}
    prog.objective = _objective(s, f, cols)
    res = lpmod.solve(prog)
    value = _finish(res, f, "non-contextual")
    return OptResult(value, JointDistribution(tuple(res.primal)), "nc", res)


def _consistent_lp(s: Scenario):
    verts = s.fine_outcomes()
    pos = {o: k for k, o in enumerate(verts)}
    prog = lpmod.LinearProgram(len(verts), lower_bounds=[0] * len(verts))
    for m in s.measurements:
        prog.add_equality({pos[c]: 1 for c in m.cells}, 1)
    for _, _, ca, cb in shared_components(s):
        row: dict[int, int] = {}
        for c in ca:
            row[pos[c]] = row.get(pos[c], 0) + 1
        for c in cb:
            row[pos[c]] = row.get(pos[c], 0) - 1
        row = {k: v for k, v in row.items() if v}
        if row:
            prog.add_equality(row, 0)
    return prog, verts, pos


def _table(s: Scenario, verts, x) -> ProbabilityFunction:
    return ProbabilityFunction(s, {o: Fraction(x[k]) for k, o in enumerate(verts)})


def consistent_optimize(s: Scenario, f: LinearFunctional) -> OptResult:
    """Maximum of ``f`` over all valid (normalized, consistent) tables."""
    prog, verts, pos = _consistent_lp(s)
    prog.objective = _objective(s, f, {o: (k,) for o, k in pos.items()})
    res = lpmod.solve(prog)
    value = _finish(res, f, "consistent")
    return OptResult(value, _table(s, verts, res.primal), "consistent", res)


def ce_optimize(s: Scenario, f: LinearFunctional, mode: str = COARSE, cap: int | None = None,
                limits: Limits | None = None) -> OptResult:
    """Maximum of ``f`` over valid tables obeying single-copy CE."""
    prog, verts, pos = _consistent_lp(s)
    g = exclusivity_graph(s, mode)
    order = [pos[v] for v in g.vertices]
    for clique in maximal_cliques(g, cap, limits):
        if len(clique) > 1:
            prog.add_inequality({order[i]: 1 for i in clique}, 1)
    prog.objective = _objective(s, f, {o: (k,) for o, k in pos.items()})
    res = lpmod.solve(prog)
    value = _finish(res, f, "CE")
    return OptResult(value, _table(s, verts, res.primal), "ce1", res)


# --- threshold search -------------------------------------------------------

@dataclass(frozen=True)
class Family:
    name: str
    lower: Fraction
    upper: Fraction
    build: object  # callable(parameter) -> ProbabilityFunction
    value_scale: Fraction  # functional value = value_scale * parameter
    functional: str


def family(name: str, s: Scenario) -> Family:
    key = name.lower().replace("-", "_")
    if key == "isotropic":
        if not _is_chsh(s):
            raise ProbabilityError("the isotropic family needs the chsh scenario")
        return Family("isotropic", Fraction(0), Fraction(1), lambda t: isotropic_box(s, t), Fraction(4), "chsh")
    if key == "uniform_cycle":
        n = _cycle_length(s)
        if n is None:
            raise ProbabilityError("the uniform-cycle family needs a cycle scenario")
        return Family("uniform_cycle", Fraction(0), Fraction(1, 2), lambda t: uniform_cycle_box(s, t),
                      Fraction(n), "kcbs")
    raise ProbabilityError(f"unknown family {name!r}; expected isotropic or uniform-cycle")


@dataclass(frozen=True)
class ThresholdResult:
    family: str
    functional: str
    copies: int
    mode: str
    parameter: Fraction       # midpoint of the final bracket
    lower: Fraction           # predicate holds here
    upper: Fraction           # predicate fails here (equals lower when it never fails)
    value: Fraction           # functional value at ``parameter``
    never_fails: bool
    exact_parameter: str | None
    exact_value: str | None
    binding_clique: tuple[Outcome, ...]
    clique_count: int
    signature_count: int


def _interpolate(xs, ys) -> list[Fraction]:
    """Coefficients (ascending) of the unique polynomial through the points."""
    k = len(xs)
    coeffs = [Fraction(0)] * k
    for i in range(k):
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j in range(k):
            if j == i:
                continue
            basis = [Fraction(0)] + basis
            for d in range(len(basis) - 1):
                basis[d] -= xs[j] * basis[d + 1]
            denom *= xs[i] - xs[j]
        for d in range(k):
            coeffs[d] += ys[i] * basis[d] / denom
    return coeffs


def _horner(c, t):
    acc = Fraction(0)
    for a in reversed(c):
        acc = acc * t + a
    return acc


def threshold_search(fam: str, s: Scenario, copies: int = 2, mode: str = COARSE, tol=Fraction(1, 10**6),
                     cap: int | None = None, limits: Limits | None = None) -> ThresholdResult:
    """Largest family parameter whose ``copies``-fold product still obeys CE.

    Vertex probabilities of the product table are polynomials of degree
    ``copies`` in the parameter, so cliques are enumerated once, grouped by
    how many vertices of each polynomial class they contain, and the bisection
    then only evaluates these clique polynomials exactly.
    """
    F = family(fam, s)
    tol = Fraction(tol) if not isinstance(tol, float) else Fraction(repr(tol))
    if tol <= 0:
        raise ValueError("tol must be positive")
    sk = power_scenario(s, copies)
    g = exclusivity_graph(sk, mode)
    xs = [F.lower + (F.upper - F.lower) * j / copies for j in range(copies + 1)]
    samples = []
    for t in xs:
        pk = power_probability(F.build(t), copies)
        samples.append([Fraction(pk.values[v]) for v in g.vertices])
    index: dict = {}
    classes = []
    for i in range(g.n):
        key = tuple(col[i] for col in samples)
        classes.append(index.setdefault(key, len(index)))
    polys = [_interpolate(xs, list(key)) for key in index]
    count, sig, reps = signatures(g, np.array(classes, dtype=np.int32), len(polys), stream_cap(cap, limits))
    deg = copies + 1
    clique_polys = []
    for row in sig:
        c = [Fraction(0)] * deg
        for j, n_j in enumerate(row):
            if n_j:
                for d in range(deg):
                    c[d] += int(n_j) * polys[j][d]
        clique_polys.append(c)

    def worst(t):
        best_k, best = -1, None
        for k, c in enumerate(clique_polys):
            v = _horner(c, t)
            if best is None or v > best:
                best_k, best = k, v
        return best_k, best

    lo, hi = F.lower, F.upper
    k_hi, v_hi = worst(hi)
    if v_hi is None or v_hi <= 1:
        clique = tuple(g.vertices[i] for i in reps[k_hi]) if k_hi >= 0 else ()
        return ThresholdResult(F.name, F.functional, copies, mode, hi, hi, hi, F.value_scale * hi, True,
                               str(hi), str(F.value_scale * hi), clique, count, len(clique_polys))
    if worst(lo)[1] > 1:
        raise NonMonotoneError(f"CE already fails at the lower end {lo} of the {F.name} family")
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if worst(mid)[1] <= 1:
            lo = mid
        else:
            hi = mid
    k_bind, _ = worst(hi)
    exact_t = _exact_root(clique_polys[k_bind], lo, hi)
    exact_v = None
    if exact_t is not None:
        exact_v = str(simplify(exact_t * int(F.value_scale.numerator) / int(F.value_scale.denominator)))
        exact_t = str(exact_t)
    mid = (lo + hi) / 2
    return ThresholdResult(F.name, F.functional, copies, mode, mid, lo, hi, F.value_scale * mid, False,
                           exact_t, exact_v, tuple(g.vertices[i] for i in reps[k_bind]), count,
                           len(clique_polys))


def _exact_root(coeffs, lo, hi):
    """Closed form of the root of ``poly(t) = 1`` inside ``[lo, hi]``, if sympy finds one."""
    try:
        import sympy
    except ImportError:  # pragma: no cover
        return None
    t = sympy.Symbol("t")
    expr = sum(sympy.Rational(c.numerator, c.denominator) * t**d for d, c in enumerate(coeffs)) - 1
    for r in sympy.Poly(expr, t).real_roots():
        if sympy.Rational(lo.numerator, lo.denominator) <= r <= sympy.Rational(hi.numerator, hi.denominator):
            return sympy.nsimplify(r) if r.is_Rational else sympy.radsimp(r)
    return None
