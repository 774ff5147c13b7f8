import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ctxlab import cliques, kernels
from ctxlab.limits import Limits, ResourceLimitError, parse_limits
from ctxlab.scenario import exclusivity_graph, preset_scenario

BACKENDS = [kernels.python_backend]
if kernels.compiled_backend() is not None:
    BACKENDS.append(kernels.compiled_backend())
IDS = [b.BACKEND for b in BACKENDS]


def words(n, edges):
    w = max(1, (n + 63) // 64)
    out = np.zeros((n, w), dtype=np.uint64)
    for i, j in edges:
        out[i, j // 64] |= np.uint64(1 << (j % 64))
        out[j, i // 64] |= np.uint64(1 << (i % 64))
    return out


def brute_maximal(n, edges):
    E = {frozenset(e) for e in edges}
    adj = lambda a, b: frozenset((a, b)) in E
    cl = [c for r in range(1, n + 1) for c in itertools.combinations(range(n), r)
          if all(adj(a, b) for a, b in itertools.combinations(c, 2))]
    cs = [set(c) for c in cl]
    return sorted(c for c, s in zip(cl, cs)
                  if not any(s < t for t in cs if len(t) == len(s) + 1))


def random_graph(rng, n, p):
    return [(i, j) for i, j in itertools.combinations(range(n), 2) if rng.random() < p]


@pytest.mark.parametrize("k", BACKENDS, ids=IDS)
def test_small_graphs(k):
    cyc = [(i, (i + 1) % 5) for i in range(5)]
    assert len(k.enumerate_cliques(words(5, cyc), 100)) == 5
    k4 = list(itertools.combinations(range(4), 2))
    assert sorted(map(sorted, k.enumerate_cliques(words(4, k4), 100))) == [[0, 1, 2, 3]]
    assert len(k.enumerate_cliques(words(3, []), 100)) == 3
    assert k.enumerate_cliques(np.zeros((0, 1), dtype=np.uint64), 100) == []


@pytest.mark.parametrize("k", BACKENDS, ids=IDS)
@pytest.mark.parametrize("seed", range(25))
def test_enumeration_matches_brute_force(k, seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 11))
    edges = random_graph(rng, n, rng.random())
    got = sorted(tuple(sorted(c)) for c in k.enumerate_cliques(words(n, edges), 10**6))
    assert got == brute_maximal(n, edges)


@pytest.mark.parametrize("k", BACKENDS, ids=IDS)
def test_cap(k):
    adj = words(6, [])
    assert len(k.enumerate_cliques(adj, 6)) == 6
    with pytest.raises(k.CliqueCapExceeded):
        k.enumerate_cliques(adj, 5)
    with pytest.raises(k.CliqueCapExceeded):
        k.max_weight_clique_int(adj, np.ones(6, dtype=np.int64), 5)


@pytest.mark.parametrize("seed", range(20))
def test_backends_agree(seed):
    if len(BACKENDS) < 2:
        pytest.skip("compiled extension not built")
    py, cc = BACKENDS
    rng = np.random.default_rng(100 + seed)
    n = int(rng.integers(1, 90))
    adj = words(n, random_graph(rng, n, 0.7))
    assert py.enumerate_cliques(adj, 10**6) == cc.enumerate_cliques(adj, 10**6)
    wi = rng.integers(0, 1000, n).astype(np.int64)
    assert py.max_weight_clique_int(adj, wi, 10**6) == cc.max_weight_clique_int(adj, wi, 10**6)
    wf = rng.random(n)
    assert repr(py.max_weight_clique_float(adj, wf, 10**6)) == repr(cc.max_weight_clique_float(adj, wf, 10**6))
    cls = rng.integers(0, 4, n).astype(np.int64)
    a, b = py.clique_signatures(adj, cls, 4, 10**6), cc.clique_signatures(adj, cls, 4, 10**6)
    assert a[0] == b[0] and (a[1] == b[1]).all() and a[2] == b[2]


@pytest.mark.parametrize("k", BACKENDS, ids=IDS)
@pytest.mark.parametrize("seed", range(10))
def test_max_weight_is_max_over_enumeration(k, seed):
    rng = np.random.default_rng(200 + seed)
    n = int(rng.integers(2, 12))
    adj = words(n, random_graph(rng, n, 0.5))
    w = rng.integers(0, 50, n).astype(np.int64)
    count, best, clique = k.max_weight_clique_int(adj, w, 10**6)
    all_c = k.enumerate_cliques(adj, 10**6)
    assert count == len(all_c)
    assert best == max(int(w[list(c)].sum()) for c in all_c)
    assert int(w[list(clique)].sum()) == best


def _brute_qpb(g, Q):
    n = len(g)
    best, arg = 0, 0
    for m in range(1 << n):
        S = [i for i in range(n) if m >> i & 1]
        v = sum(g[i] for i in S) + sum(Q[i][j] for i, j in itertools.combinations(S, 2))
        if v < best:
            best, arg = v, m
    return best, arg


def _qpb_instance(rng, n, integer):
    if integer:
        g = rng.integers(-20, 21, n).astype(np.int64)
        Q = np.triu(rng.integers(-20, 21, (n, n)), 1).astype(np.int64)
    else:
        g = rng.normal(size=n)
        Q = np.triu(rng.normal(size=(n, n)), 1)
    return g, Q + Q.T


@pytest.mark.parametrize("k", BACKENDS, ids=IDS)
@pytest.mark.parametrize("seed", range(20))
def test_gray_code_matches_brute_force(k, seed):
    rng = np.random.default_rng(300 + seed)
    g, Q = _qpb_instance(rng, int(rng.integers(1, 10)), True)
    assert k.qpb_gray(g, Q)[0] == _brute_qpb(g, Q)[0]


@pytest.mark.parametrize("k", BACKENDS, ids=IDS)
def test_branch_and_bound_matches_exhaustive(k):
    rng = np.random.default_rng(7)
    for _ in range(100):
        g, Q = _qpb_instance(rng, 12, bool(rng.integers(0, 2)))
        bb, gray = k.qpb_branch_and_bound(g, Q), k.qpb_gray(g, Q)
        assert abs(bb[0] - gray[0]) <= 1e-9


@given(st.integers(0, 2**31 - 1))
def test_pentagon_like_graphs_via_wrappers(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 9))
    edges = random_graph(rng, n, 0.6)
    got = cliques._wrap(kernels.enumerate_cliques, words(n, edges), 10**6)
    assert sorted(tuple(sorted(c)) for c in got) == brute_maximal(n, edges)


def test_scenario_graph_cliques():
    s = preset_scenario("pentagon")
    g = exclusivity_graph(s)
    cs = cliques.maximal_cliques(g)
    for c in cs:
        assert g.is_clique(c)
        for v in range(g.n):
            if v not in c:
                assert not g.is_clique(sorted(c + (v,)))
    # every measurement's cell set is a clique of three fine outcomes
    for m in s.measurements:
        idx = tuple(sorted(g.index(c) for c in m.cells))
        assert g.is_clique(idx)
    assert list(cs) == sorted(cs)
    # five triangles {A_i, both-empty_i, A_(i+1)}
    assert len(cs) == 5 and all(len(c) == 3 for c in cs)


def test_chsh_clique_count_and_cap():
    g = exclusivity_graph(preset_scenario("chsh"))
    n = len(cliques.maximal_cliques(g))
    assert len(cliques.maximal_cliques(g, cap=n)) == n
    with pytest.raises(ResourceLimitError):
        cliques.maximal_cliques(g, cap=n - 1)
    with pytest.raises(ResourceLimitError):
        cliques.max_weight_int(g, np.ones(g.n, dtype=np.int64), 1)


def test_limits_parsing():
    assert parse_limits(None) == Limits()
    lim = parse_limits("cliques=1000, qm_exact=30")
    assert lim.cliques == 1000 and lim.qm_exact == 30
    for bad in ("clique=5", "cliques", "cliques=x", "cliques=0"):
        with pytest.raises(ValueError):
            parse_limits(bad)
    assert Limits().with_clique_cap(5).clique_stream == 5
