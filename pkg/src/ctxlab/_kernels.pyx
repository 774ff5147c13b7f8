# distutils: language = c++
# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: pivoted Bron-Kerbosch and quadratic set-function minimization.

Every routine here has a line-for-line twin in ``_pykernels`` and both visit
cliques / subsets in the same order, so results do not depend on the backend.
"""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t
from libc.stdlib cimport malloc, free
from libc.string cimport memcpy, memset
from libcpp.string cimport string
from libcpp.unordered_map cimport unordered_map
from libcpp.vector cimport vector

cnp.import_array()

BACKEND = "compiled"


class CliqueCapExceeded(RuntimeError):
    pass


cdef inline int popcount(uint64_t x) noexcept nogil:
    return __builtin_popcountll(x)


cdef inline int ctz(uint64_t x) noexcept nogil:
    return __builtin_ctzll(x)


cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil


cdef enum:
    STORE = 0
    MAX_INT = 1
    MAX_FLOAT = 2
    SIGNATURE = 3


cdef class _Enumerator:
    cdef int n, W, mode
    cdef const uint64_t* adj
    cdef uint64_t* P
    cdef uint64_t* X
    cdef uint64_t* C
    cdef int* R
    cdef long long count, cap
    cdef bint aborted
    # STORE
    cdef vector[int] flat
    cdef vector[long long] offsets
    # MAX_*
    cdef const int64_t* wi
    cdef const double* wd
    cdef int64_t best_i
    cdef double best_d
    cdef bint have_best
    cdef vector[int] best
    # SIGNATURE
    cdef const int* cls
    cdef int n_classes
    cdef unsigned short* hist
    cdef unordered_map[string, int] sig_index
    cdef vector[unsigned short] sig_flat
    cdef vector[int] rep_flat
    cdef vector[long long] rep_offsets

    def __cinit__(self, cnp.ndarray[cnp.uint64_t, ndim=2, mode="c"] adj, long long cap, int mode):
        self.n = adj.shape[0]
        self.W = adj.shape[1] if adj.shape[1] > 0 else 1
        self.adj = <const uint64_t*> adj.data
        self.mode = mode
        self.cap = cap
        self.count = 0
        self.aborted = False
        self.have_best = False
        cdef size_t words = <size_t> (self.n + 2) * self.W
        self.P = <uint64_t*> malloc(words * sizeof(uint64_t))
        self.X = <uint64_t*> malloc(words * sizeof(uint64_t))
        self.C = <uint64_t*> malloc(words * sizeof(uint64_t))
        self.R = <int*> malloc((self.n + 1) * sizeof(int))
        self.hist = NULL
        if not self.P or not self.X or not self.C or not self.R:
            raise MemoryError()
        self.offsets.push_back(0)
        self.rep_offsets.push_back(0)

    def __dealloc__(self):
        free(self.P)
        free(self.X)
        free(self.C)
        free(self.R)
        if self.hist:
            free(self.hist)

    cdef void run(self) noexcept:
        cdef int W = self.W, n = self.n, i
        memset(self.P, 0, W * sizeof(uint64_t))
        memset(self.X, 0, W * sizeof(uint64_t))
        for i in range(n):
            self.P[i >> 6] |= (<uint64_t> 1) << (i & 63)
        if n == 0:
            return
        self.rec(0)

    cdef void leaf(self, int depth) noexcept:
        cdef int k, v
        cdef int64_t si
        cdef double sd
        cdef string key
        self.count += 1
        if self.count > self.cap:
            self.aborted = True
            return
        if self.mode == STORE:
            for k in range(depth):
                self.flat.push_back(self.R[k])
            self.offsets.push_back(self.flat.size())
        elif self.mode == MAX_INT:
            si = 0
            for k in range(depth):
                si += self.wi[self.R[k]]
            if not self.have_best or si > self.best_i:
                self.have_best = True
                self.best_i = si
                self.best.assign(self.R, self.R + depth)
        elif self.mode == MAX_FLOAT:
            sd = 0.0
            for k in range(depth):
                sd += self.wd[self.R[k]]
            if not self.have_best or sd > self.best_d:
                self.have_best = True
                self.best_d = sd
                self.best.assign(self.R, self.R + depth)
        else:
            for k in range(depth):
                self.hist[self.cls[self.R[k]]] += 1
            key = string(<char*> self.hist, self.n_classes * sizeof(unsigned short))
            if self.sig_index.count(key) == 0:
                self.sig_index[key] = <int> self.sig_index.size()
                for k in range(self.n_classes):
                    self.sig_flat.push_back(self.hist[k])
                for k in range(depth):
                    self.rep_flat.push_back(self.R[k])
                self.rep_offsets.push_back(self.rep_flat.size())
            for k in range(depth):
                self.hist[self.cls[self.R[k]]] = 0

    cdef void rec(self, int depth) noexcept:
        cdef int W = self.W, i, b, u, v, c, best
        cdef uint64_t m, bit
        cdef uint64_t* P = self.P + depth * W
        cdef uint64_t* X = self.X + depth * W
        cdef uint64_t* C = self.C + depth * W
        cdef uint64_t* P2 = P + W
        cdef uint64_t* X2 = X + W
        cdef const uint64_t* a
        cdef bint empty = True
        for i in range(W):
            if P[i] or X[i]:
                empty = False
                break
        if empty:
            self.leaf(depth)
            return
        # pivot: vertex of P|X with most neighbours in P, lowest index on ties
        best = -1
        u = -1
        for i in range(W):
            m = P[i] | X[i]
            while m:
                b = ctz(m)
                m &= m - 1
                v = (i << 6) | b
                a = self.adj + v * W
                c = 0
                for b in range(W):
                    c += popcount(P[b] & a[b])
                if c > best:
                    best = c
                    u = v
        a = self.adj + u * W
        for i in range(W):
            C[i] = P[i] & ~a[i]
        for i in range(W):
            m = C[i]
            while m:
                b = ctz(m)
                m &= m - 1
                v = (i << 6) | b
                bit = (<uint64_t> 1) << b
                a = self.adj + v * W
                for c in range(W):
                    P2[c] = P[c] & a[c]
                    X2[c] = X[c] & a[c]
                self.R[depth] = v
                self.rec(depth + 1)
                if self.aborted:
                    return
                P[i] &= ~bit
                X[i] |= bit


def _check_cap(_Enumerator e):
    if e.aborted:
        raise CliqueCapExceeded(f"more than {e.cap} maximal cliques")


def enumerate_cliques(adj, long long cap):
    """All maximal cliques as lists of vertex indices, in enumeration order."""
    cdef _Enumerator e = _Enumerator(np.ascontiguousarray(adj, dtype=np.uint64), cap, STORE)
    e.run()
    _check_cap(e)
    cdef list out = []
    cdef size_t k
    for k in range(e.offsets.size() - 1):
        out.append([e.flat[j] for j in range(e.offsets[k], e.offsets[k + 1])])
    return out


def max_weight_clique_int(adj, weights, long long cap):
    """``(count, best_sum, best_clique)`` over maximal cliques, int64 weights."""
    cdef cnp.ndarray[cnp.int64_t, ndim=1, mode="c"] w = np.ascontiguousarray(weights, dtype=np.int64)
    cdef _Enumerator e = _Enumerator(np.ascontiguousarray(adj, dtype=np.uint64), cap, MAX_INT)
    e.wi = <const int64_t*> w.data
    e.run()
    _check_cap(e)
    return e.count, (int(e.best_i) if e.have_best else None), list(e.best)


def max_weight_clique_float(adj, weights, long long cap):
    """``(count, best_sum, best_clique)`` over maximal cliques, float64 weights."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1, mode="c"] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef _Enumerator e = _Enumerator(np.ascontiguousarray(adj, dtype=np.uint64), cap, MAX_FLOAT)
    e.wd = <const double*> w.data
    e.run()
    _check_cap(e)
    return e.count, (float(e.best_d) if e.have_best else None), list(e.best)


def clique_signatures(adj, classes, int n_classes, long long cap):
    """Distinct class histograms of maximal cliques.

    Returns ``(count, signatures, representatives)``: an int64 array of shape
    ``(k, n_classes)`` in first-seen order and one clique per signature.
    """
    cdef cnp.ndarray[cnp.int32_t, ndim=1, mode="c"] cl = np.ascontiguousarray(classes, dtype=np.int32)
    if n_classes < 1:
        n_classes = 1
    cdef _Enumerator e = _Enumerator(np.ascontiguousarray(adj, dtype=np.uint64), cap, SIGNATURE)
    e.cls = <const int*> cl.data
    e.n_classes = n_classes
    e.hist = <unsigned short*> malloc(n_classes * sizeof(unsigned short))
    memset(e.hist, 0, n_classes * sizeof(unsigned short))
    e.run()
    _check_cap(e)
    cdef size_t k = e.rep_offsets.size() - 1
    sig = np.zeros((k, n_classes), dtype=np.int64)
    cdef size_t r, c
    for r in range(k):
        for c in range(n_classes):
            sig[r, c] = e.sig_flat[r * n_classes + c]
    reps = [[e.rep_flat[j] for j in range(e.rep_offsets[r], e.rep_offsets[r + 1])] for r in range(k)]
    return e.count, sig, reps


# --- quadratic set functions ------------------------------------------------
#
# f(A) = sum_{i in A} g_i + sum_{i<j in A} Q_ij, Q symmetric with zero diagonal.
# Minimizers are compared on (value, mask) so ties resolve to the smallest mask.

ctypedef fused num_t:
    int64_t
    double


def qpb_gray(num_t[::1] g, num_t[:, ::1] Q):
    """Exhaustive minimum by Gray-code traversal; returns ``(value, mask)``."""
    cdef int n = g.shape[0], k, j
    if n > 62:
        raise ValueError("exhaustive minimization supports at most 62 elements")
    cdef num_t val = 0, best = 0
    cdef uint64_t mask = 0, best_mask = 0, i, total = (<uint64_t> 1) << n
    cdef num_t* d = <num_t*> malloc((n + 1) * sizeof(num_t))
    for k in range(n):
        d[k] = g[k]
    i = 1
    while i < total:
        k = ctz(i)
        if (mask >> k) & 1:
            mask &= ~((<uint64_t> 1) << k)
            val -= d[k]
            for j in range(n):
                d[j] -= Q[k, j]
        else:
            mask |= (<uint64_t> 1) << k
            val += d[k]
            for j in range(n):
                d[j] += Q[k, j]
        if val < best or (val == best and mask < best_mask):
            best = val
            best_mask = mask
        i += 1
    free(d)
    return best, int(best_mask)


cdef struct _BB:
    int n
    uint64_t best_mask
    bint have


cdef void _bb_rec(num_t* h, num_t* neg, const num_t* Q, int n, int t, num_t f2,
                  uint64_t mask, num_t* best2, _BB* st) noexcept nogil:
    # values carried on the doubled scale so the half-weight bound stays integral
    cdef int k, j, first, side
    cdef num_t bound, term
    cdef num_t* h2
    if t == n:
        if (not st.have) or f2 < best2[0] or (f2 == best2[0] and mask < st.best_mask):
            best2[0] = f2
            st.best_mask = mask
            st.have = True
        return
    bound = f2
    for k in range(t, n):
        term = h[k] + neg[t * n + k]
        if term < 0:
            bound += term
    if st.have and bound > best2[0]:
        return
    h2 = h + n
    first = 1 if h[t] < 0 else 0
    for side in range(2):
        if (side == 0) == (first == 1):
            for k in range(t + 1, n):
                h2[k] = h[k] + 2 * Q[t * n + k]
            _bb_rec(h2, neg, Q, n, t + 1, f2 + h[t], mask | ((<uint64_t> 1) << t), best2, st)
        else:
            for k in range(t + 1, n):
                h2[k] = h[k]
            _bb_rec(h2, neg, Q, n, t + 1, f2, mask, best2, st)


def qpb_branch_and_bound(num_t[::1] g, num_t[:, ::1] Q):
    """Exact minimum by depth-first branch and bound; returns ``(value, mask)``.

    Lower bound at a node with elements ``0..t-1`` decided:
    ``f(A) + sum_k min(0, h_k + 1/2 sum_{j>=t, j!=k} min(0, Q_kj))``.
    """
    cdef int n = g.shape[0], k, j, t
    if n > 63:
        raise ValueError("branch and bound supports at most 63 elements")
    cdef num_t* h = <num_t*> malloc(((n + 1) * n + 1) * sizeof(num_t))
    cdef num_t* neg = <num_t*> malloc(((n + 1) * n + 1) * sizeof(num_t))
    cdef num_t* Qc = <num_t*> malloc((n * n + 1) * sizeof(num_t))
    cdef num_t q, best2 = 0
    cdef _BB st
    st.n = n
    st.best_mask = 0
    st.have = False
    for k in range(n):
        h[k] = 2 * g[k]
        for j in range(n):
            Qc[k * n + j] = Q[k, j]
    # neg[t][k] = sum over j >= t, j != k of min(0, Q_kj)
    for k in range(n):
        neg[n * n + k] = 0
    for t in range(n - 1, -1, -1):
        for k in range(n):
            q = Q[k, t] if k != t else 0
            neg[t * n + k] = neg[(t + 1) * n + k] + (q if q < 0 else 0)
    with nogil:
        _bb_rec(h, neg, Qc, n, 0, 0, 0, &best2, &st)
    cdef uint64_t bm = st.best_mask
    free(h)
    free(neg)
    free(Qc)
    if num_t is double:
        return best2 / 2.0, int(bm)
    else:
        return best2 // 2, int(bm)
