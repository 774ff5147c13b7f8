"""Maximal cliques of exclusivity graphs."""

from __future__ import annotations

from dataclasses import dataclass

from . import kernels
from .limits import Limits, ResourceLimitError, get_limits
from .scenario import ExclusivityGraph


@dataclass(frozen=True)
class CliqueSet:
    """Maximal cliques as sorted vertex-index tuples, in lexicographic order."""

    cliques: tuple[tuple[int, ...], ...]
    graph: ExclusivityGraph

    def __len__(self) -> int:
        return len(self.cliques)

    def __iter__(self):
        return iter(self.cliques)

    def outcomes(self, k: int):
        return tuple(self.graph.vertices[i] for i in self.cliques[k])


def maximal_cliques(g: ExclusivityGraph, cap: int | None = None, limits: Limits | None = None) -> CliqueSet:
    """Every maximal clique exactly once (pivoted Bron-Kerbosch).

    Raises :class:`ResourceLimitError` when more than ``cap`` cliques exist.
    """
    if cap is None:
        cap = (limits or get_limits()).cliques
    try:
        raw = kernels.enumerate_cliques(g.adjacency_words(), int(cap))
    except kernels.CliqueCapExceeded as exc:
        raise ResourceLimitError(f"maximal clique cap exceeded: {exc}") from None
    cliques = sorted(tuple(sorted(c)) for c in raw)
    return CliqueSet(tuple(cliques), g)


def stream_cap(cap: int | None, limits: Limits | None = None) -> int:
    return int(cap if cap is not None else (limits or get_limits()).clique_stream)


def _wrap(fn, *args):
    try:
        return fn(*args)
    except kernels.CliqueCapExceeded as exc:
        raise ResourceLimitError(f"maximal clique cap exceeded: {exc}") from None


def max_weight_int(g: ExclusivityGraph, weights, cap: int):
    """``(count, best, clique)`` with clique sorted; weights are int64."""
    count, best, clique = _wrap(kernels.max_weight_clique_int, g.adjacency_words(), weights, cap)
    return count, best, tuple(sorted(clique))


def max_weight_float(g: ExclusivityGraph, weights, cap: int):
    count, best, clique = _wrap(kernels.max_weight_clique_float, g.adjacency_words(), weights, cap)
    return count, best, tuple(sorted(clique))


def signatures(g: ExclusivityGraph, classes, n_classes: int, cap: int):
    """``(count, signature matrix, representative cliques)`` for a vertex classing."""
    count, sig, reps = _wrap(kernels.clique_signatures, g.adjacency_words(), classes, n_classes, cap)
    return count, sig, [tuple(sorted(r)) for r in reps]
