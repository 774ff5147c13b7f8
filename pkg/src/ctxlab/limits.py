"""Size caps, overridable through ``CTXLAB_LIMITS``.

``CTXLAB_LIMITS="cliques=1000,nc_elements=512"`` overrides individual keys;
unknown keys are rejected so typos do not silently do nothing.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace


class ResourceLimitError(RuntimeError):
    """A configured size cap was exceeded; never a silent truncation."""


@dataclass(frozen=True)
class Limits:
    cliques: int = 10**7            # materialized maximal-clique lists
    clique_stream: int = 10**9      # cliques visited by streaming CE checks
    nc_elements: int = 4096         # sample-space size for joint-distribution LPs
    qm_enumerate: int = 20          # exhaustive subset verification
    qm_exhaustive: int = 26         # exhaustive separation
    qm_exact: int = 40              # exact branch-and-bound separation
    rowgen_iterations: int = 2000
    coarse_cells: int = 20

    def with_clique_cap(self, cap: int | None) -> "Limits":
        if cap is None:
            return self
        return replace(self, cliques=cap, clique_stream=cap)


def parse_limits(text: str | None, base: Limits | None = None) -> Limits:
    base = base or Limits()
    if not text:
        return base
    names = {f.name for f in fields(Limits)}
    updates = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        key, sep, value = part.partition("=")
        key = key.strip()
        if not sep or key not in names:
            raise ValueError(f"bad CTXLAB_LIMITS entry {part!r}; known keys: {', '.join(sorted(names))}")
        try:
            n = int(float(value))
        except ValueError:
            raise ValueError(f"bad CTXLAB_LIMITS value {value!r} for {key}") from None
        if n < 1:
            raise ValueError(f"CTXLAB_LIMITS value for {key} must be positive")
        updates[key] = n
    return replace(base, **updates)


def get_limits() -> Limits:
    return parse_limits(os.environ.get("CTXLAB_LIMITS"))
