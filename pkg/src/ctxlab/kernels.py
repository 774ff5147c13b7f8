"""Backend selection for the hot loops.

The compiled extension is used when it imports; set ``CTXLAB_PURE_PYTHON=1``
to force the pure-Python twin (handy for debugging and for the benchmark).
"""

from __future__ import annotations

import os

if os.environ.get("CTXLAB_PURE_PYTHON", "") not in ("", "0"):
    from . import _pykernels as _impl
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:  # extension not built
        from . import _pykernels as _impl

from . import _pykernels as python_backend

BACKEND = _impl.BACKEND
CliqueCapExceeded = _impl.CliqueCapExceeded
enumerate_cliques = _impl.enumerate_cliques
max_weight_clique_int = _impl.max_weight_clique_int
max_weight_clique_float = _impl.max_weight_clique_float
clique_signatures = _impl.clique_signatures
qpb_gray = _impl.qpb_gray
qpb_branch_and_bound = _impl.qpb_branch_and_bound


def compiled_backend():
    """The extension module, or ``None`` when it is not built."""
    try:
        from . import _kernels
    except ImportError:
        return None
    return _kernels
