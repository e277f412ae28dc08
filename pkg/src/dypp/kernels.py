"""Backend selection for the population kernel.

The compiled Cython kernel is used when it imports; otherwise the pure-Python
one.  Both produce bit-identical traces.
"""
from __future__ import annotations

from . import _pykernels

try:
    from ._kernels import run_block as _compiled_run_block
except ImportError:  # extension not built
    _compiled_run_block = None

BACKENDS = {"python": _pykernels.run_block}
if _compiled_run_block is not None:
    BACKENDS["compiled"] = _compiled_run_block

DEFAULT_BACKEND = "compiled" if "compiled" in BACKENDS else "python"

KIND_CODES = {"wolf-phc": _pykernels.KIND_WOLF, "q-learning": _pykernels.KIND_QLEARN,
              "greedy": _pykernels.KIND_GREEDY}


def get_kernel(backend: str | None = None):
    name = backend or DEFAULT_BACKEND
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown or unavailable backend {name!r}; have {sorted(BACKENDS)}") from None
