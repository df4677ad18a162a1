"""Selects the graph kernel at import time.

The compiled kernel is preferred when the extension built; the
pure-Python kernel is the fallback and can be forced with
``KGCHAIN_PURE_PYTHON=1`` (useful for benchmarking and debugging).
"""

from __future__ import annotations

import os

from ._pycore import PyGraphCore

try:
    from ._fastcore import FastGraphCore
except ImportError:  # extension not built
    FastGraphCore = None

if os.environ.get("KGCHAIN_PURE_PYTHON") == "1" or FastGraphCore is None:
    DEFAULT_CORE = PyGraphCore
else:
    DEFAULT_CORE = FastGraphCore

COMPILED_AVAILABLE = FastGraphCore is not None


def available_cores() -> dict[str, type]:
    """Kernel classes by name, for tests and benchmarks."""
    cores = {"pure-python": PyGraphCore}
    if FastGraphCore is not None:
        cores["compiled"] = FastGraphCore
    return cores


def resolve_core(name: str | None) -> type:
    if name is None or name == "auto":
        return DEFAULT_CORE
    try:
        return available_cores()[name]
    except KeyError:
        raise ValueError(f"unknown graph backend {name!r}; available: {sorted(available_cores())}") from None
