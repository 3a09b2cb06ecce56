"""Backend switch for the compiled kernels.

Set ``VPAMIN_NUMBA=0`` to force the interpreted path (numpy / plain Python).
The choice is read once at import time; ``use_numba()`` reports it.
"""

import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    numba = None

_ENABLED = numba is not None and os.environ.get("VPAMIN_NUMBA", "1").strip().lower() not in (
    "0",
    "false",
    "no",
    "off",
)


def use_numba() -> bool:
    return _ENABLED


def backend_name() -> str:
    return "numba" if _ENABLED else "python"


def resolve(backend):
    """Map ``None | "numba" | "python"`` to a concrete backend name."""
    if backend is None:
        return backend_name()
    if backend not in ("numba", "python"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and numba is None:
        raise RuntimeError("numba is not installed")
    return backend


def njit(*args, **kwargs):
    """``numba.njit`` with caching; a no-op decorator when numba is missing."""
    if numba is None:
        if args and callable(args[0]):
            return args[0]
        return lambda f: f
    kwargs.setdefault("cache", True)
    kwargs.setdefault("nogil", True)
    return numba.njit(*args, **kwargs)
