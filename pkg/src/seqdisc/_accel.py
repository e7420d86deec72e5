"""Backend selection for the compiled kernels.

Set ``SEQDISC_DISABLE_NUMBA=1`` (or ``NUMBA_DISABLE_JIT=1``) to force the
pure-numpy code paths.  When numba cannot be imported the numpy paths are
used automatically.
"""
import os

_TRUTHY = {"1", "true", "yes", "on"}


def _env_flag(name):
    return os.environ.get(name, "").strip().lower() in _TRUTHY


try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def wrap(fn):
            return fn

        return wrap


def default_backend():
    """Return ``"numba"`` or ``"numpy"`` according to the environment."""
    if not HAS_NUMBA or _env_flag("SEQDISC_DISABLE_NUMBA") or _env_flag("NUMBA_DISABLE_JIT"):
        return "numpy"
    return "numba"


def resolve_backend(backend=None):
    if backend is None:
        return default_backend()
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}; expected 'numba' or 'numpy'")
    if backend == "numba" and not HAS_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    return backend
