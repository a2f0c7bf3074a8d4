"""Backend selection for the hot kernels.

Kernels are compiled with numba when it is importable, unless the
environment variable ``NCRAND_DISABLE_NUMBA`` is set to a truthy value.
In that case every kernel routes to its pure-numpy twin.  The choice can
also be flipped at runtime with :func:`set_backend`, which the benchmark
and the kernel-equivalence tests use.
"""

import os

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False

_FALSY = {"", "0", "false", "no", "off"}


def _env_disabled() -> bool:
    return os.environ.get("NCRAND_DISABLE_NUMBA", "").strip().lower() not in _FALSY


_backend = "numba" if HAVE_NUMBA and not _env_disabled() else "numpy"


def backend() -> str:
    return _backend


def set_backend(name: str) -> None:
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    _backend = name


def njit(*args, **kwargs):
    """``numba.njit(cache=True)`` or a no-op decorator without numba."""
    if not HAVE_NUMBA:
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f
    kwargs.setdefault("cache", True)
    return numba.njit(*args, **kwargs)


def dispatch(numba_impl, numpy_impl):
    """Build a function that calls the implementation of the active backend."""

    def call(*args, **kwargs):
        if _backend == "numba":
            return numba_impl(*args, **kwargs)
        return numpy_impl(*args, **kwargs)

    call.__name__ = numpy_impl.__name__.removesuffix("_numpy")
    call.__doc__ = numpy_impl.__doc__
    call.numba_impl = numba_impl
    call.numpy_impl = numpy_impl
    return call
