"""Optional numba acceleration.

Set ``LEVY_SPDE_DISABLE_NUMBA=1`` to force the pure-numpy code paths. When
numba is not importable the fallback is used regardless of the flag.
"""
import os

_FLAG = os.environ.get("LEVY_SPDE_DISABLE_NUMBA", "").strip().lower()
_DISABLED_BY_ENV = _FLAG not in ("", "0", "false", "no")

try:
    import numba as nb

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    nb = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _DISABLED_BY_ENV


def njit(*args, **kwargs):
    """``numba.njit`` when numba is installed, otherwise the identity decorator.

    Compilation is attempted whenever numba imports, independent of the env
    flag, so that tests and benchmarks can compare both backends in one process.
    """
    kwargs.setdefault("cache", True)
    kwargs.setdefault("nogil", True)
    if HAVE_NUMBA:
        return nb.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda func: func
