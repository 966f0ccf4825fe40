"""Selection between the numba-compiled kernels and the pure-numpy fallback.

Set ``WEDGEPROB_NUMBA=0`` in the environment to force the numpy path (useful
for debugging or on platforms without numba). The flag is read once at import.
"""

import os

try:
    import numba  # noqa: F401
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]):
            return args[0]

        def _wrap(f):
            return f

        return _wrap


def _flag_enabled(value):
    return value.strip().lower() not in ("0", "false", "no", "off")


USE_NUMBA = HAVE_NUMBA and _flag_enabled(os.environ.get("WEDGEPROB_NUMBA", "1"))
