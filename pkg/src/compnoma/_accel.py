"""Backend selection for the Monte Carlo hot loops.

The numba kernels are used when numba imports and ``COMPNOMA_DISABLE_NUMBA``
is unset (or ``0``).  Otherwise the vectorized numpy implementations run.
The flag is read at call time, so it can be flipped inside a process.
"""

import os

ENV_FLAG = "COMPNOMA_DISABLE_NUMBA"

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False


def numba_disabled_by_env() -> bool:
    return os.environ.get(ENV_FLAG, "").strip().lower() not in ("", "0", "false", "no")


def use_numba() -> bool:
    return HAVE_NUMBA and not numba_disabled_by_env()


def backend_name() -> str:
    return "numba" if use_numba() else "numpy"
