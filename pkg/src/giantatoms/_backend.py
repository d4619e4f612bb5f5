"""Numba/numpy backend selection for the hot grid kernels.

The environment variable ``GIANTATOMS_BACKEND`` controls which implementation
the public kernel aliases in :mod:`giantatoms.kernels` point to:

* ``auto`` (default) -- numba if importable, else vectorized numpy
* ``numba``          -- require numba, raise if unavailable
* ``numpy``          -- force the pure-numpy path

Both implementations always coexist (when numba is importable) so that tests
and the benchmark can compare them directly regardless of the selected
default.
"""

import os

_choice = os.environ.get("GIANTATOMS_BACKEND", "auto").strip().lower()
if _choice not in ("auto", "numba", "numpy"):
    raise ValueError(
        f"GIANTATOMS_BACKEND must be one of auto|numba|numpy, got {_choice!r}"
    )

HAVE_NUMBA = False
if _choice != "numpy":
    try:
        from numba import njit  # noqa: F401

        HAVE_NUMBA = True
    except ImportError:
        if _choice == "numba":
            raise

USE_NUMBA = HAVE_NUMBA and _choice != "numpy"

if not HAVE_NUMBA:

    def njit(*args, **kwargs):  # type: ignore[misc]
        """Identity decorator standing in for numba.njit."""
        if args and callable(args[0]):
            return args[0]

        def wrap(func):
            return func

        return wrap


def backend_name() -> str:
    """Name of the kernel implementation the public aliases use."""
    return "numba" if USE_NUMBA else "numpy"
