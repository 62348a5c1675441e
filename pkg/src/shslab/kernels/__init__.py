"""Hot compute kernels with two interchangeable engines.

The numba engine JIT-compiles the per-step loops (reaction update,
tridiagonal Neumann heat solve, full time loops); the numpy engine is a
vectorized fallback built on numpy plus scipy's banded solver.  Both
implement identical update rules; they differ only in floating-point
summation order at the last-ulp level.

Selection:

* ``SHSLAB_DISABLE_NUMBA=1`` (or ``true``/``yes``/``on``) forces the
  numpy engine;
* otherwise the numba engine is used when numba imports, with a silent
  fall back to numpy when it does not.

``ENGINE`` names the active engine.  ``benchmarks/bench_engines.py``
compares the two on the shipped reference configuration.
"""

import os

MS = 0
THR = 1
TAB = 2

# series column layout shared by all run loops
COL_T = 0
COL_FRONT = 1
COL_MASS_U = 2
COL_MASS_AUX = 3
COL_UMIN = 4
COL_UMAX = 5
COL_PEAK = 6
N_SERIES_COLS = 7

STATUS_OK = 0
STATUS_NONFINITE = 1


def _numba_disabled() -> bool:
    return os.environ.get("SHSLAB_DISABLE_NUMBA", "").strip().lower() in {
        "1",
        "true",
        "yes",
        "on",
    }


if _numba_disabled():
    from . import numpy_engine as _impl

    ENGINE = "numpy"
else:
    try:
        from . import numba_engine as _impl

        ENGINE = "numba"
    except ImportError:
        from . import numpy_engine as _impl

        ENGINE = "numpy"

eval_g = _impl.eval_g
depletion = _impl.depletion
reaction_apply = _impl.reaction_apply
make_diffusion = _impl.make_diffusion
diffusion_apply = _impl.diffusion_apply
run_shs_loop = _impl.run_shs_loop
run_limit_loop = _impl.run_limit_loop
run_heat_loop = _impl.run_heat_loop
