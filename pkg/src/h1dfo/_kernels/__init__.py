"""Backend selection for the least-norm system kernel.

The compiled Cython kernel is preferred when present; the numpy fallback is
used otherwise.  Set ``H1DFO_PURE_PYTHON=1`` to force the fallback (useful
for benchmarking the two implementations against each other).
"""

import os

_force_python = os.environ.get("H1DFO_PURE_PYTHON", "").strip() not in ("", "0")

if _force_python:
    from ._fallback import RCOND_SINGULAR, LeastNormSystem

    BACKEND = "python"
else:
    try:
        from ._lnkernel import RCOND_SINGULAR, LeastNormSystem

        BACKEND = "compiled"
    except ImportError:
        from ._fallback import RCOND_SINGULAR, LeastNormSystem

        BACKEND = "python"

__all__ = ["LeastNormSystem", "BACKEND", "RCOND_SINGULAR"]
