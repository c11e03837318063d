"""Backend selection for the propagation kernel.

The compiled extension is preferred when it imported cleanly; the NumPy
implementation is the fallback. Set SLSINC_BACKEND=python (or =cython)
before import to force a choice, e.g. for benchmarking.
"""

import os

_forced = os.environ.get("SLSINC_BACKEND", "").strip().lower()

if _forced == "python":
    from . import _propagate_py as _impl
    BACKEND = "python"
elif _forced == "cython":
    from . import _propagate_cy as _impl
    BACKEND = "cython"
elif _forced:
    raise ImportError("unknown SLSINC_BACKEND=%r (use 'python' or 'cython')" % _forced)
else:
    try:
        from . import _propagate_cy as _impl
        BACKEND = "cython"
    except ImportError:
        from . import _propagate_py as _impl
        BACKEND = "python"

propagate = _impl.propagate
