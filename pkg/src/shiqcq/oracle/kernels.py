"""Kernel selection: the compiled kernel when it was built, else the pure-Python one.

Set ``SHIQCQ_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _kernel_py

if os.environ.get("SHIQCQ_PURE_PYTHON") == "1":
    _compiled = None
else:
    try:
        from . import _kernel_c as _compiled
    except ImportError:
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"
run = (_compiled or _kernel_py).run
python_run = _kernel_py.run
compiled_run = _compiled.run if _compiled is not None else None
