"""Temporal-operator scans, compiled when the extension is available.

Set ``HYLTL_PURE_PYTHON=1`` to force the NumPy fallback.
"""

import os

from . import _kernels_py as python_backend

compiled_backend = None
if os.environ.get("HYLTL_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as compiled_backend  # type: ignore[no-redef]
    except ImportError:
        compiled_backend = None

_impl = compiled_backend if compiled_backend is not None else python_backend
BACKEND = "cython" if compiled_backend is not None else "python"

eventually = _impl.eventually
always = _impl.always
until = _impl.until
next_op = _impl.next_op
