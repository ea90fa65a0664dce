"""Kernel backend selection.

The compiled extension is preferred when importable; the pure-Python
module is the fallback.  TEXTATTRIB_PURE_PYTHON=1 forces the fallback,
which is how the parity tests pin one side of the comparison.
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("TEXTATTRIB_PURE_PYTHON") == "1":
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

BACKEND_NAME: str = _impl.BACKEND_NAME
best_split = _impl.best_split
apply_tree = _impl.apply_tree
tree_shap = _impl.tree_shap


def available_backends() -> tuple[str, ...]:
    """Importable kernel backends, compiled first when present."""
    try:
        from . import _kernels  # noqa: F401
    except ImportError:
        return ("python",)
    return ("cython", "python")
