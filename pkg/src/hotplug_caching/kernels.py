"""Backend selection for the byte kernels.

Prefers the compiled extension; falls back to the pure-Python implementation
when the extension was not built.  Set HOTPLUG_PURE_PYTHON=1 to force the
fallback (used by tests and the backend benchmark).
"""

import os

if os.environ.get("HOTPLUG_PURE_PYTHON"):
    from . import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as _impl

        BACKEND = "python"

xor_into = _impl.xor_into
axpy_into = _impl.axpy_into


def available_backends() -> dict:
    """Importable kernel modules keyed by backend name."""
    backends = {}
    from . import _kernels_py

    backends["python"] = _kernels_py
    try:
        from . import _kernels  # type: ignore[attr-defined]

        backends["cython"] = _kernels
    except ImportError:
        pass
    return backends
