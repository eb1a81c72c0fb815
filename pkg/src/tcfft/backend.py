"""Select the MMA inner-loop backend at import time.

The compiled extension (tcfft._core) is preferred; the numpy fallback is
bit-identical and used when the extension is unavailable. Override with the
TCFFT_BACKEND environment variable ("ext" or "py") or set_backend().
"""

import os

from . import _mma_py

try:
    from . import _core as _ext
except ImportError:
    _ext = None

_BACKENDS = {"py": _mma_py.mma16}
if _ext is not None:
    _BACKENDS["ext"] = _ext.mma16

_active_name = None
mma16 = None


def available_backends():
    return tuple(sorted(_BACKENDS))


def active_backend() -> str:
    return _active_name


def set_backend(name: str):
    """Activate a backend by name ("ext", "py", or "auto")."""
    global _active_name, mma16
    if name == "auto":
        name = "ext" if "ext" in _BACKENDS else "py"
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} not available (have {available_backends()})")
    _active_name = name
    mma16 = _BACKENDS[name]
    return name


set_backend(os.environ.get("TCFFT_BACKEND", "auto"))
