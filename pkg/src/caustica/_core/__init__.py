"""Hot-loop kernels with backend selection at import.

The Cython extension ``_ext`` is used when it has been built; otherwise,
or when the environment variable ``CAUSTICA_PURE`` is set to a non-empty
value other than ``0``, the numpy/scipy implementations in ``_fallback``
are used.  ``BACKEND`` names the active one.
"""
import importlib
import os

from . import _fallback

_force_pure = os.environ.get("CAUSTICA_PURE", "") not in ("", "0")

try:
    if _force_pure:
        raise ImportError("pure backend requested")
    from . import _ext
except ImportError:
    _ext = None

if _ext is not None:
    rk4_linear = _ext.rk4_linear
    cn_propagate = _ext.cn_propagate
    BACKEND = "cython"
else:
    rk4_linear = _fallback.rk4_linear
    cn_propagate = _fallback.cn_propagate
    BACKEND = "python"


def backends():
    """Mapping of available backend names to their kernel modules."""
    out = {"python": _fallback}
    if _ext is not None:
        out["cython"] = _ext
    else:
        try:
            # the package attribute is None when the fallback was forced
            ext = importlib.import_module(__name__ + "._ext")
        except ImportError:
            pass
        else:
            out["cython"] = ext
    return out

__all__ = ["rk4_linear", "cn_propagate", "BACKEND", "backends"]
