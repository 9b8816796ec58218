"""Select the collector backend at import time.

The compiled extension is used when it was built; set ``NILCSP_PURE=1`` to
force the pure-Python fallback.
"""
import os

from . import _pykernel

if os.environ.get("NILCSP_PURE"):
    _impl = _pykernel
else:
    try:
        from . import _ckernel as _impl
    except ImportError:
        _impl = _pykernel

Collector = _impl.Collector
BACKEND = _impl.BACKEND
PyCollector = _pykernel.Collector


def available_backends():
    out = {"python": _pykernel.Collector}
    try:
        from . import _ckernel
    except ImportError:
        pass
    else:
        out["cython"] = _ckernel.Collector
    return out
