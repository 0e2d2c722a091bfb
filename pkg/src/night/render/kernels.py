"""Transport-kernel backend selection.

Prefers the compiled extension; falls back to the numpy implementation.
Set ``NIGHT_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from night.render import _transport_py

if os.environ.get("NIGHT_PURE_PYTHON") == "1":
    _impl = _transport_py
else:
    try:
        from night.render import _transport as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _transport_py

stage1_gather = _impl.stage1_gather
stage2_scatter = _impl.stage2_scatter


def backend_name() -> str:
    return _impl.BACKEND


def available_backends():
    out = {"numpy": _transport_py}
    try:
        from night.render import _transport

        out["cython"] = _transport
    except ImportError:
        pass
    return out
