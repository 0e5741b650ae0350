"""Backend selection for the time-stepping kernel.

The compiled extension is used when it imported successfully; the pure-numpy
fallback is always available. Set NLKGLAB_FORCE_PY=1 to force the fallback
(used by the equivalence tests and the benchmark).
"""

from __future__ import annotations

import os

from . import _stepper_py

if os.environ.get("NLKGLAB_FORCE_PY") == "1":
    _impl = _stepper_py
    BACKEND = "python"
else:
    try:
        from . import _stepper as _impl  # type: ignore[attr-defined]
        BACKEND = "compiled"
    except ImportError:
        _impl = _stepper_py
        BACKEND = "python"

step_batch = _impl.step_batch


def backends():
    """All importable stepper backends, name -> step_batch."""
    table = {"python": _stepper_py.step_batch}
    try:
        from . import _stepper  # type: ignore[attr-defined]
        table["compiled"] = _stepper.step_batch
    except ImportError:
        pass
    return table
