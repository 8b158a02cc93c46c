"""Select the kernel backend at import time.

The compiled extension is preferred; ``DUNKLKIT_PURE=1`` forces the numpy
fallback.  Both expose the same functions.
"""

import os

from . import _core_py

core = _core_py
if os.environ.get("DUNKLKIT_PURE", "0") != "1":
    try:
        from . import _core as core  # noqa: F811
    except ImportError:  # extension not built
        core = _core_py

BACKEND = core.BACKEND
