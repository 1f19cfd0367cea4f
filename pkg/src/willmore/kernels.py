"""Select the compiled Picard kernel when available, else the numpy one.

Set ``WILLMORE_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _pykernel

try:
    if os.environ.get("WILLMORE_PURE_PYTHON"):
        raise ImportError("pure Python requested")
    from . import _ckernel
except ImportError:
    _ckernel = None

BACKEND = "cython" if _ckernel is not None else "python"
picard_solve = _ckernel.picard_solve if _ckernel is not None else _pykernel.picard_solve
python_picard_solve = _pykernel.picard_solve
compiled_picard_solve = _ckernel.picard_solve if _ckernel is not None else None
