"""Step-kernel selection: compiled extension when available, numpy otherwise.

Set ``PQWALK_BACKEND=python`` or ``PQWALK_BACKEND=compiled`` to force a
choice; the default (``auto``) prefers the compiled kernels.
"""

import os

from . import _kernels_py

_CHOICE = os.environ.get("PQWALK_BACKEND", "auto").strip().lower()


def _load():
    if _CHOICE in ("python", "py"):
        return _kernels_py
    try:
        from . import _ckernels
    except ImportError:
        if _CHOICE in ("compiled", "c", "cython"):
            raise ImportError(
                "PQWALK_BACKEND=compiled but the pqwalk._ckernels extension "
                "is not built; reinstall with a C compiler available"
            )
        return _kernels_py
    return _ckernels


kernels = _load()
BACKEND = kernels.BACKEND


def compiled_available():
    try:
        from . import _ckernels  # noqa: F401
    except ImportError:
        return False
    return True
