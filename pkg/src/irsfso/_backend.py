"""Import-time choice between the compiled kernels and the numpy fallback.

Set ``IRSFSO_BACKEND=python`` to force the fallback, ``compiled`` to require
the extension (import fails loudly if it is missing).
"""

import os

from . import _kernels_py as python_kernels

_choice = os.environ.get("IRSFSO_BACKEND", "auto").strip().lower()

if _choice == "python":
    kernels = python_kernels
else:
    try:
        from . import _kernels as kernels
    except ImportError:
        if _choice == "compiled":
            raise
        kernels = python_kernels

BACKEND = kernels.BACKEND_NAME
