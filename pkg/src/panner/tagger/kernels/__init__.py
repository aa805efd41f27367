"""Kernel backend selection.

The compiled Cython kernels are used when available; the pure-numpy module
is the fallback and the reference. ``PANNER_KERNELS=py`` forces the
fallback, ``PANNER_KERNELS=c`` requires the extension (ImportError if it
was not built). Both expose ``forward`` and ``backward`` with identical
signatures; ``benchmarks/bench_kernels.py`` compares them.
"""

import os

from . import _pykernels

_choice = os.environ.get("PANNER_KERNELS", "auto")

if _choice == "py":
    _impl = _pykernels
    BACKEND = "python"
elif _choice == "c":
    from . import _ckernels as _impl
    BACKEND = "c"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "c"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

forward = _impl.forward
backward = _impl.backward
gather_windows = _pykernels.gather_windows
