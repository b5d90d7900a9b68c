"""Backend selection for the hot kernels.

The compiled extension is preferred; set ``HYBD_PURE_PYTHON=1`` to force the
numpy fallback. ``BACKEND`` names the implementation in use.
"""
import os

from . import _kernels_py

if os.environ.get("HYBD_PURE_PYTHON"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND = "python" if _impl is _kernels_py else "compiled"

waterfill_level = _impl.waterfill_level
# numpy's BLAS matmul beats the hand loop at every codebook size we use
# (see benchmarks/bench_kernels.py), so scoring always takes the numpy path.
l1_scores = _kernels_py.l1_scores
