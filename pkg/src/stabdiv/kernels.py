"""Backend selection for the exact arithmetic kernels.

The compiled extension is used when it was built; otherwise, or when the
environment variable ``STABDIV_PURE_PYTHON`` is set to a non-empty value,
the pure-Python module is used.  Both expose the same names.
"""

import os

if os.environ.get("STABDIV_PURE_PYTHON"):
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        from . import _kernels_py as _impl

BACKEND = _impl.BACKEND
GaussianRational = _impl.GaussianRational
add_terms = _impl.add_terms
mul_terms = _impl.mul_terms
order_key = _impl.order_key
leading = _impl.leading
divide_terms = _impl.divide_terms

__all__ = [
    "BACKEND",
    "GaussianRational",
    "add_terms",
    "mul_terms",
    "order_key",
    "leading",
    "divide_terms",
]
