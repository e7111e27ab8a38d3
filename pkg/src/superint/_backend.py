"""Kernel selection: compiled extension when present, pure Python otherwise.

Set ``SUPERINT_PURE=1`` to force the pure-Python kernel (used by the
benchmark and by tests that pin down behavioural equality).
"""

import os

if os.environ.get("SUPERINT_PURE") == "1":
    from . import _kernel_py as kernel
else:
    try:
        from . import _kernel as kernel  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernel_py as kernel

merge_swaps = kernel.merge_swaps
merge_sign = kernel.merge_sign
mul_masked = kernel.mul_masked
mul_keyed = kernel.mul_keyed
KERNEL_IMPLEMENTATION = kernel.IMPLEMENTATION
