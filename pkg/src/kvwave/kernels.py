"""Backend selection for the pointwise hot kernels.

Prefers the compiled extension; falls back to the NumPy implementation when
the extension is absent. Set ``KVWAVE_FORCE_NUMPY=1`` to force the fallback
(used by the benchmark and when debugging).
"""

import os

from . import _kernels_np

if os.environ.get("KVWAVE_FORCE_NUMPY", "") not in ("", "0"):
    _impl = _kernels_np
    BACKEND = "numpy"
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_np
        BACKEND = "numpy"

truncated_power5 = _impl.truncated_power5
truncated_power5_prime = _impl.truncated_power5_prime
truncated_power5_antiderivative = _impl.truncated_power5_antiderivative
weighted_abs_power_sum = _impl.weighted_abs_power_sum
potential_sum = _impl.potential_sum
max_abs = _impl.max_abs


def backend_name():
    return BACKEND
