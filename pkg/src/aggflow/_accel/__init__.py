"""Backend selection for the per-step hot kernels.

The compiled extension is preferred when importable; the NumPy implementation
is the fallback and the reference.  ``AGGFLOW_BACKEND=py`` or ``=cy`` forces a
choice (forcing ``cy`` raises if the extension is unavailable).
"""

import os

from . import _kernels_py

_choice = os.environ.get("AGGFLOW_BACKEND", "").strip().lower()

if _choice in ("py", "python"):
    backend = _kernels_py
elif _choice in ("cy", "cython", "c"):
    from . import _kernels_cy as backend  # noqa: F401  (ImportError is the contract)
else:
    try:
        from . import _kernels_cy as backend  # type: ignore[no-redef]
    except ImportError:
        backend = _kernels_py

BACKEND_NAME = backend.BACKEND_NAME

etd2_coeffs = backend.etd2_coeffs
etdrk4_coeffs = backend.etdrk4_coeffs
axpy_fused = backend.axpy_fused
etd2_correct = backend.etd2_correct
rk4_stage_c = backend.rk4_stage_c
rk4_combine = backend.rk4_combine
max_combined_speed = backend.max_combined_speed
