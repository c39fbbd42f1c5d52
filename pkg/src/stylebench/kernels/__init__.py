"""Numeric kernel backends.

Two interchangeable implementations of the hot loops live here: ``_native``
(Cython, built by setup.py) and ``pure`` (no compiled code).  The compiled
backend is picked at import time when present; set ``STYLEBENCH_KERNELS`` to
``pure`` or ``native`` to force one.  Both produce bit-identical results, so
the choice only affects speed.
"""

from __future__ import annotations

import os

from . import pure

ENV_VAR = "STYLEBENCH_KERNELS"


def load_backend(name):
    """Return the kernel module for ``name`` ('pure' or 'native')."""
    if name == "pure":
        return pure
    if name == "native":
        from . import _native

        return _native
    raise ValueError(f"unknown kernel backend {name!r}")


def available_backends():
    """Names of importable backends, preferred first."""
    names = []
    try:
        load_backend("native")
        names.append("native")
    except ImportError:
        pass
    names.append("pure")
    return tuple(names)


def _select():
    requested = os.environ.get(ENV_VAR, "").strip().lower() or "auto"
    if requested == "pure":
        return pure
    if requested in ("auto", "native"):
        try:
            return load_backend("native")
        except ImportError:
            if requested == "native":
                raise ImportError(
                    f"{ENV_VAR}=native but the compiled kernel module is not "
                    "built; install the package (or unset the variable)"
                ) from None
            return pure
    raise ValueError(f"invalid {ENV_VAR} value {requested!r}; use 'pure' or 'native'")


_impl = _select()

backend_name = _impl.BACKEND

luma_u8 = _impl.luma_u8
resize_bilinear_u8 = _impl.resize_bilinear_u8
channel_sums = _impl.channel_sums
mse = _impl.mse
global_moments = _impl.global_moments
ssim_windowed_mean = _impl.ssim_windowed_mean
scale_shift_u8 = _impl.scale_shift_u8
