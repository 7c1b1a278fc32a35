"""Backend selection for the decoder and encoder kernels.

The compiled Cython module is used when it was built; otherwise the NumPy
implementation.  Set ``MACPOLAR_BACKEND=python`` to force the fallback.
"""
import os

from . import _sc_py

try:
    if os.environ.get("MACPOLAR_BACKEND", "").lower() == "python":
        raise ImportError("python backend forced")
    from . import _sc_core as _compiled
except ImportError:
    _compiled = None

BACKENDS = {"python": _sc_py}
if _compiled is not None:
    BACKENDS["cython"] = _compiled

BACKEND = "cython" if _compiled is not None else "python"


def get_backend(name: str | None = None):
    name = name or BACKEND
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(BACKENDS)}") from None


def sc_decode_batch(lik, free_mask, frozen, genie=None, want_post=False, backend=None):
    return get_backend(backend).sc_decode_batch(lik, free_mask, frozen, genie, want_post)


def polar_transform_bits(u, backend=None):
    return get_backend(backend).polar_transform_bits(u)
