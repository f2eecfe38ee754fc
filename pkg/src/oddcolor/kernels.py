"""Backend selection for the hot loops.

The compiled ``_kernels`` extension is used when it imports; otherwise the
numpy fallback in ``_pykernels`` is.  Set ``ODDCOLOR_PURE_PYTHON=1`` to force
the fallback.  Both expose identical functions with identical outputs.
"""

from __future__ import annotations

import os

from . import _pykernels as python_backend

compiled_backend = None
if not os.environ.get("ODDCOLOR_PURE_PYTHON"):
    try:
        from . import _kernels as compiled_backend  # type: ignore[no-redef]
    except ImportError:  # extension not built
        compiled_backend = None

backend = compiled_backend if compiled_backend is not None else python_backend
BACKEND = backend.NAME


def available() -> dict:
    """Name -> module for every importable backend."""
    out = {"python": python_backend}
    if compiled_backend is not None:
        out["cython"] = compiled_backend
    return out


def get(name: str | None = None):
    if name is None:
        return backend
    try:
        return available()[name]
    except KeyError:
        raise ValueError(f"backend {name!r} is not available") from None
