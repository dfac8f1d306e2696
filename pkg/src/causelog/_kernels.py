"""Pick the search kernel: compiled extension when importable, pure Python otherwise.

Set ``CAUSELOG_BACKEND=python`` to force the fallback (``c`` to require the
extension).
"""

from __future__ import annotations

import os

from ._pykernel import OP_AND, OP_ATOM, OP_NOT, OP_OR, PyKernel

try:
    from ._ckernel import CKernel
except ImportError:  # extension not built
    CKernel = None

__all__ = ["OP_AND", "OP_ATOM", "OP_NOT", "OP_OR", "available_backends", "default_backend", "make_kernel"]


def available_backends() -> list[str]:
    return ["c", "python"] if CKernel is not None else ["python"]


def default_backend() -> str:
    wanted = os.environ.get("CAUSELOG_BACKEND", "").strip().lower()
    if wanted == "python":
        return "python"
    if wanted == "c" and CKernel is None:
        raise ImportError("CAUSELOG_BACKEND=c but causelog._ckernel is not built")
    return "c" if CKernel is not None else "python"


def make_kernel(compiled, backend: str | None = None):
    backend = backend or default_backend()
    if backend == "c":
        if CKernel is None:
            raise ImportError("compiled kernel not available")
        return CKernel(compiled)
    if backend == "python":
        return PyKernel(compiled)
    raise ValueError(f"unknown backend {backend!r}")
