"""Hot-kernel backend selection.

Prefers the compiled extension; falls back to the NumPy implementation when
the extension is missing (or when COVSPECTRA_BACKEND=python forces it).
"""

import os

_forced = os.environ.get("COVSPECTRA_BACKEND", "auto").lower()

if _forced in ("auto", "cython"):
    try:
        from covspectra._kernels._cykernels import (
            BACKEND_NAME,
            jacobi_eigenvalues,
            normals,
            uniforms,
        )
    except ImportError:
        if _forced == "cython":
            raise
        from covspectra._kernels._pykernels import (
            BACKEND_NAME,
            jacobi_eigenvalues,
            normals,
            uniforms,
        )
elif _forced == "python":
    from covspectra._kernels._pykernels import (
        BACKEND_NAME,
        jacobi_eigenvalues,
        normals,
        uniforms,
    )
else:
    raise ImportError(f"unknown COVSPECTRA_BACKEND value: {_forced!r}")

__all__ = ["BACKEND_NAME", "jacobi_eigenvalues", "normals", "uniforms"]
