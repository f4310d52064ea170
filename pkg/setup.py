"""Build script: compiles the optional extension core.

The package works without the extension (a NumPy fallback is selected at
import time), so a failed compile only costs speed. -ffp-contract=off keeps
the accept/reject arithmetic of the polar sampler bit-identical to the
fallback's IEEE semantics.
"""

import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


class _OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # toolchain missing: fall back to pure python
            print(f"warning: extension build skipped ({exc})", file=sys.stderr)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: building {ext.name} failed ({exc})", file=sys.stderr)


def _extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    from setuptools import Extension

    ext = Extension(
        "covspectra._kernels._cykernels",
        ["src/covspectra/_kernels/_cykernels.pyx"],
        extra_compile_args=["-O3", "-ffp-contract=off"],
    )
    return cythonize([ext], language_level="3")


setup(ext_modules=_extensions(), cmdclass={"build_ext": _OptionalBuildExt})
