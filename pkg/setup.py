"""Build script: compiles the optional Cython kernel.

The compiled extension accelerates tree growing and Shapley attribution.
If Cython or a C compiler is unavailable the build falls back to a
pure-Python wheel; the package selects the backend at import time.
Set TEXTATTRIB_PURE_PYTHON=1 to skip compilation entirely.
"""

import os
import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

# contraction to fused multiply-add would break bit-identity with the
# pure-Python backend
if sys.platform == "win32":
    EXTRA_ARGS = ["/fp:precise"]
else:
    EXTRA_ARGS = ["-O2", "-ffp-contract=off"]


class optional_build_ext(build_ext):
    """Never let a failed extension build abort the install."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            print(f"textattrib: skipping compiled kernels ({exc})")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"textattrib: skipping {ext.name} ({exc})")


ext_modules = []
cmdclass = {}
if os.environ.get("TEXTATTRIB_PURE_PYTHON") != "1":
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "textattrib._kernels",
                    ["src/textattrib/_kernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=EXTRA_ARGS,
                )
            ],
            language_level=3,
        )
        cmdclass["build_ext"] = optional_build_ext
    except ImportError as exc:
        print(f"textattrib: Cython/numpy unavailable, pure-Python build ({exc})")

setup(ext_modules=ext_modules, cmdclass=cmdclass)
