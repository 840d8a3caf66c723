"""Build script: compiles the optional Cython kernel extension.

If the extension cannot be built (no compiler, no Cython), the package
still installs and falls back to the pure-numpy kernels at import time.
"""

import numpy as np
from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Build the extension if possible; warn and continue otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # pragma: no cover - build environment dependent
            print(f"WARNING: C extension build failed ({exc}); "
                  "kgz2d will use the pure-numpy kernel fallback.")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover
            print(f"WARNING: building {ext.name} failed ({exc}); "
                  "kgz2d will use the pure-numpy kernel fallback.")


extensions = [
    Extension(
        "kgz2d._kernels._core",
        ["src/kgz2d/_kernels/_core.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        extensions,
        language_level=3,
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "initializedcheck": False,
            "cdivision": True,
        },
    )
except ImportError:  # pragma: no cover
    extensions = []

setup(ext_modules=extensions, cmdclass={"build_ext": optional_build_ext})
