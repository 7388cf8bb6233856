"""Build hook for the compiled layout kernel.

The package works without the extension (a pure-Python fallback is selected at
import time), so a missing compiler or Cython only costs speed.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "triview._layout_native",
                ["src/triview/_layout_native.pyx"],
                # -ffp-contract=off keeps the C kernel bit-identical to the
                # pure-Python fallback (no FMA contraction).
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
