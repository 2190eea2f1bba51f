"""Build the optional Cython simulation kernel.

The package works without it: ``dyckmining.simulator`` falls back to the
pure-Python kernel when the extension cannot be imported.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("DYCKMINING_NO_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "dyckmining.simulator._kernel",
                    ["src/dyckmining/simulator/_kernel.pyx"],
                    include_dirs=[numpy.get_include()],
                    # keep float accumulation bit-identical to the Python kernel
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
