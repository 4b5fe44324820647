import os

from setuptools import setup
from setuptools.extension import Extension

# The compiled kernels are an optional speedup: the package falls back to
# sposs._kernels_py when the extension is absent or SPOSS_PURE_PYTHON is set.
ext_modules = []
if not os.environ.get("SPOSS_SKIP_EXT"):
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "sposs._ckernels",
                    [os.path.join("src", "sposs", "_ckernels.pyx")],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
