import numpy
from setuptools import setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/fatgraph/kernels/_core.pyx"],
        language_level=3,
    )
except ImportError:
    # the package runs on the pure backend when the extension is absent
    ext_modules = []

setup(
    ext_modules=ext_modules,
    include_dirs=[numpy.get_include()],
)
