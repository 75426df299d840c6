import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

ext = Extension(
    "segprice._kernels",
    ["src/segprice/_kernels.pyx"],
    include_dirs=[np.get_include()],
    optional=True,
)

setup(ext_modules=cythonize([ext], language_level=3))
