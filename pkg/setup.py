import os

from setuptools import Extension, setup


def ext_modules():
    if os.environ.get("RISAMBC_NO_EXT"):
        return []
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "risambc._core",
        ["src/risambc/_core.pyx"],
        include_dirs=[np.get_include()],
        # no contraction/fast-math: MC kernels must match the numpy fallback bit for bit
        extra_compile_args=["-O3", "-ffp-contract=off"],
        optional=True,
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=ext_modules())
