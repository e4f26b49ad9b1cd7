import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None


def make_extension(source: str) -> Extension:
    return Extension(
        "garope._cl3ext",
        [source],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3"],
        optional=True,  # on build failure the numpy fallback is selected at import
    )


if cythonize is not None:
    ext_modules = cythonize(
        [make_extension("src/garope/_cl3ext.pyx")],
        compiler_directives={"language_level": "3"},
    )
else:
    # build from the pregenerated C so Cython is not an install requirement
    ext_modules = [make_extension("src/garope/_cl3ext.c")]

setup(ext_modules=ext_modules)
