from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    # Pure-Python fallback kernels are used when the extension is absent.
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("softarm._core", ["src/softarm/_core.pyx"])],
        language_level="3",
    )

setup(ext_modules=ext_modules)
