from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "hotplug_caching._kernels",
                ["src/hotplug_caching/_kernels.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # no Cython: the package runs on the pure-Python kernels
    ext_modules = []

setup(ext_modules=ext_modules)
