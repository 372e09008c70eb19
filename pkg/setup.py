import sys

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "holoflow._kernel._stepper",
                ["src/holoflow/_kernel/_stepper.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build environment dependent
    sys.stderr.write(
        "holoflow: building without the compiled stepper (%s); "
        "the pure-Python kernel will be used\n" % exc
    )

setup(ext_modules=ext_modules)
