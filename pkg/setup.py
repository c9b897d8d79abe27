"""Build script. The compiled domain kernel is optional: when Cython or a C
compiler is missing the install falls back to the pure-Python kernel."""
import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext
from setuptools.errors import CCompilerError, ExecError, PlatformError


class optional_build_ext(build_ext):
    def run(self):
        try:
            build_ext.run(self)
        except (CCompilerError, ExecError, PlatformError, OSError) as e:
            print("building the compiled kernel failed (%s); "
                  "using the pure-Python kernel" % e, file=sys.stderr)

    def build_extension(self, ext):
        try:
            build_ext.build_extension(self, ext)
        except (CCompilerError, ExecError, PlatformError, OSError) as e:
            print("building %s failed (%s); using the pure-Python kernel"
                  % (ext.name, e), file=sys.stderr)


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        print("Cython not available; using the pure-Python kernel",
              file=sys.stderr)
        return []
    from setuptools import Extension
    return cythonize(
        [Extension("fdsteer._domain_cy", ["src/fdsteer/_domain_cy.pyx"])],
        language_level=3,
    )


setup(
    ext_modules=extensions(),
    cmdclass={"build_ext": optional_build_ext},
)
