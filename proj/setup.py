"""Build script for the compiled extension.

Static metadata lives in pyproject.toml; this file only wires up the
pybind11 extension, which setuptools cannot express declaratively. The
extension compiles the whole C++ core, so no separate library build is
needed before `pip install`.
"""

import os
from glob import glob

from pybind11.setup_helpers import ParallelCompile, Pybind11Extension, build_ext
from setuptools import setup


def eigen_include_dir():
    candidates = [
        os.environ.get("EIGEN3_INCLUDE_DIR"),
        "/usr/include/eigen3",
        "/usr/local/include/eigen3",
    ]
    for path in candidates:
        if path and os.path.isdir(os.path.join(path, "Eigen")):
            return path
    raise RuntimeError(
        "Eigen3 headers not found; set EIGEN3_INCLUDE_DIR to the directory "
        "containing Eigen/Core"
    )


ParallelCompile("RFLIN_NUM_BUILD_JOBS", default=4).install()

extension = Pybind11Extension(
    "rflin._core",
    sorted(glob("src/*.cpp")),
    include_dirs=["include", eigen_include_dir()],
    cxx_std=20,
)

setup(ext_modules=[extension], cmdclass={"build_ext": build_ext})
