import os

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

here = os.path.dirname(os.path.abspath(__file__))

sources = [
    "src/cmatrix.cpp",
    "src/rootdata.cpp",
    "src/quadrature.cpp",
    "src/group.cpp",
    "src/integrand.cpp",
    "src/threshold.cpp",
    "src/arithmetic.cpp",
    "src/verify.cpp",
    "src/pymodule.cpp",
]

eigen_candidates = ["/usr/include/eigen3", "/usr/local/include/eigen3"]
eigen = next((d for d in eigen_candidates if os.path.isdir(d)), eigen_candidates[0])

# setuptools requires source paths relative to this file
ext = Pybind11Extension(
    "supq._core",
    sources=sources,
    include_dirs=[os.path.join(here, "include"), os.path.join(here, "vendor"), eigen],
    cxx_std=20,
)

setup(ext_modules=[ext], cmdclass={"build_ext": build_ext})
