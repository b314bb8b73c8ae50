"""1D meshfree Lagrangian hydrodynamics with pluggable
partition-of-unity shape functions (SPH kernel, moving least-squares,
cubic B-spline), a reference SPH formulation, an exact Riemann solver,
and a Sod shock-tube harness."""

from .backend import COMPILED_AVAILABLE, USING_COMPILED
from .dynamics import SchemeConfig
from .riemann import RiemannState, solve_riemann
from .shapes import ShapeTable, bspline_shapes, mls_shapes, sph_shapes
from .sod import RunConfig, convergence_study, run, setup_sod
from .state import Eos, ParticleSystem

__version__ = "0.1.0"

__all__ = [
    "COMPILED_AVAILABLE", "USING_COMPILED", "SchemeConfig", "RiemannState",
    "solve_riemann", "ShapeTable", "bspline_shapes", "mls_shapes",
    "sph_shapes", "RunConfig", "convergence_study", "run", "setup_sod",
    "Eos", "ParticleSystem", "__version__",
]
