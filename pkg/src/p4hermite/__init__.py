"""Rational solutions of Painleve-IV from generalized Hermite polynomials, and their asymptotics."""

__version__ = "0.1.0"

from .errors import P4Error  # noqa: E402
from .exact_algebra import ExactPoly, ExactRationalFn, gen_hermite, hermite  # noqa: E402
from .painleve4 import build_solution, eval_solution, p4_residual, scaled_eval  # noqa: E402
from .rootfinder import find_roots, scaled_zero_cloud  # noqa: E402
from .asymptotics import (asymptotic_w, boundary_function, corner_point, spectral_data,  # noqa: E402
                          trace_boundary, trace_sigma)

__all__ = [
    "P4Error", "ExactPoly", "ExactRationalFn", "gen_hermite", "hermite", "build_solution",
    "eval_solution", "p4_residual", "scaled_eval", "find_roots", "scaled_zero_cloud",
    "asymptotic_w", "boundary_function", "corner_point", "spectral_data", "trace_boundary",
    "trace_sigma",
]
