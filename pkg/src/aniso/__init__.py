"""Anisotropic simplex geometry, quality measures, local interpolation and mesh studies."""

from .basis import ElementKind, ShapeBasis, basis_for
from .errors import (
    AnisoError,
    DegenerateSimplex,
    FactorizationFailure,
    InvalidN,
    MissingDerivative,
    NonConformal,
    ParseError,
    QuadratureFailure,
    SingularGram,
    UnsupportedDegree,
    UnsupportedKind,
    WrongDimension,
)
from .geometry import Simplex, angles, edge_data, measure
from .harness import ConvergenceTable, StudyCase, inverse_inequality_check, make_case, run_study
from .interpolation import Interpolant, commuting_residual, interpolate, l2_project, rt0_interpolate
from .meshes import Mesh, conformity_check, generate, quality, read_mesh, write_mesh
from .norms import SeminormSpec, lp_norm, seminorm
from .quality import H_parameter, H_star, Taxonomy, classify, condition_report, equivalence_probe
from .standardization import factorize, standardize

__version__ = "0.1.0"

__all__ = [
    "AnisoError",
    "ConvergenceTable",
    "DegenerateSimplex",
    "ElementKind",
    "FactorizationFailure",
    "H_parameter",
    "H_star",
    "Interpolant",
    "InvalidN",
    "Mesh",
    "MissingDerivative",
    "NonConformal",
    "ParseError",
    "QuadratureFailure",
    "SeminormSpec",
    "ShapeBasis",
    "Simplex",
    "SingularGram",
    "StudyCase",
    "Taxonomy",
    "UnsupportedDegree",
    "UnsupportedKind",
    "WrongDimension",
    "angles",
    "basis_for",
    "classify",
    "commuting_residual",
    "condition_report",
    "conformity_check",
    "edge_data",
    "equivalence_probe",
    "factorize",
    "generate",
    "interpolate",
    "inverse_inequality_check",
    "l2_project",
    "lp_norm",
    "make_case",
    "measure",
    "quality",
    "read_mesh",
    "rt0_interpolate",
    "run_study",
    "seminorm",
    "standardize",
    "write_mesh",
]
