"""Robust D-stability certification for uncertain polynomial matrix families.

Two uncertainty models are supported: interval multilinear families and
polytopic families.  Verdicts combine a vertex LMI feasibility certificate
with a sampling root-locus falsifier, each computed independently.
"""

from .polymatrix import CoefficientMatrix, Polynomial, PolynomialMatrix, scale_add
from .regions import LmiRegion, region_lhp, region_unit_disk, region_value
from .uncertainty import (
    FixedDegreeReport,
    MultilinearFamily,
    MultilinearScalar,
    ParameterBox,
    PolytopicFamily,
    check_fixed_degree,
    corners,
    edge_samples,
    hull_weights,
    polytopic_member,
    polytopic_vertices,
)
from .lmi import (
    AffineConstraint,
    ConstraintTerm,
    LmiSystem,
    StructurallyInfeasibleError,
    VariableBlock,
    assemble_nullspace_test,
    assemble_interval_vertex_system,
    assemble_polytope_vertex_system,
    build_shift_selector,
    evaluate_constraint,
)
from .sdp import SolveOptions, SolveReport, residual_check, solve_feasibility
from .oracle import SamplePlan, StabilityReport, roots_csv, sample_multilinear, sample_polytopic

__version__ = "0.1.0"

__all__ = [
    "AffineConstraint",
    "CoefficientMatrix",
    "ConstraintTerm",
    "FixedDegreeReport",
    "LmiRegion",
    "LmiSystem",
    "MultilinearFamily",
    "MultilinearScalar",
    "ParameterBox",
    "Polynomial",
    "PolynomialMatrix",
    "PolytopicFamily",
    "SamplePlan",
    "SolveOptions",
    "SolveReport",
    "StabilityReport",
    "StructurallyInfeasibleError",
    "VariableBlock",
    "assemble_nullspace_test",
    "assemble_interval_vertex_system",
    "assemble_polytope_vertex_system",
    "build_shift_selector",
    "check_fixed_degree",
    "corners",
    "edge_samples",
    "evaluate_constraint",
    "hull_weights",
    "polytopic_member",
    "polytopic_vertices",
    "region_lhp",
    "region_unit_disk",
    "region_value",
    "residual_check",
    "roots_csv",
    "sample_multilinear",
    "sample_polytopic",
    "scale_add",
    "solve_feasibility",
]
