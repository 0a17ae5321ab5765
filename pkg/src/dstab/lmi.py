"""Assembly of the vertex feasibility systems as affine matrix constraints.

A system owns symmetric-positive and free decision blocks plus strict
definiteness constraints that are affine in those blocks.  The negativity
constraints are stored in the expanded form

    sum_ab b_ab * R_a^T P R_b  +  sym(R^T Q C)  <  0

(R_a are the two row blocks of the selector matrix R, C a vertex coefficient
matrix) rather than as the equivalent bordered block matrix: that keeps the
constraint dimension at (l+1)n while describing the same feasible set.
Strictness carries no baked-in epsilon; the solver maximizes a uniform
margin instead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numerics
from .polymatrix import CoefficientMatrix
from .regions import LmiRegion

SYMMETRIC_POSITIVE = "symmetric_positive"
FREE = "free"

NEGATIVE_DEFINITE = "negative_definite"
POSITIVE_DEFINITE = "positive_definite"


class StructurallyInfeasibleError(ValueError):
    """Raised when a coefficient matrix has an empty right null space."""


@dataclass(frozen=True)
class VariableBlock:
    id: str
    kind: str
    rows: int
    cols: int

    def __post_init__(self):
        if self.kind not in (SYMMETRIC_POSITIVE, FREE):
            raise ValueError(f"unknown block kind {self.kind!r}")
        if self.kind == SYMMETRIC_POSITIVE and self.rows != self.cols:
            raise ValueError("symmetric-positive blocks must be square")
        if self.rows < 1 or self.cols < 1:
            raise ValueError("block dimensions must be positive")


@dataclass(frozen=True)
class ConstraintTerm:
    """One affine contribution left @ X @ right, optionally plus its transpose."""

    left: np.ndarray
    block_id: str
    right: np.ndarray
    symmetrize: bool = False


@dataclass(frozen=True)
class AffineConstraint:
    dim: int
    constant: np.ndarray
    terms: tuple[ConstraintTerm, ...]
    sense: str = NEGATIVE_DEFINITE
    label: str = ""

    def __post_init__(self):
        if self.sense not in (NEGATIVE_DEFINITE, POSITIVE_DEFINITE):
            raise ValueError(f"unknown constraint sense {self.sense!r}")
        c = numerics.as_matrix(self.constant)
        if c.shape != (self.dim, self.dim):
            raise ValueError("constant block must be dim x dim")


@dataclass(frozen=True)
class LmiSystem:
    blocks: tuple[VariableBlock, ...]
    constraints: tuple[AffineConstraint, ...]
    selector: np.ndarray | None = None

    def __post_init__(self):
        by_id = self.blocks_by_id()
        if len(by_id) != len(self.blocks):
            raise ValueError("duplicate block ids")
        for con in self.constraints:
            for term in con.terms:
                blk = by_id.get(term.block_id)
                if blk is None:
                    raise ValueError(f"constraint references undeclared block {term.block_id!r}")
                if term.left.shape != (con.dim, blk.rows) or term.right.shape != (blk.cols, con.dim):
                    raise ValueError(f"term for block {term.block_id!r} has nonconforming factors")

    def blocks_by_id(self) -> dict[str, VariableBlock]:
        return {b.id: b for b in self.blocks}

    @property
    def lmi_count(self) -> int:
        """Strict inequalities in the system: constraints plus positivity conditions."""
        return len(self.constraints) + sum(1 for b in self.blocks if b.kind == SYMMETRIC_POSITIVE)


def evaluate_constraint(con: AffineConstraint, assignment: dict[str, np.ndarray]) -> np.ndarray:
    """Value of the constraint's matrix expression at a block assignment."""
    acc = np.array(con.constant, dtype=float)
    for term in con.terms:
        if term.block_id not in assignment:
            raise KeyError(f"assignment is missing block {term.block_id!r}")
        m = term.left @ np.asarray(assignment[term.block_id], dtype=float) @ term.right
        acc += m + m.T if term.symmetrize else m
    return acc


def build_shift_selector(n: int, l: int) -> np.ndarray:
    """Selector matrix with top block (I_nl | 0) and bottom block (0 | I_nl).

    Shape is 2nl x (l+1)n; it picks the low- and high-degree halves out of a
    stacked coefficient vector.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if l < 1:
        raise ValueError("degree must be >= 1 (a constant matrix has no companion structure)")
    eye = np.eye(n * l)
    zero = np.zeros((n * l, n))
    top = np.hstack([eye, zero])
    bottom = np.hstack([zero, eye])
    return np.vstack([top, bottom])


def _region_quadratic_terms(region: LmiRegion, block_id: str,
                            left_stack: np.ndarray, right_stack: np.ndarray,
                            half: int) -> list[ConstraintTerm]:
    """Terms realizing sum_ab b_ab * L_a^T X R_b with L/R split into two row halves."""
    b = region.b
    halves_l = (left_stack[:half], left_stack[half:])
    halves_r = (right_stack[:half], right_stack[half:])
    terms = []
    for a in range(2):
        if b[a, a] != 0.0:
            terms.append(ConstraintTerm(b[a, a] * halves_l[a].T, block_id, halves_r[a], False))
    if b[0, 1] != 0.0:
        terms.append(ConstraintTerm(b[0, 1] * halves_l[0].T, block_id, halves_r[1], True))
    return terms


def assemble_nullspace_test(ca: CoefficientMatrix, region: LmiRegion,
                            nullspace_tol: float = 1e-10) -> LmiSystem:
    """Single-matrix test: N^T (sum_ab b_ab R_a^T P R_b) N < 0 with P > 0.

    N spans the right null space of the coefficient matrix; an empty null
    space means the test cannot even be posed and raises.
    """
    if ca.l < 1:
        raise ValueError("degree must be >= 1")
    nullsp = numerics.nullspace_basis(ca.data, tol=nullspace_tol)
    if nullsp.shape[1] == 0:
        raise StructurallyInfeasibleError("coefficient matrix has full column rank (empty null space)")
    r = build_shift_selector(ca.n, ca.l)
    rn = r @ nullsp
    p_block = VariableBlock("P", SYMMETRIC_POSITIVE, ca.n * ca.l, ca.n * ca.l)
    dim = nullsp.shape[1]
    terms = _region_quadratic_terms(region, "P", rn, rn, ca.n * ca.l)
    con = AffineConstraint(dim, np.zeros((dim, dim)), tuple(terms), NEGATIVE_DEFINITE, "projected")
    return LmiSystem(blocks=(p_block,), constraints=(con,), selector=r)


def _assemble_vertex_system(vertex_cms: list[CoefficientMatrix], region: LmiRegion,
                            shared_p: bool, label: str) -> LmiSystem:
    if not vertex_cms:
        raise ValueError("need at least one vertex coefficient matrix")
    n, l = vertex_cms[0].n, vertex_cms[0].l
    if l < 1:
        raise ValueError("degree must be >= 1")
    if any((cm.n, cm.l) != (n, l) for cm in vertex_cms):
        raise ValueError("vertex coefficient matrices must share dimensions")
    r = build_shift_selector(n, l)
    dim = (l + 1) * n

    blocks: list[VariableBlock] = []
    if shared_p:
        blocks.append(VariableBlock("P", SYMMETRIC_POSITIVE, n * l, n * l))
    else:
        blocks.extend(VariableBlock(f"P{i}", SYMMETRIC_POSITIVE, n * l, n * l)
                      for i in range(len(vertex_cms)))
    blocks.append(VariableBlock("Q", FREE, 2 * n * l, n))

    constraints = []
    for i, cm in enumerate(vertex_cms):
        p_id = "P" if shared_p else f"P{i}"
        terms = _region_quadratic_terms(region, p_id, r, r, n * l)
        terms.append(ConstraintTerm(r.T, "Q", cm.data, True))
        constraints.append(
            AffineConstraint(dim, np.zeros((dim, dim)), tuple(terms),
                             NEGATIVE_DEFINITE, f"{label}_{i}")
        )
    return LmiSystem(blocks=tuple(blocks), constraints=tuple(constraints), selector=r)


def assemble_interval_vertex_system(vertex_cms: list[CoefficientMatrix], region: LmiRegion,
                                    shared_p: bool = False) -> LmiSystem:
    """Vertex system for an interval multilinear family.

    One positive block per vertex (or a single shared one in the stricter
    mode) plus one shared free block coupling all vertex constraints.
    """
    return _assemble_vertex_system(vertex_cms, region, shared_p, "vertex")


def assemble_polytope_vertex_system(vertex_cms: list[CoefficientMatrix], region: LmiRegion,
                                    shared_p: bool = False) -> LmiSystem:
    """Vertex system for a polytopic family; same structure as the multilinear one."""
    return _assemble_vertex_system(vertex_cms, region, shared_p, "pvertex")
