"""Problem-file schema and conversion to domain objects.

Problem files are JSON documents with a region, one family (multilinear or
polytopic), and optional solver/plan sections.  Matrices are nested arrays
in row-major order, polynomial coefficients ascend in degree, and parameter
indices are 1-based.  The same pydantic models validate HTTP request bodies
in the service layer, so CLI and service accept identical documents.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Annotated, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .polymatrix import Polynomial, PolynomialMatrix
from .regions import LmiRegion, region_lhp, region_unit_disk
from .uncertainty import MultilinearFamily, MultilinearScalar, ParameterBox, PolytopicFamily


class ProblemFormatError(ValueError):
    """Problem document failed to parse or validate; message carries the location."""


class _StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class RegionSpec(_StrictModel):
    type: Literal["lhp", "disk", "custom"]
    B: list[list[float]] | None = None

    @model_validator(mode="after")
    def _b_only_for_custom(self):
        if self.type == "custom":
            if self.B is None:
                raise ValueError("custom regions need the 2x2 matrix B")
        elif self.B is not None:
            raise ValueError("B is only valid for custom regions")
        return self

    def to_region(self) -> LmiRegion:
        if self.type == "lhp":
            return region_lhp()
        if self.type == "disk":
            return region_unit_disk()
        return LmiRegion(np.asarray(self.B, dtype=float), name="custom")


class TermSpec(_StrictModel):
    subset: list[int] = Field(default_factory=list)
    coef: float


class CoefficientSpec(_StrictModel):
    terms: list[TermSpec]


class MultilinearFamilySpec(_StrictModel):
    kind: Literal["multilinear"]
    n: int = Field(ge=1)
    l: int = Field(ge=0)
    N: int = Field(ge=1)
    bases: list[list[list[list[float]]]]
    base_scale: float = 1.0
    coeffs: list[CoefficientSpec]
    box: list[list[float]]

    @model_validator(mode="after")
    def _shapes(self):
        if len(self.bases) != self.N or len(self.coeffs) != self.N:
            raise ValueError(f"expected N={self.N} bases and coefficient functions")
        for b, base in enumerate(self.bases):
            if len(base) != self.l + 1:
                raise ValueError(f"bases[{b}] needs l+1={self.l + 1} degree blocks")
            for k, block in enumerate(base):
                if len(block) != self.n or any(len(row) != self.n for row in block):
                    raise ValueError(f"bases[{b}][{k}] must be {self.n}x{self.n}")
        for i, pair in enumerate(self.box):
            if len(pair) != 2:
                raise ValueError(f"box[{i}] must be a [lo, hi] pair")
            if pair[0] > pair[1]:
                raise ValueError(f"box[{i}] needs lo <= hi")
        m = len(self.box)
        for c, spec in enumerate(self.coeffs):
            for t, term in enumerate(spec.terms):
                if any(i < 1 or i > m for i in term.subset):
                    raise ValueError(f"coeffs[{c}].terms[{t}].subset indices must lie in 1..{m}")
                if len(set(term.subset)) != len(term.subset):
                    raise ValueError(f"coeffs[{c}].terms[{t}].subset has repeated indices")
        return self

    def to_family(self) -> MultilinearFamily:
        m = len(self.box)
        bases = [
            PolynomialMatrix(self.base_scale * np.asarray(base, dtype=float))
            for base in self.bases
        ]
        coeffs = [
            MultilinearScalar.from_terms(m, [(t.subset, t.coef) for t in spec.terms])
            for spec in self.coeffs
        ]
        box = ParameterBox(tuple(p[0] for p in self.box), tuple(p[1] for p in self.box))
        return MultilinearFamily(bases, coeffs, box)


class PolytopicFamilySpec(_StrictModel):
    kind: Literal["polytopic"]
    n: int = Field(ge=1)
    degree: int = Field(ge=0)
    entries: list[list[list[list[float]]]]

    @model_validator(mode="after")
    def _shapes(self):
        if len(self.entries) != self.n or any(len(row) != self.n for row in self.entries):
            raise ValueError(f"entries must form an {self.n}x{self.n} grid")
        counts = {len(vertices) for row in self.entries for vertices in row}
        if len(counts) != 1:
            raise ValueError("every entry must list the same number of vertex polynomials")
        if counts.pop() < 1:
            raise ValueError("each entry needs at least one vertex polynomial")
        for i, row in enumerate(self.entries):
            for j, vertices in enumerate(row):
                for k, coeffs in enumerate(vertices):
                    if not 1 <= len(coeffs) <= self.degree + 1:
                        raise ValueError(
                            f"entries[{i}][{j}][{k}] needs 1..{self.degree + 1} ascending coefficients"
                        )
        return self

    def to_family(self) -> PolytopicFamily:
        grid = [
            [
                [Polynomial(tuple(c)).padded(self.degree) for c in vertices]
                for vertices in row
            ]
            for row in self.entries
        ]
        return PolytopicFamily(grid)


FamilySpec = Annotated[Union[MultilinearFamilySpec, PolytopicFamilySpec], Field(discriminator="kind")]


class SolverSpec(_StrictModel):
    margin_tol: float = Field(default=1e-7, gt=0)
    max_iter: int = Field(default=500, ge=1)
    seed: int | None = None
    shared_p: bool = False


class PlanSpec(_StrictModel):
    include_corners: bool = True
    grid_per_axis: int = Field(default=0, ge=0)
    random_count: int = Field(default=0, ge=0)
    seed: int | None = None
    edge_density: int = Field(default=0, ge=0)


class ProblemSpec(_StrictModel):
    name: str = ""
    region: RegionSpec
    family: FamilySpec
    solver: SolverSpec = Field(default_factory=SolverSpec)
    plan: PlanSpec = Field(default_factory=PlanSpec)

    def to_region(self) -> LmiRegion:
        return self.region.to_region()

    def to_family(self):
        return self.family.to_family()


def _format_validation_error(exc: ValidationError) -> str:
    lines = []
    for err in exc.errors():
        loc = ".".join(str(p) for p in err["loc"]) or "<root>"
        lines.append(f"{loc}: {err['msg']}")
    return "; ".join(lines)


def parse_problem(data) -> ProblemSpec:
    """Validate an already-decoded JSON document."""
    try:
        return ProblemSpec.model_validate(data)
    except ValidationError as exc:
        raise ProblemFormatError(_format_validation_error(exc)) from exc


def load_problem(path) -> ProblemSpec:
    """Read and validate a problem file; failures carry location diagnostics."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ProblemFormatError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemFormatError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    try:
        return parse_problem(data)
    except ProblemFormatError as exc:
        raise ProblemFormatError(f"{path}: {exc}") from exc
