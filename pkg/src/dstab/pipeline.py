"""Verdict pipelines shared by the CLI and the HTTP service.

A full analysis runs the fixed-degree pre-check, enumerates the family's
vertex set, assembles and solves the vertex LMI system, and (unless asked
not to) cross-checks with the sampling falsifier.  Certification requires
both the verified feasibility margin and a clean oracle pass; a sampling
counterexample always wins over a certificate, and a failed degree check
downgrades any certificate to Undetermined.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import oracle
from .lmi import assemble_interval_vertex_system, assemble_polytope_vertex_system
from .oracle import SamplePlan, StabilityReport
from .problem import PlanSpec, ProblemSpec, SolverSpec
from .sdp import SolveOptions, SolveReport, solve_feasibility
from .uncertainty import (
    FixedDegreeReport,
    MultilinearFamily,
    PolytopicFamily,
    check_fixed_degree,
    polytopic_vertices,
)

CERTIFIED = "Certified"
FALSIFIED = "Falsified"
UNDETERMINED = "Undetermined"

EXIT_CERTIFIED = 0
EXIT_FALSIFIED = 1
EXIT_UNDETERMINED = 2
EXIT_INPUT_ERROR = 3


def resolve_plan(spec: PlanSpec, seed_default: int = 0, **overrides) -> SamplePlan:
    """Merge the file's plan section with explicit overrides (None means keep)."""
    values = {
        "include_corners": spec.include_corners,
        "grid_per_axis": spec.grid_per_axis,
        "random_count": spec.random_count,
        "seed": spec.seed if spec.seed is not None else seed_default,
        "edge_density": spec.edge_density,
    }
    for key, val in overrides.items():
        if val is not None:
            values[key] = val
    return SamplePlan(**values)


def resolve_solver(spec: SolverSpec, seed_default: int = 0, *,
                   margin_tol=None, max_iter=None, seed=None) -> SolveOptions:
    return SolveOptions(
        margin_tol=margin_tol if margin_tol is not None else spec.margin_tol,
        max_iter=max_iter if max_iter is not None else spec.max_iter,
        seed=seed if seed is not None else (spec.seed if spec.seed is not None else seed_default),
    )


def vertex_coefficient_matrices(family):
    if isinstance(family, MultilinearFamily):
        return [v.coefficient_matrix() for v in family.vertex_matrices()]
    if isinstance(family, PolytopicFamily):
        return [v.coefficient_matrix() for v in polytopic_vertices(family)]
    raise TypeError(f"unsupported family type {type(family)!r}")


def run_oracle(family, region, plan: SamplePlan) -> StabilityReport:
    if isinstance(family, MultilinearFamily):
        return oracle.sample_multilinear(family, region, plan)
    return oracle.sample_polytopic(family, region, plan)


@dataclass(frozen=True)
class AnalysisOutcome:
    verdict: str
    exit_code: int
    region_name: str
    stability_phrase: str
    family_kind: str
    fixed_degree: FixedDegreeReport
    lmi_count: int
    solver: SolveReport
    oracle_report: StabilityReport | None
    oracle_skipped: bool

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "exit_code": self.exit_code,
            "region": self.region_name,
            "stability": self.stability_phrase,
            "family_kind": self.family_kind,
            "fixed_degree": {
                "ok": self.fixed_degree.ok,
                "expected_degree": self.fixed_degree.expected_degree,
                "detail": self.fixed_degree.detail,
            },
            "lmi_count": self.lmi_count,
            "solver": {
                "status": self.solver.status,
                "margin": self.solver.margin,
                "iterations": self.solver.iterations,
            },
            "oracle": self.oracle_report.to_dict() if self.oracle_report is not None else None,
            "oracle_skipped": self.oracle_skipped,
        }

    def human_lines(self) -> list[str]:
        lines = [f"Verdict: {self.verdict} {self.stability_phrase}"
                 if self.verdict == CERTIFIED else f"Verdict: {self.verdict}"]
        lines.append(f"Region: {self.region_name}")
        lines.append(f"LMI system: {self.lmi_count} strict inequalities")
        lines.append(
            f"Solver: {self.solver.status}, verified margin {self.solver.margin:.6g}, "
            f"{self.solver.iterations} iterations"
        )
        if not self.fixed_degree.ok:
            lines.append(f"Fixed-degree check failed: {self.fixed_degree.detail}")
        if self.oracle_skipped:
            lines.append("Oracle: skipped (--no-oracle); verdict rests on the LMI certificate alone")
        elif self.oracle_report is not None:
            rep = self.oracle_report
            worst = "n/a" if rep.worst_margin is None else f"{rep.worst_margin:.6g}"
            lines.append(
                f"Oracle: {rep.status} over {rep.samples_checked} samples, worst region value {worst}"
            )
            if rep.falsified:
                lines.append(f"Witness: {rep.witness} with root {rep.witness_root}")
            if rep.status == oracle.DEGREE_DROP:
                lines.append(f"Degree drop at sample {rep.degree_drop_witness}")
        return lines


def stability_phrase(region) -> str:
    word = region.stability_word
    return f"robust {word} stable" if word in ("Hurwitz", "Schur") else "robust D-stable"


def run_analyze(problem: ProblemSpec, *, seed_default: int = 0,
                margin_tol=None, max_iter=None, seed=None,
                no_oracle: bool = False, shared_p=None) -> AnalysisOutcome:
    region = problem.to_region()
    family = problem.to_family()
    opts = resolve_solver(problem.solver, seed_default, margin_tol=margin_tol,
                          max_iter=max_iter, seed=seed)
    use_shared_p = problem.solver.shared_p if shared_p is None else shared_p

    fixed = check_fixed_degree(family, seed=opts.seed)
    cms = vertex_coefficient_matrices(family)
    assembler = assemble_interval_vertex_system if isinstance(family, MultilinearFamily) else assemble_polytope_vertex_system
    system = assembler(cms, region, shared_p=use_shared_p)
    solve_report = solve_feasibility(system, opts)

    oracle_report = None
    if not no_oracle:
        plan = resolve_plan(problem.plan, opts.seed)
        oracle_report = run_oracle(family, region, plan)

    if oracle_report is not None and oracle_report.falsified:
        verdict, code = FALSIFIED, EXIT_FALSIFIED
    elif (
        solve_report.feasible
        and fixed.ok
        and (no_oracle or oracle_report.status == oracle.NO_VIOLATION)
    ):
        verdict, code = CERTIFIED, EXIT_CERTIFIED
    else:
        verdict, code = UNDETERMINED, EXIT_UNDETERMINED

    return AnalysisOutcome(
        verdict=verdict,
        exit_code=code,
        region_name=region.name,
        stability_phrase=stability_phrase(region),
        family_kind=problem.family.kind,
        fixed_degree=fixed,
        lmi_count=system.lmi_count,
        solver=solve_report,
        oracle_report=oracle_report,
        oracle_skipped=no_oracle,
    )


@dataclass(frozen=True)
class SampleOutcome:
    report: StabilityReport
    exit_code: int
    region_name: str
    family_kind: str

    def to_dict(self) -> dict:
        out = self.report.to_dict()
        out["exit_code"] = self.exit_code
        out["region"] = self.region_name
        out["family_kind"] = self.family_kind
        return out

    def human_lines(self) -> list[str]:
        rep = self.report
        worst = "n/a" if rep.worst_margin is None else f"{rep.worst_margin:.6g}"
        lines = [f"Oracle: {rep.status}",
                 f"Samples checked: {rep.samples_checked}",
                 f"Worst region value: {worst}"]
        if rep.samples_checked == 0:
            lines.append("No samples were requested; nothing was checked")
        if rep.falsified:
            lines.append(f"Witness: {rep.witness} with root {rep.witness_root}")
        if rep.status == oracle.DEGREE_DROP:
            lines.append(f"Degree drop at sample {rep.degree_drop_witness}")
        return lines


_SAMPLE_EXIT = {
    oracle.NO_VIOLATION: 0,
    oracle.FALSIFIED: EXIT_FALSIFIED,
    oracle.DEGREE_DROP: EXIT_UNDETERMINED,
}


def run_sample(problem: ProblemSpec, *, seed_default: int = 0, **plan_overrides) -> SampleOutcome:
    region = problem.to_region()
    family = problem.to_family()
    plan = resolve_plan(problem.plan, seed_default, **plan_overrides)
    report = run_oracle(family, region, plan)
    return SampleOutcome(
        report=report,
        exit_code=_SAMPLE_EXIT[report.status],
        region_name=region.name,
        family_kind=problem.family.kind,
    )


def run_roots_csv(problem: ProblemSpec, *, seed_default: int = 0, **plan_overrides) -> str:
    family = problem.to_family()
    plan = resolve_plan(problem.plan, seed_default, **plan_overrides)
    return oracle.roots_csv(family, plan)
