"""Sampling falsifier and root-locus emitter.

Walks family members at deterministic sample points, roots each member's
determinant polynomial, and scores the roots against a region.  A positive
region value is a concrete counterexample; the same enumeration also feeds
the root-loci CSV so witness indices line up between the two outputs.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .regions import LmiRegion
from .uncertainty import (
    MultilinearFamily,
    PolytopicFamily,
    corners,
    edge_sample_items,
    random_weights,
)

NO_VIOLATION = "NoViolationFound"
FALSIFIED = "Falsified"
DEGREE_DROP = "DegreeDrop"

#: roots closer to the boundary than this are warnings, not violations
BOUNDARY_GRAZE = 1e-9

MAX_TOTAL_SAMPLES = 10 ** 6

CSV_HEADER = ("sample", "param_or_weight_json", "root_re", "root_im")


@dataclass(frozen=True)
class SamplePlan:
    include_corners: bool = True
    grid_per_axis: int = 0
    random_count: int = 0
    seed: int = 0
    edge_density: int = 0

    def __post_init__(self):
        if self.grid_per_axis < 0 or self.random_count < 0 or self.edge_density < 0:
            raise ValueError("plan counts must be nonnegative")


@dataclass(frozen=True)
class StabilityReport:
    status: str
    samples_checked: int
    worst_margin: float | None
    witness: object = None
    witness_root: complex | None = None
    boundary_grazing: int = 0
    degree_drop_witness: object = None

    @property
    def falsified(self) -> bool:
        return self.status == FALSIFIED

    def to_dict(self) -> dict:
        out = {
            "status": self.status,
            "samples_checked": self.samples_checked,
            "worst_margin": self.worst_margin,
            "boundary_grazing": self.boundary_grazing,
        }
        if self.witness is not None:
            out["witness"] = self.witness
            out["witness_root"] = [self.witness_root.real, self.witness_root.imag]
        if self.degree_drop_witness is not None:
            out["degree_drop_witness"] = self.degree_drop_witness
        return out


def _axis_points(lo: float, hi: float, count: int) -> np.ndarray:
    if count == 1:
        return np.array([0.5 * (lo + hi)])
    return np.linspace(lo, hi, count)


def multilinear_sample_points(f: MultilinearFamily, plan: SamplePlan):
    """Deterministic (label, q) stream: corners, then grid, then random draws."""
    box = f.box
    total = (2 ** box.m if plan.include_corners else 0)
    total += plan.grid_per_axis ** box.m + plan.random_count
    if total > MAX_TOTAL_SAMPLES:
        raise ValueError(f"sample plan guard exceeded ({total} > {MAX_TOTAL_SAMPLES})")
    if plan.include_corners:
        for q in corners(box):
            yield q
    if plan.grid_per_axis > 0:
        axes = [_axis_points(a, b, plan.grid_per_axis) for a, b in zip(box.lo, box.hi)]
        grids = np.meshgrid(*axes, indexing="ij")
        for q in zip(*(g.ravel() for g in grids)):
            yield tuple(float(v) for v in q)
    if plan.random_count > 0:
        rng = np.random.default_rng(plan.seed)
        lo = np.asarray(box.lo)
        span = np.asarray(box.hi) - lo
        for _ in range(plan.random_count):
            yield tuple(float(v) for v in lo + rng.random(box.m) * span)


def polytopic_sample_items(f: PolytopicFamily, plan: SamplePlan):
    """Deterministic (weights, member) stream: edge sweep, then random weights."""
    if plan.random_count > MAX_TOTAL_SAMPLES:
        raise ValueError(f"sample plan guard exceeded ({plan.random_count} > {MAX_TOTAL_SAMPLES})")
    if plan.edge_density > 0 or f.vertex_count == 1:
        density = max(plan.edge_density, 1)
        yield from edge_sample_items(f, density, plan.seed, MAX_TOTAL_SAMPLES)
    if plan.random_count > 0:
        rng = np.random.default_rng(plan.seed)
        for _ in range(plan.random_count):
            w = random_weights(f, rng)
            yield w, f.member(w)


def _scan(items, region: LmiRegion, expected_degree: int):
    """Shared scoring loop; items yield (payload, member)."""
    worst: float | None = None
    worst_payload = None
    worst_root = None
    grazing = 0
    drop_payload = None
    count = 0
    for payload, member in items:
        count += 1
        det = member.det_poly()
        if det.degree < expected_degree:
            if drop_payload is None:
                drop_payload = payload
            continue
        roots = det.roots()
        if roots.size == 0:
            continue
        values = np.array([region.value(r) for r in roots])
        top = int(np.argmax(values))
        value = float(values[top])
        grazing += int(np.count_nonzero(np.abs(values) < BOUNDARY_GRAZE))
        if worst is None or value > worst:
            worst = value
            worst_payload = payload
            worst_root = complex(roots[top])
    if worst is not None and worst >= BOUNDARY_GRAZE:
        status = FALSIFIED
    elif drop_payload is not None:
        status = DEGREE_DROP
    else:
        status = NO_VIOLATION
    return StabilityReport(
        status=status,
        samples_checked=count,
        worst_margin=worst,
        witness=worst_payload if status == FALSIFIED else None,
        witness_root=worst_root if status == FALSIFIED else None,
        boundary_grazing=grazing,
        degree_drop_witness=drop_payload,
    )


def sample_multilinear(f: MultilinearFamily, region: LmiRegion, plan: SamplePlan) -> StabilityReport:
    items = ((list(q), f.member_at(q)) for q in multilinear_sample_points(f, plan))
    return _scan(items, region, f.n * f.degree)


def sample_polytopic(f: PolytopicFamily, region: LmiRegion, plan: SamplePlan) -> StabilityReport:
    return _scan(polytopic_sample_items(f, plan), region, f.n * f.degree)


def _family_items(f, plan: SamplePlan):
    if isinstance(f, MultilinearFamily):
        return ((list(q), f.member_at(q)) for q in multilinear_sample_points(f, plan))
    if isinstance(f, PolytopicFamily):
        return polytopic_sample_items(f, plan)
    raise TypeError(f"unsupported family type {type(f)!r}")


def roots_csv(f, plan: SamplePlan) -> str:
    """Root-loci table: one row per (sample, root), shortest-roundtrip floats.

    Rows are sample-major with roots sorted by real then imaginary part;
    the payload column is the parameter vector (multilinear) or the
    entrywise weight grid (polytopic) as compact JSON.
    """
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for idx, (payload, member) in enumerate(_family_items(f, plan)):
        roots = sorted(member.det_poly().roots(), key=lambda r: (r.real, r.imag))
        payload_json = json.dumps(payload, separators=(",", ":"))
        for r in roots:
            writer.writerow((idx, payload_json, repr(float(r.real)), repr(float(r.imag))))
    return out.getvalue()
