"""The two uncertainty models and their vertex/edge enumerations.

An interval multilinear family mixes N fixed polynomial matrices with scalar
coefficient functions that are affine in each interval parameter separately.
A polytopic family lets every matrix entry range over its own polytope of
polynomials with a shared vertex count.  Both enumerations are deterministic,
so parallel mapping over corners or vertices is safe.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .polymatrix import Polynomial, PolynomialMatrix, scale_add

MAX_BOX_PARAMS = 20
MAX_POLYTOPE_VERTICES = 10 ** 6
MAX_EDGE_MATRIX_DIM = 5
MAX_EDGE_SAMPLES = 10 ** 6


@dataclass(frozen=True)
class ParameterBox:
    """Axis-aligned parameter box; lo[i] <= q_i <= hi[i]."""

    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        if len(lo) != len(hi):
            raise ValueError("lo and hi must have the same length")
        if any(a > b for a, b in zip(lo, hi)):
            raise ValueError("each interval needs lo <= hi")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def m(self) -> int:
        return len(self.lo)

    def contains(self, q) -> bool:
        q = tuple(float(v) for v in q)
        if len(q) != self.m:
            return False
        return all(a <= v <= b for v, a, b in zip(q, self.lo, self.hi))


@dataclass(frozen=True)
class MultilinearScalar:
    """Multilinear function of q_1..q_m, stored sparsely by index subset.

    Keys are frozensets of 1-based parameter indices; the empty set is the
    constant term.  Value at q is sum over subsets of coef * prod of the
    selected coordinates.
    """

    m: int
    terms: tuple[tuple[frozenset[int], float], ...]

    @classmethod
    def from_terms(cls, m: int, terms) -> "MultilinearScalar":
        merged: dict[frozenset[int], float] = {}
        for subset, coef in terms:
            key = frozenset(int(i) for i in subset)
            merged[key] = merged.get(key, 0.0) + float(coef)
        normalized = tuple(sorted(merged.items(), key=lambda kv: (len(kv[0]), sorted(kv[0]))))
        return cls(m=m, terms=normalized)

    def __post_init__(self):
        for subset, coef in self.terms:
            if any(i < 1 or i > self.m for i in subset):
                raise ValueError("term indices must lie in 1..m")
            if not np.isfinite(coef):
                raise ValueError("term coefficients must be finite")

    def __call__(self, q) -> float:
        q = tuple(float(v) for v in q)
        if len(q) != self.m:
            raise ValueError(f"expected {self.m} parameter values, got {len(q)}")
        total = 0.0
        for subset, coef in self.terms:
            prod = coef
            for i in subset:
                prod *= q[i - 1]
            total += prod
        return total


def eval_coeff(a: MultilinearScalar, q) -> float:
    return a(q)


def corners(box: ParameterBox) -> list[tuple[float, ...]]:
    """All 2^m corner vectors, low endpoint before high, last coordinate fastest."""
    if box.m > MAX_BOX_PARAMS:
        raise ValueError(f"corner enumeration guard exceeded (m={box.m} > {MAX_BOX_PARAMS})")
    return list(itertools.product(*[(a, b) for a, b in zip(box.lo, box.hi)]))


def hull_weights(box: ParameterBox, q) -> np.ndarray:
    """Convex weights over the corner set that reproduce q multilinearly.

    Per coordinate the low endpoint carries weight (hi - q_j)/(hi - lo) and
    the high endpoint the complement; a corner's weight is the product over
    coordinates.  Degenerate intervals put their whole weight on the low
    branch.  Any multilinear function then satisfies
    ``f(q) == sum(weight_c * f(corner_c))``.
    """
    q = tuple(float(v) for v in q)
    if not box.contains(q):
        raise ValueError("q lies outside the parameter box")
    per_coord = []
    for v, a, b in zip(q, box.lo, box.hi):
        if b == a:
            per_coord.append((1.0, 0.0))
        else:
            w_lo = (b - v) / (b - a)
            per_coord.append((w_lo, 1.0 - w_lo))
    weights = np.ones(1)
    for w_lo, w_hi in per_coord:
        weights = np.kron(weights, [w_lo, w_hi])
    return weights


class MultilinearFamily:
    """Members are sum_i a_i(q) * base_i(s) for q in the box."""

    __slots__ = ("bases", "coeffs", "box")

    def __init__(self, bases, coeffs, box: ParameterBox):
        bases = tuple(bases)
        coeffs = tuple(coeffs)
        if not bases or len(bases) != len(coeffs):
            raise ValueError("need equally many bases and coefficient functions")
        n = bases[0].n
        if any(p.n != n for p in bases):
            raise ValueError("bases must share the matrix dimension")
        degree = max(p.degree for p in bases)
        bases = tuple(p.padded(degree) for p in bases)
        if any(a.m != box.m for a in coeffs):
            raise ValueError("coefficient functions must match the box parameter count")
        self.bases = bases
        self.coeffs = coeffs
        self.box = box

    @property
    def count(self) -> int:
        return len(self.bases)

    @property
    def n(self) -> int:
        return self.bases[0].n

    @property
    def degree(self) -> int:
        return self.bases[0].degree

    def member_at(self, q) -> PolynomialMatrix:
        if not self.box.contains(q):
            raise ValueError("q lies outside the parameter box")
        return scale_add([(a(q), p) for a, p in zip(self.coeffs, self.bases)])

    def vertex_matrices(self) -> list[PolynomialMatrix]:
        """Members at every box corner, in corner order; duplicates retained."""
        return [self.member_at(c) for c in corners(self.box)]

    def leading_value(self, q) -> float:
        """Leading-coefficient scalar (n=1) or leading-block determinant (n>1)."""
        lead = sum(a(q) * p.blocks[-1] for a, p in zip(self.coeffs, self.bases))
        return float(lead[0, 0]) if self.n == 1 else float(np.linalg.det(lead))


def member_at(f: MultilinearFamily, q) -> PolynomialMatrix:
    return f.member_at(q)


def vertex_matrices(f: MultilinearFamily) -> list[PolynomialMatrix]:
    return f.vertex_matrices()


class PolytopicFamily:
    """Every entry (i, j) ranges over the polytope spanned by its m vertex polynomials."""

    __slots__ = ("entries", "vertex_count", "degree")

    def __init__(self, entries):
        n = len(entries)
        if n < 1 or any(len(row) != n for row in entries):
            raise ValueError("entry grid must be square")
        counts = {len(vertices) for row in entries for vertices in row}
        if len(counts) != 1:
            raise ValueError("all entries must have the same number of vertex polynomials")
        vertex_count = counts.pop()
        if vertex_count < 1:
            raise ValueError("each entry needs at least one vertex polynomial")
        degree = max(p.degree for row in entries for vertices in row for p in vertices)
        self.entries = tuple(
            tuple(tuple(p.padded(degree) for p in vertices) for vertices in row) for row in entries
        )
        self.vertex_count = vertex_count
        self.degree = degree

    @property
    def n(self) -> int:
        return len(self.entries)

    def member(self, lambdas) -> PolynomialMatrix:
        """Entrywise convex combination; lambdas is an n x n grid of weight lists."""
        n, m = self.n, self.vertex_count
        grid = []
        for i in range(n):
            row = []
            for j in range(n):
                w = np.asarray(lambdas[i][j], dtype=float)
                if w.shape != (m,):
                    raise ValueError(f"entry ({i},{j}) needs {m} weights")
                if np.min(w) < -1e-9 or abs(float(np.sum(w)) - 1.0) > 1e-9:
                    raise ValueError(f"entry ({i},{j}) weights must be nonnegative and sum to 1")
                coeffs = np.zeros(self.degree + 1)
                for wk, p in zip(w, self.entries[i][j]):
                    coeffs += wk * np.asarray(p.coeffs)
                row.append(Polynomial(tuple(coeffs)))
            grid.append(row)
        return PolynomialMatrix.from_entries(grid)

    def vertex_assignment(self, choice) -> PolynomialMatrix:
        """Member with entry (i, j) at vertex choice[i][j]."""
        grid = [
            [self.entries[i][j][choice[i][j]] for j in range(self.n)]
            for i in range(self.n)
        ]
        return PolynomialMatrix.from_entries(grid)

    def indicator_weights(self, choice) -> list[list[list[float]]]:
        m = self.vertex_count
        return [
            [[1.0 if k == choice[i][j] else 0.0 for k in range(m)] for j in range(self.n)]
            for i in range(self.n)
        ]

    def leading_value_of(self, member: PolynomialMatrix) -> float:
        lead = member.padded(self.degree).blocks[-1]
        return float(lead[0, 0]) if self.n == 1 else float(np.linalg.det(lead))


def polytopic_member(f: PolytopicFamily, lambdas) -> PolynomialMatrix:
    return f.member(lambdas)


def polytopic_vertices(f: PolytopicFamily) -> list[PolynomialMatrix]:
    """All entrywise vertex selections, mixed-radix order with the last entry fastest."""
    n, m = f.n, f.vertex_count
    total = m ** (n * n)
    if total > MAX_POLYTOPE_VERTICES:
        raise ValueError(f"vertex enumeration guard exceeded ({total} > {MAX_POLYTOPE_VERTICES})")
    out = []
    for flat in itertools.product(range(m), repeat=n * n):
        choice = [list(flat[i * n : (i + 1) * n]) for i in range(n)]
        out.append(f.vertex_assignment(choice))
    return out


def _edge_lambda_grid(density: int) -> list[float]:
    if density < 1:
        raise ValueError("edge density must be >= 1")
    return [k / density for k in range(density + 1)]


def edge_sample_items(f: PolytopicFamily, density: int, seed: int = 0,
                      max_samples: int = MAX_EDGE_SAMPLES):
    """Edge-set members as (weights, member) pairs.

    Per permutation of the rows, the entry (k, perm[k]) of each row sweeps a
    segment between two of its vertex polynomials while every other entry
    sits at a vertex.  Segment endpoints are enumerated as unordered vertex
    pairs (the reversed pair traces the same segment) and the sweep uses
    ``density + 1`` evenly spaced interpolation weights.  If the full
    enumeration would exceed ``max_samples`` it is replaced by that many
    seeded uniform draws from the same space.
    """
    n, m = f.n, f.vertex_count
    if n > MAX_EDGE_MATRIX_DIM:
        raise ValueError(f"edge enumeration guard exceeded (n={n} > {MAX_EDGE_MATRIX_DIM})")
    if m == 1:
        # Degenerate polytopes: the single vertex is the whole edge set.
        choice = [[0] * n for _ in range(n)]
        yield f.indicator_weights(choice), f.vertex_assignment(choice)
        return

    lambdas = _edge_lambda_grid(density)
    pairs = list(itertools.combinations(range(m), 2))
    perms = list(itertools.permutations(range(n)))
    n_free = n * n - n
    total = len(perms) * (len(pairs) * len(lambdas)) ** n * m ** n_free

    def build(perm, pair_per_row, lam_per_row, free_choice):
        weights = [[None] * n for _ in range(n)]
        free_iter = iter(free_choice)
        for i in range(n):
            for j in range(n):
                if j == perm[i]:
                    u, v = pair_per_row[i]
                    lam = lam_per_row[i]
                    w = [0.0] * m
                    w[u] += lam
                    w[v] += 1.0 - lam
                else:
                    w = [0.0] * m
                    w[next(free_iter)] = 1.0
                weights[i][j] = w
        return weights, f.member(weights)

    if total <= max_samples:
        for perm in perms:
            for pair_per_row in itertools.product(pairs, repeat=n):
                for lam_per_row in itertools.product(lambdas, repeat=n):
                    for free_choice in itertools.product(range(m), repeat=n_free):
                        yield build(perm, pair_per_row, lam_per_row, free_choice)
    else:
        rng = np.random.default_rng(seed)
        for _ in range(max_samples):
            perm = perms[rng.integers(len(perms))]
            pair_per_row = tuple(pairs[rng.integers(len(pairs))] for _ in range(n))
            lam_per_row = tuple(lambdas[rng.integers(len(lambdas))] for _ in range(n))
            free_choice = tuple(int(rng.integers(m)) for _ in range(n_free))
            yield build(perm, pair_per_row, lam_per_row, free_choice)


def edge_samples(f: PolytopicFamily, density: int, seed: int = 0) -> list[PolynomialMatrix]:
    return [member for _, member in edge_sample_items(f, density, seed)]


@dataclass(frozen=True)
class FixedDegreeReport:
    """Outcome of the fixed-degree pre-check (exact for scalar families, heuristic above)."""

    ok: bool
    expected_degree: int
    detail: str


def check_fixed_degree(family, seed: int = 0, random_count: int = 100) -> FixedDegreeReport:
    """Verify the family's determinant degree cannot drop.

    Checks the leading coefficient (n = 1) or the leading-block determinant
    (n > 1) for a nonzero constant sign at every corner/vertex plus random
    interior samples.  Corner checks are exact in the scalar case because
    multilinear scalars attain their extrema at box corners; the matrix case
    is a labeled heuristic.
    """
    rng = np.random.default_rng(seed)
    if isinstance(family, MultilinearFamily):
        expected = family.n * family.degree
        values = [family.leading_value(c) for c in corners(family.box)]
        lo = np.asarray(family.box.lo)
        span = np.asarray(family.box.hi) - lo
        for _ in range(random_count):
            q = lo + rng.random(family.box.m) * span
            values.append(family.leading_value(q))
    elif isinstance(family, PolytopicFamily):
        expected = family.n * family.degree
        values = [family.leading_value_of(v) for v in polytopic_vertices(family)]
        for _ in range(random_count):
            values.append(family.leading_value_of(family.member(random_weights(family, rng))))
    else:
        raise TypeError(f"unsupported family type {type(family)!r}")

    vmax = float(np.max(np.abs(values)))
    if vmax == 0.0:
        return FixedDegreeReport(False, expected, "leading coefficient vanishes identically")
    small = [v for v in values if abs(v) <= 1e-9 * vmax]
    if small:
        return FixedDegreeReport(False, expected, "leading coefficient approaches zero inside the family")
    if min(values) < 0.0 < max(values):
        return FixedDegreeReport(False, expected, "leading coefficient changes sign inside the family")
    mode = "exact corner check" if getattr(family, "n", 0) == 1 else "heuristic sampling check"
    return FixedDegreeReport(True, expected, f"constant-sign leading coefficient ({mode})")


def random_weights(f: PolytopicFamily, rng: np.random.Generator) -> list[list[list[float]]]:
    """Uniform-on-the-simplex weights per entry via normalized exponentials."""
    n, m = f.n, f.vertex_count
    out = []
    for _ in range(n):
        row = []
        for _ in range(n):
            e = -np.log(rng.random(m))
            row.append(list(e / np.sum(e)))
        out.append(row)
    return out
