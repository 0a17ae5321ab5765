import numpy as np
import pytest

from dstab import numerics
from dstab.lmi import (
    AffineConstraint,
    ConstraintTerm,
    LmiSystem,
    VariableBlock,
    assemble_nullspace_test,
    assemble_interval_vertex_system,
    assemble_polytope_vertex_system,
    build_shift_selector,
    evaluate_constraint,
)
from dstab.polymatrix import Polynomial, PolynomialMatrix
from dstab.regions import region_lhp, region_unit_disk
from dstab.uncertainty import PolytopicFamily, polytopic_vertices

from _helpers import example1_family, scalar_polymatrix


class TestBuildShiftSelector:
    def test_scalar_first_order_is_identity(self):
        assert np.array_equal(build_shift_selector(1, 1), np.eye(2))

    def test_scalar_second_order_rows(self):
        expect = np.array([
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
        ])
        assert np.array_equal(build_shift_selector(1, 2), expect)

    def test_dimensions(self):
        assert build_shift_selector(1, 3).shape == (6, 4)
        assert build_shift_selector(3, 3).shape == (18, 12)

    def test_degree_zero_rejected(self):
        with pytest.raises(ValueError):
            build_shift_selector(2, 0)

    def test_gram_diagonal_is_one_or_two(self):
        for n, l in [(1, 1), (1, 3), (2, 2), (3, 3)]:
            r = build_shift_selector(n, l)
            diag = np.diag(r.T @ r)
            assert set(np.unique(diag)) <= {1.0, 2.0}
            # end blocks appear once, interior blocks twice
            assert np.all(diag[:n] == 1.0) and np.all(diag[-n:] == 1.0)
            if l > 1:
                assert np.all(diag[n:-n] == 2.0)


def nullspace_test_value(coeffs, region, p_value):
    system = assemble_nullspace_test(scalar_polymatrix(*coeffs).coefficient_matrix(), region)
    (con,) = system.constraints
    value = evaluate_constraint(con, {"P": np.atleast_2d(p_value)})
    return value, system


class TestAssembleNullspaceTest:
    def test_stable_first_order_lhp(self):
        # orthonormal null basis of (1, 1) turns the constraint into exactly -p
        value, system = nullspace_test_value([1.0, 1.0], region_lhp(), 3.0)
        assert value.shape == (1, 1)
        assert np.isclose(value[0, 0], -3.0)
        assert system.lmi_count == 2

    def test_unstable_first_order_lhp(self):
        value, _ = nullspace_test_value([-1.0, 1.0], region_lhp(), 3.0)
        assert np.isclose(value[0, 0], 3.0)  # +p: infeasible for p > 0

    def test_disk_case_sign(self):
        # with the orthonormal basis of (-0.5, 1) the value is -0.6 p (same sign
        # as the unnormalized -0.75 p hand computation)
        value, _ = nullspace_test_value([-0.5, 1.0], region_unit_disk(), 2.0)
        assert np.isclose(value[0, 0], -1.2)
        assert value[0, 0] < 0.0

    def test_block_shapes(self):
        system = assemble_nullspace_test(scalar_polymatrix(0.37, 1.82, 2.64, 1.0).coefficient_matrix(),
                                 region_lhp())
        (p_block,) = system.blocks
        assert (p_block.rows, p_block.cols) == (3, 3)
        (con,) = system.constraints
        assert con.dim == 3  # null space of a 1x4 row has dimension 3


class TestAssembleIntervalVertexSystem:
    def test_example1_shapes(self):
        fam = example1_family()
        cms = [v.coefficient_matrix() for v in fam.vertex_matrices()]
        system = assemble_interval_vertex_system(cms, region_lhp())
        assert len(system.constraints) == 8
        assert all(c.dim == 4 for c in system.constraints)
        p_blocks = [b for b in system.blocks if b.id.startswith("P")]
        q_blocks = [b for b in system.blocks if b.id == "Q"]
        assert len(p_blocks) == 8 and all((b.rows, b.cols) == (3, 3) for b in p_blocks)
        assert len(q_blocks) == 1 and (q_blocks[0].rows, q_blocks[0].cols) == (6, 1)
        assert system.lmi_count == 16

    def test_single_vertex_first_order(self):
        cms = [scalar_polymatrix(1.0, 1.0).coefficient_matrix()]
        system = assemble_interval_vertex_system(cms, region_lhp())
        assert len(system.constraints) == 1
        assert system.constraints[0].dim == 2
        by_id = system.blocks_by_id()
        assert (by_id["P0"].rows, by_id["P0"].cols) == (1, 1)
        assert (by_id["Q"].rows, by_id["Q"].cols) == (2, 1)

    def test_three_by_three_cubic_shapes(self):
        rng = np.random.default_rng(61)
        cms = [PolynomialMatrix(rng.normal(size=(4, 3, 3))).coefficient_matrix()
               for _ in range(8)]
        system = assemble_interval_vertex_system(cms, region_unit_disk())
        assert len(system.constraints) == 8
        assert all(c.dim == 12 for c in system.constraints)
        by_id = system.blocks_by_id()
        assert (by_id["P0"].rows, by_id["P0"].cols) == (9, 9)
        assert (by_id["Q"].rows, by_id["Q"].cols) == (18, 3)

    def test_shared_p_mode(self):
        fam = example1_family()
        cms = [v.coefficient_matrix() for v in fam.vertex_matrices()]
        system = assemble_interval_vertex_system(cms, region_lhp(), shared_p=True)
        p_blocks = [b for b in system.blocks if b.id.startswith("P")]
        assert len(p_blocks) == 1
        assert system.lmi_count == 9

    def test_dimension_mismatch_rejected(self):
        cms = [scalar_polymatrix(1.0, 1.0).coefficient_matrix(),
               scalar_polymatrix(1.0, 1.0, 1.0).coefficient_matrix()]
        with pytest.raises(ValueError):
            assemble_interval_vertex_system(cms, region_lhp())

    def test_empty_vertex_list_rejected(self):
        with pytest.raises(ValueError):
            assemble_interval_vertex_system([], region_lhp())


class TestAssemblePolytopeVertexSystem:
    def test_scalar_two_vertices(self):
        fam = PolytopicFamily([[[Polynomial((1.0, 1.0)), Polynomial((2.0, 1.0))]]])
        cms = [v.coefficient_matrix() for v in polytopic_vertices(fam)]
        system = assemble_polytope_vertex_system(cms, region_lhp())
        assert len(system.constraints) == 2
        p_blocks = [b for b in system.blocks if b.id.startswith("P")]
        assert len(p_blocks) == 2
        assert sum(1 for b in system.blocks if b.id == "Q") == 1

    def test_two_by_two_sixteen_constraints(self):
        p = Polynomial
        entries = [
            [[p((2.0, 1.0)), p((3.0, 1.0))], [p((0.1,)), p((0.2,))]],
            [[p((0.1,)), p((0.2,))], [p((2.0, 1.0)), p((3.0, 1.0))]],
        ]
        fam = PolytopicFamily(entries)
        cms = [v.coefficient_matrix() for v in polytopic_vertices(fam)]
        system = assemble_polytope_vertex_system(cms, region_lhp())
        assert len(system.constraints) == 16
        assert all(c.dim == 4 for c in system.constraints)

    def test_singleton_matches_interval_assembly(self):
        cm = scalar_polymatrix(1.0, 1.0).coefficient_matrix()
        sys4 = assemble_polytope_vertex_system([cm], region_lhp())
        sys2 = assemble_interval_vertex_system([cm], region_lhp())
        assert len(sys4.constraints) == len(sys2.constraints) == 1
        assignment = {"P0": np.array([[2.0]]), "Q": np.array([[0.5], [-0.25]])}
        v4 = evaluate_constraint(sys4.constraints[0], assignment)
        v2 = evaluate_constraint(sys2.constraints[0], assignment)
        assert np.array_equal(v4, v2)


class TestConstraintEvaluation:
    def random_assignment(self, system, rng):
        out = {}
        for block in system.blocks:
            m = rng.normal(size=(block.rows, block.cols))
            if block.kind == "symmetric_positive":
                m = 0.5 * (m + m.T)
            out[block.id] = m
        return out

    def test_evaluation_is_symmetric(self):
        rng = np.random.default_rng(71)
        fam = example1_family()
        cms = [v.coefficient_matrix() for v in fam.vertex_matrices()]
        system = assemble_interval_vertex_system(cms, region_lhp())
        assignment = self.random_assignment(system, rng)
        for con in system.constraints:
            value = evaluate_constraint(con, assignment)
            assert np.max(np.abs(value - value.T)) <= 1e-14 * max(1.0, np.max(np.abs(value)))

    def test_vertex_system_with_zero_q_projects_to_nullspace_test(self):
        for coeffs, region in [([1.0, 1.0], region_lhp()),
                               ([-1.0, 1.0], region_lhp()),
                               ([-0.5, 1.0], region_unit_disk())]:
            cm = scalar_polymatrix(*coeffs).coefficient_matrix()
            sys2 = assemble_interval_vertex_system([cm], region)
            single = assemble_nullspace_test(cm, region)
            p = np.array([[1.7]])
            full = evaluate_constraint(sys2.constraints[0], {"P0": p, "Q": np.zeros((2, 1))})
            nullsp = numerics.nullspace_basis(cm.data)
            projected = nullsp.T @ full @ nullsp
            direct = evaluate_constraint(single.constraints[0], {"P": p})
            assert np.allclose(projected, direct, atol=1e-12)

    def test_missing_block_rejected(self):
        system = assemble_nullspace_test(scalar_polymatrix(1.0, 1.0).coefficient_matrix(), region_lhp())
        with pytest.raises(KeyError):
            evaluate_constraint(system.constraints[0], {})


class TestSystemValidation:
    def test_undeclared_block_rejected(self):
        term = ConstraintTerm(np.eye(2), "missing", np.eye(2))
        con = AffineConstraint(2, np.zeros((2, 2)), (term,))
        with pytest.raises(ValueError):
            LmiSystem(blocks=(), constraints=(con,))

    def test_nonconforming_term_rejected(self):
        block = VariableBlock("P", "symmetric_positive", 2, 2)
        term = ConstraintTerm(np.eye(3), "P", np.eye(2, 3))
        con = AffineConstraint(3, np.zeros((3, 3)), (term,))
        with pytest.raises(ValueError):
            LmiSystem(blocks=(block,), constraints=(con,))

    def test_free_blocks_may_be_rectangular(self):
        VariableBlock("Q", "free", 4, 1)
        with pytest.raises(ValueError):
            VariableBlock("P", "symmetric_positive", 4, 1)
