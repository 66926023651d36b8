import numpy as np
import pytest

from ddqsim.circuit import Gate, cx
from ddqsim.dd import StructureError, mat_to_dense, vec_from_dense, vec_to_dense
from ddqsim.gates import gate_matrix_dd
from ddqsim.partition import (
    GLOBAL,
    LOCAL,
    PartitionPlan,
    classify_gate,
    extract_block,
    merge_state,
    split_state,
)
from ddqsim.swaps import QubitLayout
from conftest import build_reference_vector, random_state


class TestPlan:
    def test_rank_count_power_of_two(self):
        assert PartitionPlan.for_ranks(5, 4) == PartitionPlan(5, 2)
        with pytest.raises(ValueError):
            PartitionPlan.for_ranks(5, 3)

    def test_rank_count_bounded_by_state_size(self):
        PartitionPlan(2, 2)  # P = 2^N allowed
        with pytest.raises(ValueError):
            PartitionPlan(2, 3)

    def test_areas(self):
        plan = PartitionPlan(5, 2)
        assert plan.ranks == 4
        assert plan.n_local == 3


class TestSplitState:
    def test_basis_state_lands_on_rank_zero(self, ctx):
        plan = PartitionPlan(3, 2)
        parts = split_state(ctx, ctx.zero_state(3), plan)
        np.testing.assert_allclose(vec_to_dense(parts[0], 1), [1, 0], atol=0)
        assert all(p.is_zero for p in parts[1:])

    def test_reference_vector_concatenation(self, ctx):
        root = build_reference_vector(ctx)
        plan = PartitionPlan(3, 2)
        parts = split_state(ctx, root, plan)
        dense = np.concatenate([vec_to_dense(p, 1) for p in parts])
        np.testing.assert_allclose(dense, vec_to_dense(root, 3), atol=0)

    def test_product_state_single_nonzero_part(self, ctx):
        # |110100>: top bits 11 -> rank 3 under P=4
        vec = np.zeros(64)
        vec[0b110100] = 1.0
        e = vec_from_dense(ctx, vec)
        parts = split_state(ctx, e, PartitionPlan(6, 2))
        nonzero = [r for r, p in enumerate(parts) if not p.is_zero]
        assert nonzero == [3]

    def test_width_mismatch_rejected(self, ctx):
        with pytest.raises(StructureError):
            split_state(ctx, ctx.zero_state(3), PartitionPlan(4, 1))

    def test_scalar_slices_when_ranks_equal_state_size(self, ctx, rng):
        plan = PartitionPlan(2, 2)
        vec, e = random_state(ctx, 2, rng)
        parts = split_state(ctx, e, plan)
        got = np.array([p.w if not p.is_zero else 0 for p in parts])
        np.testing.assert_allclose(got, vec, atol=1e-12)
        merged = merge_state(ctx, parts, plan)
        np.testing.assert_allclose(vec_to_dense(merged, 2), vec, atol=1e-12)


class TestMergeState:
    def test_merge_of_basis_parts(self, ctx):
        plan = PartitionPlan(3, 2)
        parts = [ctx.zero_state(1), ctx.zero_edge, ctx.zero_edge, ctx.zero_edge]
        merged = merge_state(ctx, parts, plan)
        np.testing.assert_allclose(vec_to_dense(merged, 3), vec_to_dense(ctx.zero_state(3), 3))

    def test_merge_of_all_zero_parts(self, ctx):
        assert merge_state(ctx, [ctx.zero_edge] * 4, PartitionPlan(3, 2)).is_zero

    @pytest.mark.parametrize("m", [1, 2, 3])
    def test_split_merge_roundtrip(self, ctx, rng, m):
        plan = PartitionPlan(6, m)
        vec, e = random_state(ctx, 6, rng)
        merged = merge_state(ctx, split_state(ctx, e, plan), plan)
        np.testing.assert_allclose(vec_to_dense(merged, 6), vec, atol=1e-12)
        assert merged.node is e.node

    def test_merge_split_roundtrip(self, ctx, rng):
        plan = PartitionPlan(5, 2)
        parts_in = [random_state(ctx, 3, rng)[1] for _ in range(4)]
        parts_out = split_state(ctx, merge_state(ctx, parts_in, plan), plan)
        for a, b in zip(parts_in, parts_out):
            np.testing.assert_allclose(vec_to_dense(a, 3), vec_to_dense(b, 3), atol=1e-12)

    def test_wrong_part_count_rejected(self, ctx):
        with pytest.raises(StructureError):
            merge_state(ctx, [ctx.zero_edge] * 3, PartitionPlan(3, 2))


class TestExtractBlock:
    def test_identity_blocks(self, ctx):
        plan = PartitionPlan(4, 2)
        ident = ctx.identity_dd(4)
        for r in range(4):
            for c in range(4):
                block = extract_block(ctx, ident, r, c, plan)
                if r == c:
                    assert block.node is ctx.identity_dd(2).node
                else:
                    assert block.is_zero

    def test_h_on_top_qubit_blocks(self, ctx):
        plan = PartitionPlan(2, 1)
        m = gate_matrix_dd(ctx, Gate("h", (1,)), 2)
        s = 1 / np.sqrt(2)
        want = {(0, 0): s, (0, 1): s, (1, 0): s, (1, 1): -s}
        for (r, c), coeff in want.items():
            block = extract_block(ctx, m, r, c, plan)
            np.testing.assert_allclose(mat_to_dense(block, 1), coeff * np.eye(2), atol=1e-12)

    def test_local_gate_blocks_diagonal(self, ctx):
        plan = PartitionPlan(4, 2)
        m = gate_matrix_dd(ctx, Gate("h", (0,)), 4)
        diag = [extract_block(ctx, m, r, r, plan) for r in range(4)]
        assert all(b.node is diag[0].node for b in diag)
        for r in range(4):
            for c in range(4):
                if r != c:
                    assert extract_block(ctx, m, r, c, plan).is_zero

    def test_block_sum_reconstruction(self, ctx, rng):
        """Blockwise v'_r = sum_c w_rc v_c against the dense product."""
        from conftest import random_circuit

        for n, m_global in ((4, 1), (5, 2)):
            plan = PartitionPlan(n, m_global)
            circuit = random_circuit(n, 4, rng)
            vec, ev = random_state(ctx, n, rng)
            parts = split_state(ctx, ev, plan)
            for g in circuit.gates:
                mdd = gate_matrix_dd(ctx, g, n)
                dense_m = mat_to_dense(mdd, n)
                want = dense_m @ vec
                width = 1 << plan.n_local
                for r in range(plan.ranks):
                    acc = ctx.zero_edge
                    for c in range(plan.ranks):
                        block = extract_block(ctx, mdd, r, c, plan)
                        acc = ctx.add(acc, ctx.multiply(block, parts[c]))
                    np.testing.assert_allclose(
                        vec_to_dense(acc, plan.n_local),
                        want[r * width:(r + 1) * width],
                        atol=1e-10,
                    )

    def test_index_out_of_range(self, ctx):
        with pytest.raises(ValueError):
            extract_block(ctx, ctx.identity_dd(3), 4, 0, PartitionPlan(3, 2))


class TestClassify:
    def test_low_position_local(self):
        plan = PartitionPlan(3, 2)
        assert classify_gate(Gate("h", (0,)), plan, QubitLayout(3)) == LOCAL

    def test_high_position_global(self):
        plan = PartitionPlan(3, 2)
        assert classify_gate(Gate("h", (2,)), plan, QubitLayout(3)) == GLOBAL

    def test_any_touched_global_position_suffices(self):
        plan = PartitionPlan(4, 1)
        assert classify_gate(cx(0, 3), plan, QubitLayout(4)) == GLOBAL
        assert classify_gate(cx(3, 0), plan, QubitLayout(4)) == GLOBAL

    def test_layout_mapping_respected(self):
        plan = PartitionPlan(3, 1)
        layout = QubitLayout(3)
        layout.swap_physical(0, 2)
        assert classify_gate(Gate("h", (2,)), plan, layout) == LOCAL
        assert classify_gate(Gate("h", (0,)), plan, layout) == GLOBAL

    def test_p1_never_global(self):
        plan = PartitionPlan(3, 0)
        assert classify_gate(Gate("h", (2,)), plan, QubitLayout(3)) == LOCAL
