"""Tests for the partition-constraint solver."""

import math

import numpy as np
import pytest

from subdetmax.errors import DimensionError
from subdetmax.kernel import KernelInstance
from subdetmax.instances import gen_random_partition
from subdetmax.numkernel import gram_volume_logmag
from subdetmax.oracle import brute_force_partition
from subdetmax.partition_solver import (
    PartitionInstance,
    eval_fractional_volume,
    blended_columns,
    partition_certificate_log,
    reduce_to_unit_quotas,
    round_to_vertex,
    rounding_chain,
    solve_partition,
    trials_for_confidence,
    vertex_support,
)
from subdetmax.simplexdomain import (
    ProductSimplexVertex,
    sample_uniform,
    substream,
    vertex_to_point,
)


def singleton_instance(v):
    """Each column is its own part with quota one."""
    m = v.shape[1]
    parts = tuple((i,) for i in range(m))
    return PartitionInstance(KernelInstance.from_factor(v), parts, (1,) * m)


class TestValidation:
    def test_parts_must_cover_all_columns(self):
        k = KernelInstance.from_factor(np.eye(3))
        with pytest.raises(ValueError):
            PartitionInstance(k, ((0, 1),), (1,))

    def test_overlapping_parts_rejected(self):
        k = KernelInstance.from_factor(np.eye(3))
        with pytest.raises(ValueError):
            PartitionInstance(k, ((0, 1), (1, 2)), (1, 1))

    def test_quota_above_part_size_rejected(self):
        k = KernelInstance.from_factor(np.eye(3))
        with pytest.raises(ValueError):
            PartitionInstance(k, ((0, 1), (2,)), (3, 0))

    def test_total_quota_above_rank_rejected(self):
        v = np.array([[1.0, 0.0, 1.0]])  # rank 1
        k = KernelInstance.from_factor(v)
        with pytest.raises(ValueError):
            PartitionInstance(k, ((0, 1, 2),), (2,))

    def test_all_zero_quotas_rejected(self):
        k = KernelInstance.from_factor(np.eye(2))
        with pytest.raises(ValueError):
            PartitionInstance(k, ((0,), (1,)), (0, 0))


class TestReduction:
    def test_unit_quotas_pass_through(self):
        inst = singleton_instance(np.eye(3))
        uq = reduce_to_unit_quotas(inst)
        assert uq.blocks == ((0,), (1,), (2,))
        assert uq.origin == (0, 1, 2)

    def test_single_part_replicates(self):
        k = KernelInstance.from_factor(np.eye(3))
        inst = PartitionInstance(k, ((0, 1, 2),), (3,))
        uq = reduce_to_unit_quotas(inst)
        assert uq.blocks == ((0, 1, 2),) * 3
        assert uq.origin == (0, 0, 0)

    def test_mixed_quotas(self):
        k = KernelInstance.from_factor(np.eye(4))
        inst = PartitionInstance(k, ((0, 1, 2), (3,)), (2, 1))
        uq = reduce_to_unit_quotas(inst)
        assert uq.blocks == ((0, 1, 2), (0, 1, 2), (3,))
        assert uq.origin == (0, 0, 1)

    def test_zero_quota_part_drops_out(self):
        k = KernelInstance.from_factor(np.eye(3))
        inst = PartitionInstance(k, ((0, 1), (2,)), (1, 0))
        uq = reduce_to_unit_quotas(inst)
        assert uq.blocks == ((0, 1),)


class TestEvaluation:
    def test_orthonormal_vertex_has_unit_volume(self):
        inst = singleton_instance(np.eye(3))
        uq = reduce_to_unit_quotas(inst)
        x = vertex_to_point(uq.shape, ProductSimplexVertex((0, 0, 0)))
        lm = eval_fractional_volume(uq, x)
        assert lm.sign == 1 and lm.log_abs == pytest.approx(0.0, abs=1e-12)

    def test_duplicate_choice_is_degenerate(self):
        k = KernelInstance.from_factor(np.eye(2))
        inst = PartitionInstance(k, ((0, 1),), (2,))
        uq = reduce_to_unit_quotas(inst)
        x = vertex_to_point(uq.shape, ProductSimplexVertex((0, 0)))
        assert eval_fractional_volume(uq, x).sign == 0

    def test_matches_direct_reassembly(self):
        # independent evaluation: build W(x) column by column, then its volume
        rng = substream(21, 0)
        inst = gen_random_partition(6, 2, (1, 1), 4, rng)
        uq = reduce_to_unit_quotas(inst)
        v = inst.kernel.factor
        for t in range(25):
            x = sample_uniform(uq.shape, substream(21, t + 1))
            w = np.zeros((4, 2))
            for i, block in enumerate(uq.blocks):
                for j, col in enumerate(block):
                    w[:, i] += x.blocks[i][j] * v[:, col]
            expect = gram_volume_logmag(w)
            got = eval_fractional_volume(uq, x)
            assert got.log_abs == pytest.approx(expect.log_abs, rel=1e-12, abs=1e-12)
            np.testing.assert_allclose(blended_columns(uq, x), w, atol=1e-12)

    def test_shape_mismatch_rejected(self):
        inst = singleton_instance(np.eye(3))
        uq = reduce_to_unit_quotas(inst)
        other = sample_uniform(reduce_to_unit_quotas(singleton_instance(np.eye(2))).shape, 0)
        with pytest.raises(DimensionError):
            eval_fractional_volume(uq, other)


class TestRounding:
    def test_vertex_input_is_a_fixed_point_in_value(self):
        rng = substream(22, 0)
        inst = gen_random_partition(6, 3, (1, 1, 1), 4, rng)
        uq = reduce_to_unit_quotas(inst)
        x = vertex_to_point(uq.shape, ProductSimplexVertex((1, 0, 1)))
        before = eval_fractional_volume(uq, x)
        v = round_to_vertex(uq, x)
        after = eval_fractional_volume(uq, vertex_to_point(uq.shape, v))
        assert after.log_abs >= before.log_abs - 1e-9

    def test_never_decreases_along_the_chain(self):
        rng = substream(23, 0)
        inst = gen_random_partition(8, 2, (2, 1), 5, rng)
        uq = reduce_to_unit_quotas(inst)
        for t in range(100):
            x = sample_uniform(uq.shape, substream(23, 100 + t))
            start = eval_fractional_volume(uq, x).log_abs
            chain = [lm.log_abs for lm in rounding_chain(uq, x)]
            prev = start
            for val in chain:
                assert val >= prev - 1e-9
                prev = val

    def test_ties_pick_lowest_index(self):
        # identical columns tie on every choice, so rounding keeps index 0
        v = np.array([[1.0, 1.0], [0.0, 0.0], [0.0, 0.0]])
        v = np.hstack([v, np.array([[0.0], [1.0], [0.0]])])
        k = KernelInstance.from_factor(v)
        inst = PartitionInstance(k, ((0, 1), (2,)), (1, 1))
        uq = reduce_to_unit_quotas(inst)
        x = sample_uniform(uq.shape, substream(24, 0))
        assert round_to_vertex(uq, x).choices[0] == 0

    def test_support_maps_back_to_columns(self):
        k = KernelInstance.from_factor(np.eye(4))
        inst = PartitionInstance(k, ((0, 2), (1, 3)), (1, 1))
        uq = reduce_to_unit_quotas(inst)
        assert vertex_support(uq, ProductSimplexVertex((1, 0))) == (1, 2)


class TestTrialsForConfidence:
    def test_reference_value(self):
        # ceil(e^2 * ln 2 * ln 2) = ceil(3.5502) = 4
        assert trials_for_confidence(2, 0.5) == 4

    def test_floor_of_one(self):
        assert trials_for_confidence(2, 0.999999) == 1

    def test_monotone_in_delta_and_r(self):
        assert trials_for_confidence(2, 0.01) <= trials_for_confidence(2, 0.001)
        assert trials_for_confidence(2, 0.01) <= trials_for_confidence(20, 0.01)

    def test_small_r_uses_a_floor(self):
        assert trials_for_confidence(1, 0.5) == trials_for_confidence(2, 0.5)

    def test_bad_arguments_rejected(self):
        with pytest.raises(ValueError):
            trials_for_confidence(0, 0.5)
        with pytest.raises(ValueError):
            trials_for_confidence(3, 0.0)
        with pytest.raises(ValueError):
            trials_for_confidence(3, 1.0)


class TestSolve:
    def test_forced_instance_is_deterministic(self):
        # singleton parts leave no choice at all
        v = np.array([[2.0, 0.0], [0.0, 3.0]])
        inst = singleton_instance(v)
        rep = solve_partition(inst, trials=5, seed=0)
        assert rep.chosen_set == (0, 1)
        assert rep.objective_det == pytest.approx(36.0, rel=1e-12)

    def test_feasibility_of_returned_set(self):
        rng = substream(25, 0)
        inst = gen_random_partition(9, 3, (1, 2, 0), 5, rng)
        rep = solve_partition(inst, trials=10, seed=1)
        assert rep.objective_det > 0
        chosen = set(rep.chosen_set)
        for part, quota in zip(inst.parts, inst.quotas):
            assert len(chosen & set(part)) == quota

    def test_objective_matches_l_submatrix_determinant(self):
        rng = substream(26, 0)
        inst = gen_random_partition(8, 2, (2, 1), 5, rng)
        rep = solve_partition(inst, trials=12, seed=3)
        s = list(rep.chosen_set)
        direct = np.linalg.det(inst.kernel.matrix[np.ix_(s, s)])
        assert rep.objective_det == pytest.approx(direct, rel=1e-8)

    def test_never_beats_brute_force(self):
        for seed in range(10):
            rng = substream(27, seed)
            inst = gen_random_partition(7, 2, (1, 1), 4, rng)
            rep = solve_partition(inst, trials=15, seed=seed)
            exact = brute_force_partition(inst)
            assert rep.objective_det <= exact.best_value * (1 + 1e-9)

    def test_certified_factor_holds(self):
        for seed in range(10):
            rng = substream(28, seed)
            inst = gen_random_partition(8, 2, (2, 1), 5, rng)
            rep = solve_partition(inst, trials=trials_for_confidence(3, 0.01), seed=seed)
            exact = brute_force_partition(inst)
            floor = exact.best_value * math.exp(rep.certified_factor_log)
            assert rep.objective_det >= floor

    def test_all_dependent_selections_warn(self):
        # both columns of the part are the same direction; quota 2 forces a repeat
        v = np.array([[1.0, 1.0], [0.0, 0.0]])
        k = KernelInstance.from_factor(v)
        inst = PartitionInstance(k, ((0, 1),), (2,))
        rep = solve_partition(inst, trials=6, seed=0)
        assert rep.objective_det == 0.0
        assert rep.objective_log == float("-inf")
        assert rep.warnings

    def test_thread_count_does_not_change_the_report(self):
        rng = substream(29, 0)
        inst = gen_random_partition(9, 3, (1, 1, 1), 5, rng)
        a = solve_partition(inst, trials=16, seed=9, threads=1)
        b = solve_partition(inst, trials=16, seed=9, threads=4)
        assert a == b

    def test_per_trial_values_recorded(self):
        rng = substream(30, 0)
        inst = gen_random_partition(6, 2, (1, 1), 4, rng)
        rep = solve_partition(inst, trials=7, seed=2)
        assert len(rep.per_trial_values) == 7
        assert max(rep.per_trial_values) == pytest.approx(rep.objective_det)

    def test_certificate_log_formula(self):
        rng = substream(31, 0)
        inst = gen_random_partition(8, 2, (2, 1), 5, rng)
        sizes = [len(p) for p in inst.parts]
        expect = -2 * 3 * math.log(2 * math.e) - (
            2 * math.log(sizes[0]) + 1 * math.log(sizes[1])
        )
        assert partition_certificate_log(inst) == pytest.approx(expect, rel=1e-12)

    def test_restriction_tail_obeys_linear_bound(self):
        # fix all blocks but the first and look at the lower tail of the
        # remaining single-block function: it should be below 2 * c * p_1
        from subdetmax.anticoncentration import estimate_lower_tail, volume_objective
        from subdetmax.simplexdomain import ProductSimplexShape

        rng = substream(32, 0)
        inst = gen_random_partition(9, 3, (1, 1, 1), 5, rng)
        uq = reduce_to_unit_quotas(inst)
        f = volume_objective(uq)
        anchor = sample_uniform(uq.shape, substream(32, 1))
        p1 = uq.shape.block_sizes[0]

        def restricted(blocks):
            (z,) = blocks
            tiles = [z] + [
                np.tile(anchor.blocks[i], (z.shape[0], 1))
                for i in range(1, uq.shape.r)
            ]
            return f(tiles)

        top = float(restricted([np.eye(p1)]).max())
        n = 20_000
        for c in (0.05, 0.1, 0.2):
            est = estimate_lower_tail(
                restricted, ProductSimplexShape((p1,)), top, c, n,
                substream(32, 2), bound=2 * c * p1,
            )
            assert est.passed
