"""Sample-and-round solver for partition constraints.

The ground set [m] is split into parts M_1, ..., M_t with quotas b_i; a
feasible set picks exactly b_i indices from part i.  After replicating each
part quota-many times, a feasible set is one column choice per block and the
continuous relaxation evaluates the Gram volume of blended columns

    f(x) = vol(w_1(x), ..., w_r(x)),   w_i(x) = sum_j x^i_j v_{ij}.

The solver draws uniform points on the product of simplices, rounds each
block in turn to its best vertex (the block restriction of f is maximized at
a vertex, so rounding never loses value), and keeps the best vertex seen.
Every returned value comes with a certified worst-case fraction of the
optimum: (2e)^(-2r) * prod_i p_i^(-b_i).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DimensionError
from .kernel import KernelInstance
from .numkernel import NEG_INF, LogMagnitude, gram_volume_logmag
from .report import SolveReport
from .simplexdomain import (
    ProductSimplexPoint,
    ProductSimplexShape,
    ProductSimplexVertex,
    sample_uniform,
    substream,
)


@dataclass(frozen=True, eq=False)
class PartitionInstance:
    """Kernel plus a partition of its columns with per-part quotas."""

    kernel: KernelInstance
    parts: tuple[tuple[int, ...], ...]
    quotas: tuple[int, ...]

    def __post_init__(self):
        parts = tuple(tuple(int(i) for i in part) for part in self.parts)
        quotas = tuple(int(b) for b in self.quotas)
        object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "quotas", quotas)
        m = self.kernel.m
        if len(parts) != len(quotas):
            raise ValueError(
                f"{len(parts)} parts but {len(quotas)} quotas"
            )
        if len(parts) < 1:
            raise ValueError("need at least one part")
        seen: set[int] = set()
        for k, part in enumerate(parts):
            if len(part) == 0:
                raise ValueError(f"part {k} is empty")
            for i in part:
                if not 0 <= i < m:
                    raise ValueError(f"part {k} references column {i}, m={m}")
                if i in seen:
                    raise ValueError(f"column {i} appears in more than one part")
                seen.add(i)
        if len(seen) != m:
            raise ValueError("parts must cover every column exactly once")
        for k, (part, b) in enumerate(zip(parts, quotas)):
            if not 0 <= b <= len(part):
                raise ValueError(
                    f"quota {b} of part {k} outside [0, {len(part)}]"
                )
        r = sum(quotas)
        if r < 1:
            raise ValueError("at least one quota must be positive")
        if r > self.kernel.d:
            raise ValueError(
                f"total quota {r} exceeds kernel rank {self.kernel.d}; "
                "every feasible set would be dependent"
            )

    @property
    def t(self) -> int:
        return len(self.parts)

    @property
    def r(self) -> int:
        return sum(self.quotas)


@dataclass(frozen=True, eq=False)
class UnitQuotaInstance:
    """Partition instance rewritten so every block has quota one.

    ``blocks[k]`` lists the columns selectable in slot k and ``origin[k]``
    is the part the slot came from.  A part with quota b contributes b
    identical blocks; choices that collide on a column blend a repeated
    column into the Gram volume, which is then zero, so duplicates never
    win a trial.
    """

    kernel: KernelInstance
    blocks: tuple[tuple[int, ...], ...]
    origin: tuple[int, ...]

    def __post_init__(self):
        if len(self.blocks) != len(self.origin):
            raise ValueError("blocks and origin must align")
        if len(self.blocks) < 1:
            raise ValueError("need at least one block")

    @property
    def shape(self) -> ProductSimplexShape:
        return ProductSimplexShape(tuple(len(b) for b in self.blocks))

    @cached_property
    def block_columns(self) -> tuple[np.ndarray, ...]:
        v = self.kernel.factor
        return tuple(v[:, np.asarray(b, dtype=int)] for b in self.blocks)


def reduce_to_unit_quotas(inst: PartitionInstance) -> UnitQuotaInstance:
    """Replicate each part quota-many times; parts with quota zero drop out."""
    blocks: list[tuple[int, ...]] = []
    origin: list[int] = []
    for k, (part, b) in enumerate(zip(inst.parts, inst.quotas)):
        for _ in range(b):
            blocks.append(part)
            origin.append(k)
    return UnitQuotaInstance(inst.kernel, tuple(blocks), tuple(origin))


def _volume(inst: UnitQuotaInstance, blocks: list[np.ndarray]) -> LogMagnitude:
    cols = inst.block_columns
    w = np.column_stack([cols[i] @ blocks[i] for i in range(len(blocks))])
    return gram_volume_logmag(w)


def blended_columns(
    inst: UnitQuotaInstance, point: ProductSimplexPoint
) -> np.ndarray:
    """The matrix W(x) whose column k blends block k with the point weights."""
    _check_point(inst, point)
    cols = inst.block_columns
    return np.column_stack(
        [cols[i] @ point.blocks[i] for i in range(len(cols))]
    )


def _check_point(inst: UnitQuotaInstance, point: ProductSimplexPoint) -> None:
    expected = inst.shape.block_sizes
    got = tuple(b.size for b in point.blocks)
    if got != expected:
        raise DimensionError(f"point shape {got} does not match blocks {expected}")


def eval_fractional_volume(
    inst: UnitQuotaInstance, point: ProductSimplexPoint
) -> LogMagnitude:
    """Gram volume of the blended columns W(x)."""
    _check_point(inst, point)
    return _volume(inst, list(point.blocks))


def _round(
    inst: UnitQuotaInstance, point: ProductSimplexPoint
) -> tuple[ProductSimplexVertex, list[LogMagnitude]]:
    cols = inst.block_columns
    w = np.column_stack([cols[i] @ point.blocks[i] for i in range(len(cols))])
    choices: list[int] = []
    chain: list[LogMagnitude] = []
    for i, block_cols in enumerate(cols):
        best_j = 0
        best = LogMagnitude.zero()
        first = True
        for j in range(block_cols.shape[1]):
            w[:, i] = block_cols[:, j]
            val = gram_volume_logmag(w)
            if first or val.log_abs > best.log_abs:
                best, best_j, first = val, j, False
        w[:, i] = block_cols[:, best_j]
        choices.append(best_j)
        chain.append(best)
    return ProductSimplexVertex(tuple(choices)), chain


def round_to_vertex(
    inst: UnitQuotaInstance, point: ProductSimplexPoint
) -> ProductSimplexVertex:
    """Round block by block, each to the vertex maximizing the objective.

    Blocks are fixed in ascending order; ties go to the lowest column index.
    Exactly sum(p_i) objective evaluations.  The block restriction of the
    volume is maximized at a vertex, so the objective never decreases.
    """
    _check_point(inst, point)
    vertex, _ = _round(inst, point)
    return vertex


def rounding_chain(
    inst: UnitQuotaInstance, point: ProductSimplexPoint
) -> list[LogMagnitude]:
    """Objective value after each block is fixed; final entry is the vertex value."""
    _check_point(inst, point)
    _, chain = _round(inst, point)
    return chain


def vertex_support(
    inst: UnitQuotaInstance, vertex: ProductSimplexVertex
) -> tuple[int, ...]:
    """Columns selected by a vertex, sorted, duplicates kept."""
    if len(vertex.choices) != len(inst.blocks):
        raise DimensionError("vertex does not match instance blocks")
    return tuple(sorted(inst.blocks[i][c] for i, c in enumerate(vertex.choices)))


def trials_for_confidence(r: int, delta: float) -> int:
    """Trials needed to miss a 1/(e^2 ln r) success chance with prob <= delta."""
    if r < 1:
        raise ValueError("r must be >= 1")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    e2 = math.e**2
    return max(1, math.ceil(e2 * math.log(max(r, 2)) * math.log(1.0 / delta)))


def partition_certificate_log(inst: PartitionInstance) -> float:
    """Natural log of the certified fraction of the optimum."""
    r = inst.r
    out = -2.0 * r * math.log(2.0 * math.e)
    for part, b in zip(inst.parts, inst.quotas):
        out -= b * math.log(len(part))
    return out


def solve_partition(
    inst: PartitionInstance, trials: int, seed: int = 0, threads: int = 1
) -> SolveReport:
    """Run ``trials`` independent sample-and-round trials, keep the best set.

    Each trial consumes its own substream of ``seed``, so the report is
    identical for any thread count.  If every trial rounds to a dependent
    selection the report carries value zero and a warning.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    uq = reduce_to_unit_quotas(inst)
    shape = uq.shape

    def run_trial(t: int) -> tuple[float, tuple[int, ...]]:
        rng = substream(seed, t)
        x = sample_uniform(shape, rng)
        vertex, chain = _round(uq, x)
        support = vertex_support(uq, vertex)
        log_det = 2.0 * chain[-1].log_abs  # det(L_{S,S}) = vol(V_S)^2
        return log_det, support

    if threads > 1 and trials > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_trial, range(trials)))
    else:
        results = [run_trial(t) for t in range(trials)]

    best_log, best_support = results[0]
    for log_det, support in results[1:]:
        if log_det > best_log:
            best_log, best_support = log_det, support

    warnings: list[str] = []
    chosen = tuple(sorted(set(best_support)))
    if best_log == NEG_INF:
        warnings.append(
            "all trials rounded to dependent selections; objective is zero"
        )
    else:
        counts = {k: 0 for k in range(inst.t)}
        lookup = {i: k for k, part in enumerate(inst.parts) for i in part}
        for i in chosen:
            counts[lookup[i]] += 1
        if [counts[k] for k in range(inst.t)] != list(inst.quotas):
            raise AssertionError("winning set violates the quota constraints")

    per_trial = tuple(0.0 if lg == NEG_INF else math.exp(lg) for lg, _ in results)
    return SolveReport(
        chosen_set=chosen,
        objective_det=0.0 if best_log == NEG_INF else math.exp(best_log),
        objective_log=best_log,
        certified_factor_log=partition_certificate_log(inst),
        trials=trials,
        seed=int(seed),
        per_trial_values=per_trial,
        warnings=tuple(warnings),
    )
