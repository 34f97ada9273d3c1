"""Sample-and-round solver for regular matroid constraints.

Feasible sets are the bases of a regular matroid given by a totally
unimodular representation B (d x m, entries in {-1, 0, 1}, full row rank).
The multilinear relaxation is

    h(x) = det(V diag(x) B^T),   x in [0, 1]^m,

whose expansion assigns each d-subset S the weight x^S det(V_S) det(B_S),
so at an indicator vector h(1_S) = det(V_S) det(B_S) and |det(B_S)| is 1
exactly on bases.  A trial samples x uniformly, rounds one coordinate at a
time to {0, 1} without decreasing |h|, then shrinks the support back down to
d elements; each removal keeps at least a (|S|-d)/|S| fraction of the value,
which telescopes to a 1/C(|S_0|, d) loss overall.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import DimensionError
from .kernel import KernelInstance
from .numkernel import NEG_INF, LogMagnitude, _as_matrix, det_logmag
from .report import SolveReport
from .simplexdomain import substream

BASIS_DET_TOL = 1e-6
SHRINK_SLACK = 1e-9
UNIMODULAR_SPOT_CHECKS = 10**4


def _spot_check_unimodular(b: np.ndarray, checks: int = UNIMODULAR_SPOT_CHECKS) -> None:
    """Verify |det| of sampled d x d submatrices is 0 or 1.

    Entry range and row rank alone do not make B totally unimodular, so
    construction samples submatrices (exhaustively when C(m, d) is small,
    otherwise ``checks`` draws from a fixed stream) and rejects on the first
    violation.
    """
    d, m = b.shape
    total = math.comb(m, d)
    if total <= checks:
        subsets = np.array(list(combinations(range(m), d)), dtype=int)
    else:
        rng = np.random.default_rng(np.random.SeedSequence((0xB0, m, d)))
        keys = rng.random((checks, m))
        subsets = np.sort(np.argsort(keys, axis=1)[:, :d], axis=1)
    stacked = b[:, subsets].transpose(1, 0, 2)
    dets = np.abs(np.linalg.det(stacked))
    bad = ~((dets < BASIS_DET_TOL) | (np.abs(dets - 1.0) < BASIS_DET_TOL))
    if np.any(bad):
        k = int(np.argmax(bad))
        raise ValueError(
            f"representation is not unimodular: columns {tuple(subsets[k])} "
            f"have |det| = {dets[k]:.6f}"
        )


@dataclass(frozen=True, eq=False)
class RegularInstance:
    """Kernel plus a totally unimodular representation of the base family."""

    kernel: KernelInstance
    representation: np.ndarray

    def __post_init__(self):
        b = _as_matrix(self.representation, "representation")
        object.__setattr__(self, "representation", b)
        d, m = b.shape
        if m != self.kernel.m:
            raise DimensionError(
                f"representation has {m} columns, kernel has {self.kernel.m}"
            )
        if d != self.kernel.d:
            raise DimensionError(
                f"representation rank {d} does not match kernel factor rank "
                f"{self.kernel.d}"
            )
        if d < 1:
            raise ValueError("representation needs at least one row")
        if not np.isin(b, (-1.0, 0.0, 1.0)).all():
            raise ValueError("representation entries must be -1, 0 or 1")
        if np.linalg.matrix_rank(b) != d:
            raise ValueError("representation must have full row rank")
        _spot_check_unimodular(b)

    @property
    def m(self) -> int:
        return self.kernel.m

    @property
    def d(self) -> int:
        return self.representation.shape[0]


def _check_hypercube_point(x, m: int) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.shape != (m,):
        raise DimensionError(f"point must have shape ({m},), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("point contains non-finite entries")
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError("point coordinates must lie in [0, 1]")
    return arr


def eval_fractional_det(inst: RegularInstance, x) -> LogMagnitude:
    """h(x) = det(V diag(x) B^T) as a LogMagnitude."""
    arr = _check_hypercube_point(x, inst.m)
    return _det_at(inst, arr)


def _det_at(inst: RegularInstance, x: np.ndarray) -> LogMagnitude:
    v = inst.kernel.factor
    return det_logmag((v * x) @ inst.representation.T)


def _round_chain(
    inst: RegularInstance, x: np.ndarray
) -> tuple[np.ndarray, list[LogMagnitude]]:
    cur = x.copy()
    chain: list[LogMagnitude] = []
    for i in range(inst.m):
        cur[i] = 0.0
        at_zero = _det_at(inst, cur)
        cur[i] = 1.0
        at_one = _det_at(inst, cur)
        if at_one.log_abs > at_zero.log_abs:
            chain.append(at_one)
        else:
            cur[i] = 0.0  # ties resolve to 0
            chain.append(at_zero)
    return cur, chain


def round_hypercube(inst: RegularInstance, x) -> np.ndarray:
    """Round coordinates to {0, 1} in ascending order, never decreasing |h|.

    h is affine in each coordinate, so one endpoint always does at least as
    well as the interior value.  Exactly 2m evaluations; ties pick 0.
    """
    arr = _check_hypercube_point(x, inst.m)
    rounded, _ = _round_chain(inst, arr)
    return rounded


def hypercube_rounding_chain(inst: RegularInstance, x) -> list[LogMagnitude]:
    """|h| after each coordinate is fixed; final entry is the rounded value."""
    arr = _check_hypercube_point(x, inst.m)
    _, chain = _round_chain(inst, arr)
    return chain


def _support_det(inst: RegularInstance, support: list[int]) -> LogMagnitude:
    v = inst.kernel.factor[:, support]
    b = inst.representation[:, support]
    return det_logmag(v @ b.T)


def _shrink_chain(
    inst: RegularInstance, support0
) -> tuple[tuple[int, ...], bool, list[LogMagnitude]]:
    support = sorted(int(i) for i in support0)
    if len(set(support)) != len(support):
        raise ValueError("support contains duplicate indices")
    if any(not 0 <= i < inst.m for i in support):
        raise ValueError("support index out of range")
    d = inst.d
    if len(support) < d:
        raise DimensionError(
            f"support of size {len(support)} cannot reach a basis of size {d}"
        )
    current = _support_det(inst, support)
    chain = [current]
    if current.sign == 0:
        return tuple(support[:d]), True, chain
    while len(support) > d:
        n = len(support)
        best_k = 0
        best = LogMagnitude.zero()
        first = True
        for k in range(n):
            trial = support[:k] + support[k + 1 :]
            val = _support_det(inst, trial)
            if first or val.log_abs > best.log_abs:
                best, best_k, first = val, k, False
        # The expansion of g over d-subsets gives
        # sum_k g(S \ {k}) = (|S| - d) g(S), so the best removal keeps at
        # least a (|S| - d)/|S| fraction of |g(S)|.
        required = current.log_abs + math.log((n - d) / n) + math.log1p(-SHRINK_SLACK)
        if best.log_abs < required:
            raise AssertionError(
                f"support shrink lost too much value at size {n}: "
                f"{best.log_abs} < {required}"
            )
        support = support[:best_k] + support[best_k + 1 :]
        current = best
        chain.append(current)
    return tuple(support), False, chain


def shrink_support(inst: RegularInstance, support0) -> tuple[tuple[int, ...], bool]:
    """Drop elements one at a time, keeping the removal best for |h(1_S)|.

    Returns the final d-subset and a degeneracy flag.  The flag is set when
    the input support already evaluates to zero; the returned subset is then
    just the d smallest indices.  Each removal is runtime-checked against
    the (|S|-d)/|S| retention bound.
    """
    subset, degenerate, _ = _shrink_chain(inst, support0)
    return subset, degenerate


def shrink_chain(inst: RegularInstance, support0) -> list[LogMagnitude]:
    """Value of |h(1_S)| after each removal, starting from the full support."""
    _, _, chain = _shrink_chain(inst, support0)
    return chain


def regular_certificate_log(inst: RegularInstance) -> float:
    """Natural log of the certified fraction of the optimum.

    On the determinant scale the guarantee is ((2e)^(-2m) / C(m, d))^2.
    """
    m, d = inst.m, inst.d
    return 2.0 * (-2.0 * m * math.log(2.0 * math.e) - math.log(math.comb(m, d)))


def solve_regular(
    inst: RegularInstance, trials: int, seed: int = 0, threads: int = 1
) -> SolveReport:
    """Best basis over ``trials`` independent sample, round, shrink runs.

    Trials that round to a zero-value support are discarded as degenerate
    (recorded with value zero).  Whenever the returned value is nonzero the
    chosen set is a basis: |det(B_S)| is checked to be 1 within tolerance.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    d = inst.d

    def run_trial(t: int) -> tuple[float, tuple[int, ...], str | None]:
        rng = substream(seed, t)
        x = rng.random(inst.m)
        rounded, chain = _round_chain(inst, x)
        support = [int(i) for i in np.flatnonzero(rounded > 0.5)]
        if len(support) < d or chain[-1].sign == 0:
            return NEG_INF, tuple(support[:d]), None
        subset, degenerate, _ = _shrink_chain(inst, support)
        if degenerate:
            return NEG_INF, subset, None
        warning = None
        basis_det = det_logmag(inst.representation[:, subset])
        if abs(math.exp(basis_det.log_abs) - 1.0) > BASIS_DET_TOL:
            warning = (
                f"set {subset} has |det(B_S)| far from 1; "
                "representation may not be unimodular"
            )
        value = det_logmag(inst.kernel.factor[:, subset])
        if value.sign == 0:
            return NEG_INF, subset, warning
        return 2.0 * value.log_abs, subset, warning

    if threads > 1 and trials > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_trial, range(trials)))
    else:
        results = [run_trial(t) for t in range(trials)]

    best_log, best_set, _ = results[0]
    warnings = [w for _, _, w in results if w is not None]
    for log_det, subset, _ in results[1:]:
        if log_det > best_log:
            best_log, best_set = log_det, subset
    if best_log == NEG_INF:
        warnings.append("all trials degenerate; no independent support found")

    per_trial = tuple(0.0 if lg == NEG_INF else math.exp(lg) for lg, _, _ in results)
    return SolveReport(
        chosen_set=tuple(sorted(best_set)),
        objective_det=0.0 if best_log == NEG_INF else math.exp(best_log),
        objective_log=best_log,
        certified_factor_log=regular_certificate_log(inst),
        trials=trials,
        seed=int(seed),
        per_trial_values=per_trial,
        warnings=tuple(warnings),
    )
