"""Exact reference computations: brute-force optima and integer determinants.

These are deliberately written along different routes than the solvers (no
rounding, no log-magnitude shortcuts) so the two sides can check each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, product

import numpy as np

from .errors import DimensionError, EnumerationCapError
from .numkernel import det_logmag, gram_volume_logmag
from .partition_solver import PartitionInstance
from .regular_solver import BASIS_DET_TOL, RegularInstance

BRUTE_FORCE_CAP = 10**7
CAUCHY_BINET_CAP = 10**6

MAX_EXACT_DET_SIZE = 12


@dataclass(frozen=True)
class ExactResult:
    """Optimum from exhaustive enumeration.

    ``enumerated`` counts the feasible sets inspected.  When no feasible set
    exists the best set is empty and the value zero.
    """

    best_set: tuple[int, ...]
    best_value: float
    enumerated: int


def brute_force_partition(
    inst: PartitionInstance, cap: int = BRUTE_FORCE_CAP
) -> ExactResult:
    """Maximize det(L_{S,S}) over all quota-respecting sets by enumeration."""
    total = math.prod(
        math.comb(len(part), b) for part, b in zip(inst.parts, inst.quotas)
    )
    if total > cap:
        raise EnumerationCapError(
            f"{total} feasible sets exceed the enumeration cap of {cap}"
        )
    v = inst.kernel.factor
    per_part = [
        list(combinations(sorted(part), b))
        for part, b in zip(inst.parts, inst.quotas)
    ]
    best_log = float("-inf")
    best_set: tuple[int, ...] | None = None
    count = 0
    for pick in product(*per_part):
        count += 1
        s = tuple(sorted(i for chunk in pick for i in chunk))
        vol = gram_volume_logmag(v[:, list(s)])
        log_det = 2.0 * vol.log_abs
        if best_set is None or log_det > best_log or (
            log_det == best_log and s < best_set
        ):
            best_log, best_set = log_det, s
    assert best_set is not None
    value = 0.0 if best_log == float("-inf") else math.exp(best_log)
    return ExactResult(best_set, value, count)


def brute_force_regular(
    inst: RegularInstance, cap: int = BRUTE_FORCE_CAP
) -> ExactResult:
    """Maximize det(L_{S,S}) over all bases of the represented matroid.

    A d-subset is a basis exactly when |det(B_S)| is 1 (unimodular B).
    """
    m, d = inst.m, inst.d
    total = math.comb(m, d)
    if total > cap:
        raise EnumerationCapError(
            f"{total} candidate sets exceed the enumeration cap of {cap}"
        )
    b = inst.representation
    v = inst.kernel.factor
    best_log = float("-inf")
    best_set: tuple[int, ...] | None = None
    feasible = 0
    for s in combinations(range(m), d):  # lexicographic, so ties keep the first
        bd = det_logmag(b[:, list(s)])
        if bd.sign == 0 or abs(math.exp(bd.log_abs) - 1.0) > BASIS_DET_TOL:
            continue
        feasible += 1
        vd = det_logmag(v[:, list(s)])
        log_det = 2.0 * vd.log_abs
        if best_set is None or log_det > best_log:
            best_log, best_set = log_det, s
    if best_set is None:
        return ExactResult((), 0.0, 0)
    value = 0.0 if best_log == float("-inf") else math.exp(best_log)
    return ExactResult(best_set, value, feasible)


def cauchy_binet_sum(inst: RegularInstance, x, cap: int = CAUCHY_BINET_CAP) -> float:
    """Evaluate sum over d-subsets of x^S det(V_S) det(B_S) directly.

    This is the subset expansion of det(V diag(x) B^T); computing it term by
    term gives an independent check of the assembled determinant.
    """
    arr = np.asarray(x, dtype=float)
    m, d = inst.m, inst.d
    if arr.shape != (m,):
        raise DimensionError(f"x must have shape ({m},), got {arr.shape}")
    total = math.comb(m, d)
    if total > cap:
        raise EnumerationCapError(
            f"{total} subset terms exceed the enumeration cap of {cap}"
        )
    v = inst.kernel.factor
    b = inst.representation
    out = 0.0
    for s in combinations(range(m), d):
        cols = list(s)
        weight = float(np.prod(arr[cols]))
        if weight == 0.0:
            continue
        out += weight * float(np.linalg.det(v[:, cols])) * float(
            np.linalg.det(b[:, cols])
        )
    return out


def _exact_rows(a) -> list[list[int]]:
    if isinstance(a, np.ndarray):
        if a.ndim != 2:
            raise DimensionError(f"matrix must be 2-dimensional, got shape {a.shape}")
        if not np.all(np.isfinite(a.astype(float))):
            raise ValueError("matrix contains non-finite entries")
        if not np.all(np.equal(np.mod(a, 1), 0)):
            raise ValueError("matrix entries must be integers")
        return [[int(x) for x in row] for row in a]
    rows = [list(row) for row in a]
    out = []
    for row in rows:
        cleaned = []
        for x in row:
            if isinstance(x, bool) or not isinstance(x, (int, np.integer)):
                if isinstance(x, float) and x.is_integer():
                    x = int(x)
                else:
                    raise ValueError(f"entry {x!r} is not an integer")
            cleaned.append(int(x))
        out.append(cleaned)
    return out


def exact_int_det(a) -> int:
    """Exact determinant of a small integer matrix.

    Fraction-free (Bareiss) elimination over Python integers: every division
    is exact, so there is no rounding anywhere.  Intended for ground-truth
    checks; refuses matrices larger than 12 x 12.
    """
    m = _exact_rows(a)
    n = len(m)
    if any(len(row) != n for row in m):
        raise DimensionError("matrix must be square")
    if n > MAX_EXACT_DET_SIZE:
        raise DimensionError(
            f"exact determinant limited to {MAX_EXACT_DET_SIZE}x{MAX_EXACT_DET_SIZE}"
        )
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]
