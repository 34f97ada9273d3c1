"""Monte Carlo checks of the anti-concentration behaviour the solvers rely on.

The solvers work because a uniform point on the domain lands, with constant
probability, on a value within an explicit factor of the optimum:

    Pr[ f(x) >= (gamma e^2)^(-r) * prod_i (1/p_i) * OPT ] >= 1 / (e^gamma ln r)

for gamma-anti-concentrated f on a product of r simplices of sizes p_i.
This module estimates such tail probabilities empirically.  Every estimate
carries a binomial standard error and checks pass or fail at four standard
errors, so a correct implementation fails a check with probability well
under 1e-4 per run.

Objective handles are batch evaluators: they take one (n, p_i) array per
block and return n values.  That keeps a 1e5-sample estimate at numpy speed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import islice
from typing import Callable, Sequence

import numpy as np

from .errors import EnumerationCapError
from .numkernel import _as_matrix
from .partition_solver import UnitQuotaInstance
from .regular_solver import RegularInstance
from .simplexdomain import (
    ProductSimplexShape,
    ProductSimplexVertex,
    VERTEX_ENUMERATION_CAP,
    as_generator,
    enumerate_vertices,
    one_hot_blocks,
    sample_uniform_batch,
)

BatchObjective = Callable[[Sequence[np.ndarray]], np.ndarray]

SAMPLE_CHUNK = 1 << 15


@dataclass(frozen=True)
class TailEstimate:
    """An empirical tail probability next to the bound it is tested against.

    ``comparison`` states which side the check must land on: the empirical
    probability is at_most / at_least the bound, or two_sided within the
    margin.  ``passed`` allows four binomial standard errors of slack.
    """

    threshold_fraction: float
    empirical_prob: float
    samples: int
    std_error: float
    bound: float
    comparison: str
    bound_alt: float | None = None

    def __post_init__(self):
        if self.comparison not in ("at_most", "at_least", "two_sided"):
            raise ValueError(f"unknown comparison {self.comparison!r}")
        if not 0.0 <= self.empirical_prob <= 1.0:
            raise ValueError("empirical probability outside [0, 1]")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")

    @property
    def margin(self) -> float:
        return 4.0 * self.std_error

    @property
    def passed(self) -> bool:
        if math.isnan(self.bound):
            return True
        if self.comparison == "at_most":
            return self.empirical_prob <= self.bound + self.margin
        if self.comparison == "at_least":
            return self.empirical_prob >= self.bound - self.margin
        return abs(self.empirical_prob - self.bound) <= self.margin


def _binomial_std_error(p: float, n: int) -> float:
    return math.sqrt(max(p * (1.0 - p), 0.0) / n)


def volume_objective(inst: UnitQuotaInstance) -> BatchObjective:
    """Batch Gram-volume objective for a unit-quota partition instance."""
    cols = inst.block_columns

    def f(blocks: Sequence[np.ndarray]) -> np.ndarray:
        stacked = np.stack(
            [blocks[i] @ cols[i].T for i in range(len(cols))], axis=1
        )  # (n, r, d): row k of slice i is the blended column w_i
        gram = np.einsum("nik,njk->nij", stacked, stacked)
        sign, logabs = np.linalg.slogdet(gram)
        return np.where(sign > 0, np.exp(0.5 * logabs), 0.0)

    return f


def det_objective(inst: RegularInstance) -> BatchObjective:
    """Batch |h| objective; each hypercube coordinate is a 2-simplex block.

    A block value (x, 1-x) maps to coordinate x, so uniform sampling on the
    product of 2-simplices is uniform on [0, 1]^m.
    """
    v = inst.kernel.factor
    bt = inst.representation.T

    def f(blocks: Sequence[np.ndarray]) -> np.ndarray:
        x = np.stack([b[:, 0] for b in blocks], axis=1)  # (n, m)
        mats = (v[None, :, :] * x[:, None, :]) @ bt
        sign, logabs = np.linalg.slogdet(mats)
        return np.where(sign != 0, np.exp(logabs), 0.0)

    return f


def distance_objective(vectors) -> BatchObjective:
    """Batch norm-of-blend objective ||sum_i x_i w_i|| for a single block."""
    w = _as_matrix(vectors, "vectors")  # d x t, columns are the vectors

    def f(blocks: Sequence[np.ndarray]) -> np.ndarray:
        (x,) = blocks
        return np.linalg.norm(x @ w.T, axis=1)

    return f


def hypercube_shape(m: int) -> ProductSimplexShape:
    """[0, 1]^m viewed as a product of m two-point simplices."""
    return ProductSimplexShape((2,) * m)


def estimate_lower_tail(
    f: BatchObjective,
    shape: ProductSimplexShape,
    opt_value: float,
    c: float,
    samples: int,
    rng,
    bound: float = math.nan,
) -> TailEstimate:
    """Estimate Pr[f(x) < c * OPT] under uniform sampling.

    Passing the same seeded generator for several values of ``c`` reuses an
    identical sample stream, which makes the estimates exactly monotone in c.
    """
    if not 0.0 < c < 1.0:
        raise ValueError("c must lie in (0, 1)")
    if opt_value <= 0.0:
        raise ValueError("opt_value must be positive")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = as_generator(rng)
    threshold = c * opt_value
    hits = 0
    left = samples
    while left > 0:
        n = min(left, SAMPLE_CHUNK)
        blocks = sample_uniform_batch(shape, n, rng)
        hits += int(np.count_nonzero(f(blocks) < threshold))
        left -= n
    p = hits / samples
    return TailEstimate(
        threshold_fraction=float(c),
        empirical_prob=p,
        samples=samples,
        std_error=_binomial_std_error(p, samples),
        bound=float(bound),
        comparison="at_most",
    )


def check_sampling_guarantee(
    f: BatchObjective,
    shape: ProductSimplexShape,
    opt_value: float,
    gamma: float,
    samples: int,
    rng,
) -> TailEstimate:
    """Estimate the probability that one uniform sample is good enough.

    Good enough means f(x) >= (gamma e^2)^(-r) * prod(1/p_i) * OPT.  The
    bound is 1/(e^gamma ln r); the base-2 variant is reported alongside as
    ``bound_alt`` since it is the weaker reading.
    """
    if gamma < 1.0:
        raise ValueError("gamma must be >= 1")
    r = shape.r
    if r < gamma:
        raise ValueError(f"guarantee needs r >= gamma, got r={r}, gamma={gamma}")
    if r < 2:
        raise ValueError("guarantee needs r >= 2 blocks")
    if opt_value <= 0.0:
        raise ValueError("opt_value must be positive")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = as_generator(rng)
    factor = (gamma * math.e**2) ** (-r) / math.prod(shape.block_sizes)
    threshold = factor * opt_value
    hits = 0
    left = samples
    while left > 0:
        n = min(left, SAMPLE_CHUNK)
        blocks = sample_uniform_batch(shape, n, rng)
        hits += int(np.count_nonzero(f(blocks) >= threshold))
        left -= n
    p = hits / samples
    return TailEstimate(
        threshold_fraction=factor,
        empirical_prob=p,
        samples=samples,
        std_error=_binomial_std_error(p, samples),
        bound=1.0 / (math.exp(gamma) * math.log(r)),
        comparison="at_least",
        bound_alt=1.0 / (math.exp(gamma) * math.log2(r)),
    )


def vertex_opt(
    f: BatchObjective,
    shape: ProductSimplexShape,
    cap: int = VERTEX_ENUMERATION_CAP,
) -> tuple[ProductSimplexVertex, float]:
    """Exact maximum of f over the vertices of the domain.

    For the objectives in this package the vertex maximum equals the global
    maximum over the whole product of simplices.  Ties keep the first vertex
    in lexicographic order.
    """
    vertices = enumerate_vertices(shape, cap)
    best_vertex: ProductSimplexVertex | None = None
    best_value = -math.inf
    while True:
        chunk = list(islice(vertices, 4096))
        if not chunk:
            break
        blocks = one_hot_blocks(shape, [v.choices for v in chunk])
        values = f(blocks)
        k = int(np.argmax(values))
        if best_vertex is None or float(values[k]) > best_value:
            best_vertex = chunk[k]
            best_value = float(values[k])
    assert best_vertex is not None
    return best_vertex, best_value


def uniform_sampler_success_probability(r: int) -> float:
    """Chance that r uniform draws from r groups of r columns hit every group.

    Columns come in r identical groups of size r, so a uniformly random
    r-subset spans the space exactly when it takes one column per group:
    r^r of the C(r^2, r) subsets.  This is the baseline a plain uniform
    sampler achieves on the hard repeated-basis instance, and it decays
    exponentially in r.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    return float(Fraction(r**r, math.comb(r * r, r)))


def simulate_uniform_sampler(r: int, samples: int, rng) -> TailEstimate:
    """Empirical version of :func:`uniform_sampler_success_probability`."""
    if r < 1:
        raise ValueError("r must be >= 1")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = as_generator(rng)
    m = r * r
    hits = 0
    left = samples
    while left > 0:
        n = min(left, SAMPLE_CHUNK)
        keys = rng.random((n, m))
        subsets = np.argsort(keys, axis=1)[:, :r]  # uniform r-subsets
        groups = np.sort(subsets // r, axis=1)
        distinct = np.all(np.diff(groups, axis=1) != 0, axis=1) if r > 1 else np.ones(n, bool)
        hits += int(np.count_nonzero(distinct))
        left -= n
    p = hits / samples
    return TailEstimate(
        threshold_fraction=1.0,
        empirical_prob=p,
        samples=samples,
        std_error=_binomial_std_error(p, samples),
        bound=uniform_sampler_success_probability(r),
        comparison="two_sided",
    )
