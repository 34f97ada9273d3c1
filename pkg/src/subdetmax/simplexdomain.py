"""Products of probability simplices: shapes, points, vertices, sampling.

A shape (p_1, ..., p_r) describes the domain Delta_{p_1} x ... x Delta_{p_r}.
Uniform sampling uses the exponential-spacings construction: normalizing r
independent standard exponentials yields a uniform point on the simplex.

Randomness is always explicit.  ``substream(seed, index)`` derives an
independent generator for each trial index, which keeps solver output
identical no matter how trials are scheduled across threads.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import DimensionError, EnumerationCapError

VERTEX_ENUMERATION_CAP = 10**7

BLOCK_SUM_TOL = 1e-12


def as_generator(rng) -> np.random.Generator:
    """Accept a Generator, SeedSequence or integer seed."""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def substream(seed: int, index: int) -> np.random.Generator:
    """Independent generator for sub-task ``index`` of master ``seed``."""
    return np.random.default_rng(np.random.SeedSequence((int(seed), int(index))))


@dataclass(frozen=True)
class ProductSimplexShape:
    """Block sizes (p_1, ..., p_r) of a product of simplices."""

    block_sizes: tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(int(p) for p in self.block_sizes)
        object.__setattr__(self, "block_sizes", sizes)
        if len(sizes) < 1:
            raise ValueError("shape needs at least one block")
        if any(p < 1 for p in sizes):
            raise ValueError(f"block sizes must be >= 1, got {sizes}")

    @property
    def r(self) -> int:
        return len(self.block_sizes)

    @property
    def vertex_count(self) -> int:
        return math.prod(self.block_sizes)


@dataclass(frozen=True, eq=False)
class ProductSimplexPoint:
    """One nonnegative weight vector per block, each summing to 1."""

    blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        blocks = []
        for i, b in enumerate(self.blocks):
            arr = np.asarray(b, dtype=float)
            if arr.ndim != 1 or arr.size < 1:
                raise DimensionError(f"block {i} must be a nonempty vector")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"block {i} contains non-finite entries")
            if np.any(arr < 0.0):
                raise ValueError(f"block {i} has a negative coordinate")
            if abs(float(arr.sum()) - 1.0) > BLOCK_SUM_TOL:
                raise ValueError(f"block {i} sums to {arr.sum()!r}, not 1")
            blocks.append(arr)
        object.__setattr__(self, "blocks", tuple(blocks))

    @property
    def shape(self) -> ProductSimplexShape:
        return ProductSimplexShape(tuple(b.size for b in self.blocks))


@dataclass(frozen=True)
class ProductSimplexVertex:
    """One chosen coordinate per block (0-based indices)."""

    choices: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "choices", tuple(int(c) for c in self.choices))
        if any(c < 0 for c in self.choices):
            raise ValueError("vertex choices must be nonnegative")


def sample_uniform(shape: ProductSimplexShape, rng) -> ProductSimplexPoint:
    """Uniform point on the product of simplices."""
    rng = as_generator(rng)
    blocks = []
    for p in shape.block_sizes:
        if p == 1:
            blocks.append(np.ones(1))
        else:
            e = rng.standard_exponential(p)
            blocks.append(e / e.sum())
    return ProductSimplexPoint(tuple(blocks))


def sample_uniform_batch(
    shape: ProductSimplexShape, count: int, rng
) -> list[np.ndarray]:
    """``count`` uniform points at once; entry i has shape (count, p_i).

    Same distribution as :func:`sample_uniform`, vectorized for the
    statistical harness.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = as_generator(rng)
    out = []
    for p in shape.block_sizes:
        if p == 1:
            out.append(np.ones((count, 1)))
        else:
            e = rng.standard_exponential((count, p))
            out.append(e / e.sum(axis=1, keepdims=True))
    return out


def enumerate_vertices(
    shape: ProductSimplexShape, cap: int = VERTEX_ENUMERATION_CAP
) -> Iterator[ProductSimplexVertex]:
    """All vertices in lexicographic order of their choice tuples.

    Refuses up front when the product of block sizes exceeds ``cap``.
    """
    total = shape.vertex_count
    if total > cap:
        raise EnumerationCapError(
            f"{total} vertices exceed the enumeration cap of {cap}"
        )
    ranges = [range(p) for p in shape.block_sizes]
    return (ProductSimplexVertex(c) for c in itertools.product(*ranges))


def vertex_to_point(
    shape: ProductSimplexShape, vertex: ProductSimplexVertex
) -> ProductSimplexPoint:
    """Indicator point of a vertex."""
    if len(vertex.choices) != shape.r:
        raise DimensionError(
            f"vertex has {len(vertex.choices)} choices for {shape.r} blocks"
        )
    blocks = []
    for p, c in zip(shape.block_sizes, vertex.choices):
        if not 0 <= c < p:
            raise ValueError(f"choice {c} out of range for a block of size {p}")
        b = np.zeros(p)
        b[c] = 1.0
        blocks.append(b)
    return ProductSimplexPoint(tuple(blocks))


def one_hot_blocks(
    shape: ProductSimplexShape, choice_rows: Sequence[Sequence[int]]
) -> list[np.ndarray]:
    """Stack the indicator points of several vertices into batch blocks."""
    arr = np.asarray(choice_rows, dtype=int)
    if arr.ndim != 2 or arr.shape[1] != shape.r:
        raise DimensionError("choice_rows must be (n, r)")
    n = arr.shape[0]
    blocks = []
    for i, p in enumerate(shape.block_sizes):
        b = np.zeros((n, p))
        b[np.arange(n), arr[:, i]] = 1.0
        blocks.append(b)
    return blocks
