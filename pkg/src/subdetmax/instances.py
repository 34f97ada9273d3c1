"""Instance generators for experiments and tests."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernel import KernelInstance
from .partition_solver import PartitionInstance
from .regular_solver import RegularInstance
from .simplexdomain import as_generator

KIND_PARTITION = "random-psd-partition"
KIND_GRAPHIC = "graphic-regular"
KIND_REPEATED_BASIS = "repeated-basis"

V_MODES = ("gaussian", "copy")


def gen_random_partition(
    m: int, t: int, quotas, d: int, rng
) -> PartitionInstance:
    """Gaussian rank-d kernel over m columns, balanced random partition.

    The permutation of [m] is split into t consecutive chunks whose sizes
    differ by at most one; quotas must fit in the smallest chunk.
    """
    rng = as_generator(rng)
    quotas = tuple(int(b) for b in quotas)
    if t < 1 or len(quotas) != t:
        raise ValueError(f"need t >= 1 part quotas, got t={t}, quotas={quotas}")
    r = sum(quotas)
    if not 1 <= r <= d <= m:
        raise ValueError(
            f"need 1 <= sum(quotas) <= d <= m, got r={r}, d={d}, m={m}"
        )
    sizes = [m // t + (1 if i < m % t else 0) for i in range(t)]
    for b, p in zip(quotas, sizes):
        if b > p:
            raise ValueError(f"quota {b} does not fit in a part of size {p}")
    perm = [int(i) for i in rng.permutation(m)]
    parts = []
    at = 0
    for p in sizes:
        parts.append(tuple(sorted(perm[at : at + p])))
        at += p
    v = rng.standard_normal((d, m))
    return PartitionInstance(KernelInstance.from_factor(v), tuple(parts), quotas)


def gen_graphic_regular(
    n_vertices: int, n_edges: int, rng, v_mode: str = "gaussian"
) -> RegularInstance:
    """Connected random multigraph; the representation is its reduced
    signed incidence matrix (one vertex row dropped), which is totally
    unimodular with the spanning trees as bases.

    ``v_mode`` picks the kernel factor: independent Gaussian entries, or a
    copy of the representation itself (then every spanning tree has
    determinant exactly 1).
    """
    rng = as_generator(rng)
    n = int(n_vertices)
    if n < 2:
        raise ValueError("need at least two vertices")
    if n_edges < n - 1:
        raise ValueError(f"{n_edges} edges cannot connect {n} vertices")
    if v_mode not in V_MODES:
        raise ValueError(f"v_mode must be one of {V_MODES}, got {v_mode!r}")
    edges = []
    for v in range(1, n):  # random tree first, so the graph is connected
        edges.append((int(rng.integers(0, v)), v))
    while len(edges) < n_edges:
        u, v = (int(i) for i in rng.integers(0, n, size=2))
        if u == v:
            continue  # self-loops would be zero columns, never in a basis
        edges.append((min(u, v), max(u, v)))
    order = rng.permutation(len(edges))
    edges = [edges[int(i)] for i in order]
    b = np.zeros((n - 1, len(edges)))
    for j, (u, v) in enumerate(edges):
        if u > 0:
            b[u - 1, j] = 1.0
        b[v - 1, j] = -1.0
    if v_mode == "copy":
        factor = b.copy()
    else:
        factor = rng.standard_normal((n - 1, len(edges)))
    return RegularInstance(KernelInstance.from_factor(factor), b)


def gen_repeated_basis(r: int) -> PartitionInstance:
    """Hard single-part instance: r unit directions, each repeated r times.

    The optimum is exactly 1 (one column per direction) but all other
    r-subsets are dependent, so plain uniform subset sampling succeeds with
    probability only r^r / C(r^2, r).  The sample-and-round solver recovers
    the optimum from a handful of trials.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    v = np.repeat(np.eye(r), r, axis=1)
    parts = (tuple(range(r * r)),)
    return PartitionInstance(KernelInstance.from_factor(v), parts, (r,))


@dataclass(frozen=True)
class GeneratorSpec:
    """Declarative recipe for one instance, as used by the command line."""

    kind: str
    seed: int = 0
    m: int | None = None
    t: int | None = None
    quotas: tuple[int, ...] | None = None
    d: int | None = None
    r: int | None = None
    n_vertices: int | None = None
    n_edges: int | None = None
    v_mode: str = "gaussian"

    def build(self) -> PartitionInstance | RegularInstance:
        if self.kind == KIND_PARTITION:
            missing = [
                name
                for name in ("m", "t", "quotas", "d")
                if getattr(self, name) is None
            ]
            if missing:
                raise ValueError(f"{self.kind} requires {', '.join(missing)}")
            return gen_random_partition(
                self.m, self.t, self.quotas, self.d, self.seed
            )
        if self.kind == KIND_GRAPHIC:
            if self.n_vertices is None or self.n_edges is None:
                raise ValueError(f"{self.kind} requires n_vertices and n_edges")
            return gen_graphic_regular(
                self.n_vertices, self.n_edges, self.seed, self.v_mode
            )
        if self.kind == KIND_REPEATED_BASIS:
            if self.r is None:
                raise ValueError(f"{self.kind} requires r")
            return gen_repeated_basis(self.r)
        raise ValueError(f"unknown generator kind {self.kind!r}")
