"""Subdeterminant maximization under partition and regular matroid constraints.

Randomized sample-and-round solvers with certified approximation factors,
exact brute-force oracles, and a Monte Carlo harness for the
anti-concentration properties the solvers depend on.
"""

from .anticoncentration import (
    TailEstimate,
    check_sampling_guarantee,
    det_objective,
    distance_objective,
    estimate_lower_tail,
    hypercube_shape,
    simulate_uniform_sampler,
    uniform_sampler_success_probability,
    vertex_opt,
    volume_objective,
)
from .errors import (
    DimensionError,
    EnumerationCapError,
    InstanceFormatError,
    NotPSDError,
    SubdetError,
)
from .instances import (
    GeneratorSpec,
    gen_graphic_regular,
    gen_random_partition,
    gen_repeated_basis,
)
from .kernel import KernelInstance
from .numkernel import (
    LogMagnitude,
    det_logmag,
    dist_to_span,
    gram_volume_logmag,
    psd_factor,
)
from .oracle import (
    ExactResult,
    brute_force_partition,
    brute_force_regular,
    cauchy_binet_sum,
    exact_int_det,
)
from .partition_solver import (
    PartitionInstance,
    UnitQuotaInstance,
    blended_columns,
    eval_fractional_volume,
    partition_certificate_log,
    reduce_to_unit_quotas,
    round_to_vertex,
    rounding_chain,
    solve_partition,
    trials_for_confidence,
    vertex_support,
)
from .regular_solver import (
    RegularInstance,
    eval_fractional_det,
    hypercube_rounding_chain,
    regular_certificate_log,
    round_hypercube,
    shrink_chain,
    shrink_support,
    solve_regular,
)
from .report import SolveReport
from .simplexdomain import (
    ProductSimplexPoint,
    ProductSimplexShape,
    ProductSimplexVertex,
    enumerate_vertices,
    sample_uniform,
    sample_uniform_batch,
    substream,
    vertex_to_point,
)

__version__ = "0.1.0"

__all__ = [
    "DimensionError",
    "EnumerationCapError",
    "ExactResult",
    "GeneratorSpec",
    "InstanceFormatError",
    "KernelInstance",
    "LogMagnitude",
    "NotPSDError",
    "PartitionInstance",
    "ProductSimplexPoint",
    "ProductSimplexShape",
    "ProductSimplexVertex",
    "RegularInstance",
    "SolveReport",
    "SubdetError",
    "TailEstimate",
    "UnitQuotaInstance",
    "blended_columns",
    "brute_force_partition",
    "brute_force_regular",
    "cauchy_binet_sum",
    "check_sampling_guarantee",
    "det_logmag",
    "det_objective",
    "dist_to_span",
    "distance_objective",
    "enumerate_vertices",
    "estimate_lower_tail",
    "eval_fractional_det",
    "eval_fractional_volume",
    "exact_int_det",
    "gen_graphic_regular",
    "gen_random_partition",
    "gen_repeated_basis",
    "gram_volume_logmag",
    "hypercube_rounding_chain",
    "hypercube_shape",
    "partition_certificate_log",
    "psd_factor",
    "reduce_to_unit_quotas",
    "regular_certificate_log",
    "round_hypercube",
    "round_to_vertex",
    "rounding_chain",
    "sample_uniform",
    "sample_uniform_batch",
    "shrink_chain",
    "shrink_support",
    "simulate_uniform_sampler",
    "solve_partition",
    "solve_regular",
    "substream",
    "trials_for_confidence",
    "uniform_sampler_success_probability",
    "vertex_opt",
    "vertex_support",
    "vertex_to_point",
]
