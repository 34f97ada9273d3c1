"""Solver output record."""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class SolveReport:
    """Best set found by a randomized solve, with its certificate.

    ``objective_det`` is det(L_{S,S}) for the chosen set; ``objective_log``
    is its natural log (-inf when the value is zero).  The certified factor
    is the guaranteed fraction of the optimum, stored in log form because it
    is astronomically small for larger instances.
    """

    chosen_set: tuple[int, ...]
    objective_det: float
    objective_log: float
    certified_factor_log: float
    trials: int
    seed: int
    per_trial_values: tuple[float, ...] | None = None
    warnings: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.objective_log == float("-inf"):
            if self.objective_det != 0.0:
                raise ValueError("zero log objective requires zero det objective")
        elif not math.isclose(
            self.objective_det, math.exp(self.objective_log), rel_tol=1e-9
        ):
            raise ValueError("objective_det and objective_log disagree")
