"""Majorization-based diversity comparison and the b-targeting Schur choice rule."""

from .errors import ConsistencyError, InputError, PreconditionError, ResourceError, SchurChoiceError
from .majorization import (
    BiasSpec,
    Diversity,
    derive_bias,
    majorizes,
    more_b_diverse,
    strictly_majorizes,
    transform,
)
from .frontier import BudgetSpec, FrontierSet, frontier, frontier_bruteforce, frontier_diagnostics, in_budget
from .choice import (
    PriorityRanking,
    Student,
    greedy_choice,
    matroid_bases,
    merit_trichotomy,
    priority_dominates,
    schur_choice,
    xi,
)
from .audit import RuleTable, Universe, audit, complete_ranking, reveal_relation

__version__ = "0.1.0"

__all__ = [
    "ConsistencyError",
    "InputError",
    "PreconditionError",
    "ResourceError",
    "SchurChoiceError",
    "BiasSpec",
    "Diversity",
    "derive_bias",
    "majorizes",
    "more_b_diverse",
    "strictly_majorizes",
    "transform",
    "BudgetSpec",
    "FrontierSet",
    "frontier",
    "frontier_bruteforce",
    "frontier_diagnostics",
    "in_budget",
    "PriorityRanking",
    "Student",
    "greedy_choice",
    "matroid_bases",
    "merit_trichotomy",
    "priority_dominates",
    "schur_choice",
    "xi",
    "RuleTable",
    "Universe",
    "audit",
    "complete_ranking",
    "reveal_relation",
]
