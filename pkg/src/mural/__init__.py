"""Multi-group active learning laboratory on finite instances."""

from .agnostic import AgnosticConfig, check_lemma_invariants, run_agnostic
from .baselines import brute_force_optimum, run_passive
from .cal import run_cal
from .domain import Instance, true_group_loss, true_max_loss
from .reduction import run_approximation, run_group_realizable
from .report import RunReport

__all__ = [
    "AgnosticConfig",
    "Instance",
    "RunReport",
    "brute_force_optimum",
    "check_lemma_invariants",
    "run_agnostic",
    "run_approximation",
    "run_cal",
    "run_group_realizable",
    "run_passive",
    "true_group_loss",
    "true_max_loss",
]

__version__ = "0.1.0"
