"""Regret-minimizing inventory policies for the repeated newsvendor with censored demand."""

from .core import (ActionGrid, CostParams, check_local_observability, cost_difference,
                   newsvendor_cost, observation_vector, observed_value, signal_matrix)
from .estimators import (ActionDistribution, Feedback, conditional_mean, estimate_costs,
                         full_info_costs, tail_probability)
from .policies import (experiment_parameters, make_policy, theorem1_parameters,
                       theorem2_parameters)
from .demand import DemandGenerator, generate
from .arena import (aggregate, best_fixed_cost, best_switching_cost, run_once, simulate)

__version__ = "0.1.0"

__all__ = [
    "ActionGrid", "CostParams", "check_local_observability", "cost_difference", "newsvendor_cost",
    "observation_vector", "observed_value", "signal_matrix",
    "ActionDistribution", "Feedback", "conditional_mean", "estimate_costs", "full_info_costs", "tail_probability",
    "experiment_parameters", "make_policy", "theorem1_parameters", "theorem2_parameters",
    "DemandGenerator", "generate",
    "aggregate", "best_fixed_cost", "best_switching_cost", "run_once", "simulate",
]
