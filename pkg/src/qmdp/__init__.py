"""Quantile-optimal policies for finite and infinite horizon MDPs.

The solver binary-searches over wealth thresholds; each test point is an
indicator-utility MDP solved by functional backward induction (or
functional value iteration in the infinite-horizon case), and the
accepted test's greedy wealth-Markovian policy is epsilon-optimal for the
lower or upper tau-quantile criterion.
"""

__version__ = "0.1.0"

from .dp import (ValueFunction, WealthMarkovPolicy, backward_induction,
                 extract_policy, value_iteration)
from .errors import (ConfigurationError, ConvergenceError, QmdpError,
                     ResourceLimitError, UnsupportedOperationError,
                     ValidationError)
from .evaluate import (WealthDistribution, brute_force_distributions,
                       brute_force_optimal_quantile, exact_distribution,
                       simulate, standard_backward_induction)
from .mdp import (DataCenterConfig, GarnetConfig, Mdp, default_branching,
                  generate_datacenter, generate_garnet, skew_rewards, validate)
from .serialize import (load_policy, load_problem, policy_from_payload,
                        policy_to_payload, problem_from_dict, problem_to_dict,
                        save_policy, save_problem)
from .solver import (IterationRecord, QuantileQuery, SolveReport,
                     effective_epsilon, iteration_bound, quantile_certificate,
                     solve_quantile)
from .stepfun import (ActionMap, StepFunction, combine, pointwise_max, shift,
                      sup_distance, target_utility)
from .wealth import (AdditiveWealth, DiscountedWealth, OrdinalWealth,
                     WealthSpace, WEALTH_TOL)

__all__ = [
    "AdditiveWealth", "ActionMap", "ConfigurationError", "ConvergenceError",
    "DataCenterConfig", "DiscountedWealth", "GarnetConfig", "IterationRecord",
    "Mdp", "OrdinalWealth", "QmdpError", "QuantileQuery", "ResourceLimitError",
    "SolveReport", "StepFunction", "UnsupportedOperationError",
    "ValidationError", "ValueFunction", "WealthDistribution",
    "WealthMarkovPolicy", "WealthSpace", "WEALTH_TOL",
    "backward_induction", "brute_force_distributions",
    "brute_force_optimal_quantile", "combine", "default_branching",
    "effective_epsilon", "exact_distribution", "extract_policy",
    "generate_datacenter", "generate_garnet", "iteration_bound",
    "load_policy", "load_problem", "pointwise_max", "policy_from_payload",
    "policy_to_payload", "problem_from_dict", "problem_to_dict",
    "quantile_certificate", "save_policy", "save_problem", "shift",
    "simulate", "skew_rewards", "solve_quantile",
    "standard_backward_induction", "sup_distance", "target_utility",
    "validate", "value_iteration",
]
