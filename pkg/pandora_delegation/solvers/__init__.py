"""Non-delegated Pandora's box solvers and benchmarks."""

from pandora_delegation.solvers.exact_dp import dp_state_count, exact_optimal_dp
from pandora_delegation.solvers.surrogate import (
    exact_opt_value,
    expected_max_positive,
    opt_benchmark,
    opt_surrogate,
)
from pandora_delegation.solvers.threshold_strategy import threshold_strategy_run
from pandora_delegation.solvers.weitzman import (
    PolicyRun,
    expected_weitzman_utility,
    generalized_weitzman_policy,
    lazy_index_greedy,
)

__all__ = [
    "PolicyRun",
    "dp_state_count",
    "exact_opt_value",
    "exact_optimal_dp",
    "expected_max_positive",
    "expected_weitzman_utility",
    "generalized_weitzman_policy",
    "lazy_index_greedy",
    "opt_benchmark",
    "opt_surrogate",
    "threshold_strategy_run",
]
