"""Exact solvers and decision advisory for sequential selection problems."""

from .engine import (SupportDistribution, ThresholdPolicy, backward_thresholds,
                     collapse_support, decide, exceeds, stop_general,
                     stopping_region)
from .horizons import (HorizonSpec, degenerate_horizon, fixed_horizon,
                       pettitt_horizon, random_horizon, truncate,
                       truncated_horizon, u_shaped_horizon, uniform_horizon,
                       zib_mixture_horizon)
from .metrics import (StopTimeStats, expected_effective_stop_time,
                      expected_stop_time, stop_time_pmf, stop_time_stats)
from .problems import Solution, build_problem, region_payload, solve_rank_problem
from .ranks import RankSequence, absolute_ranks, hypergeom_transition, relative_ranks
from .rewards import (RewardSpec, best_choice, custom, kth_best,
                      neg_factorial_moment, neg_rank, neg_squared_rank,
                      one_of_k_best, rank_improvement)
from .tables import (ConditionalRewardTable, reward_table_fixed,
                     reward_table_fixed_direct, reward_table_random,
                     reward_table_random_direct)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
