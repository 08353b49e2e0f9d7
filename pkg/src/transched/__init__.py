"""Transfer-scheduling toolkit.

Three parts:

* :mod:`transched.knapsack` -- maximum-profit packing of divisible-size
  transfers onto capacity-limited paths (heuristic, baselines, exact oracle).
* :mod:`transched.mincost` -- minimum-cost coverage of a file sequence by
  provider leases and a default link (linear DP, quadratic reference,
  brute-force oracle).
* :mod:`transched.blockpartition` / :mod:`transched.algebras` -- a
  sqrt-decomposition array over pluggable update/query algebras, plus the
  reservation admission engine built on it.
"""

from .algebras import (
    Algebra,
    BitTuple,
    NaiveArray,
    SegTuple,
    SetSegTuple,
    TimestampedValue,
    algebra_names,
    make_algebra,
)
from .blockpartition import BlockArray, SumAddFastArray
from .errors import BudgetExceededError, DivisibilityError, UnsupportedCombinationError
from .knapsack import (
    Item,
    KnapsackInstance,
    Path,
    Solution,
    ValidationReport,
    find_best_replacement,
    single_knapsack_fill,
    solve_exact_dp,
    solve_greedy1,
    solve_heuristic,
    solve_sorted_first_fit,
    stage_one,
    validate_solution,
)
from .mincost import (
    INF,
    CostPlan,
    Lease,
    MinCostInstance,
    Provider,
    brute_force_min_cost,
    compute_minp,
    plan_cost,
    solve_min_cost,
    solve_min_cost_quadratic,
)
from .reservation import Decision, ReservationRequest, SlotProfile

__version__ = "0.1.0"

__all__ = [
    "Algebra",
    "BitTuple",
    "BlockArray",
    "BudgetExceededError",
    "CostPlan",
    "Decision",
    "DivisibilityError",
    "INF",
    "Item",
    "KnapsackInstance",
    "Lease",
    "MinCostInstance",
    "NaiveArray",
    "Path",
    "Provider",
    "ReservationRequest",
    "SegTuple",
    "SetSegTuple",
    "SlotProfile",
    "Solution",
    "SumAddFastArray",
    "TimestampedValue",
    "UnsupportedCombinationError",
    "ValidationReport",
    "algebra_names",
    "brute_force_min_cost",
    "compute_minp",
    "find_best_replacement",
    "make_algebra",
    "plan_cost",
    "single_knapsack_fill",
    "solve_exact_dp",
    "solve_greedy1",
    "solve_heuristic",
    "solve_min_cost",
    "solve_min_cost_quadratic",
    "solve_sorted_first_fit",
    "stage_one",
    "validate_solution",
]
