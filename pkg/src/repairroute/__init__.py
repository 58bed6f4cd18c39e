"""Failure-probability estimation coupled with minimum-latency repair routing."""

from .bound import (
    BoundInputs,
    BoundReport,
    alpha,
    c_vector,
    generalization_bound,
    halfspace_ball_fraction,
    reg_inc_beta,
    shortest_distances,
)
from .core import (
    LabeledDataset,
    cost1,
    cost1_general,
    cost2_exact,
    cost2_general,
    cost2_surrogate_weights,
    latency,
    sigmoid,
    softplus,
    standard_trp_cost,
)
from .learn import (
    FitResult,
    TrainConfig,
    auc,
    fit_logistic,
    sigmoid_prob,
    training_error,
    training_gradient,
)
from .milp import (
    MilpInstance,
    build_milp,
    check_feasible,
    export_lp,
    flow_caps,
    route_to_flow,
)
from .opt import (
    MltrpConfig,
    MltrpSolution,
    alternating_minimization,
    c1_sweep,
    nelder_mead,
    node_weights,
    obj,
    route_string,
    sequential_pipeline,
    simultaneous_objective,
    sweep_csv,
)
from .sim import (
    SimConfig,
    simulate_expected_failures,
    simulate_first_failure_before,
    simulate_route_cost,
)
from .trp import (
    TrpSolution,
    naive_route,
    solve_weighted_trp_bruteforce,
    solve_weighted_trp_dp,
)

__version__ = "0.1.0"
