"""Joint coefficient fitting and route choice.

The combined objective is TrainingError(lam) + C1 * RouteCost(route, lam),
where the route cost is the weighted latency sum under node weights induced
by lam: sigmoid scores for the expected-count model, softplus weights as the
convex stand-in for the early-failure model.  Three drivers are provided:

* sequential: fit, then route the fitted weights (the C1 = 0 baseline);
* nelder_mead: direct simplex search on lam with the route re-optimized
  exactly inside every evaluation;
* alternating_minimization: alternate exact routing with descent on lam.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .core import (
    LabeledDataset,
    as_distance_matrix,
    cost1,
    latency,
    sigmoid,
    softplus,
)
from .learn import (
    TrainConfig,
    auc,
    fit_logistic,
    minimize_descent,
    training_error,
    training_gradient,
)
from .trp import solve_weighted_trp_dp

COST_MODELS = ("cost1", "cost2_surrogate")
METHODS = ("sequential", "nm", "am")


@dataclass(frozen=True)
class MltrpConfig:
    """Knobs for the combined objective and its optimizers.

    C2 is required, mirroring the stand-alone trainer.  The `train` field is
    an optional step-control template for inner fits; its C2 is always
    overridden by this config's c2.
    """

    c2: float
    c1: float = 0.0
    cost_model: str = "cost1"
    train: TrainConfig | None = None
    nm_max_evals: int = 2000
    nm_diam_tol: float = 1e-8
    nm_scale: float = 0.1
    nm_reflect: float = 1.0
    nm_expand: float = 2.0
    nm_contract: float = 0.5
    nm_shrink: float = 0.5
    am_iters: int = 10
    seed: int = 0

    def __post_init__(self):
        if not (np.isfinite(self.c1) and self.c1 >= 0):
            raise ValueError("c1 must be finite and >= 0")
        if not (np.isfinite(self.c2) and self.c2 >= 0):
            raise ValueError("c2 must be finite and >= 0")
        if self.cost_model not in COST_MODELS:
            raise ValueError(f"cost_model must be one of {COST_MODELS}")
        if self.nm_max_evals < 1 or self.am_iters < 1:
            raise ValueError("nm_max_evals and am_iters must be >= 1")
        if not (self.nm_diam_tol > 0 and self.nm_scale > 0):
            raise ValueError("nm_diam_tol and nm_scale must be positive")
        if not (self.nm_reflect > 0 and self.nm_expand > 1):
            raise ValueError("nm_reflect must be > 0 and nm_expand > 1")
        if not (0 < self.nm_contract < 1 and 0 < self.nm_shrink < 1):
            raise ValueError("nm_contract and nm_shrink must be in (0, 1)")

    def trainer_config(self) -> TrainConfig:
        if self.train is None:
            return TrainConfig(C2=self.c2)
        return replace(self.train, C2=self.c2)


@dataclass(frozen=True)
class MltrpSolution:
    lam: np.ndarray
    route: list[int]
    training_error: float
    traversal_cost: float
    combined_objective: float
    trace: tuple
    method: str


def node_weights(lam, nodes, cost_model: str) -> np.ndarray:
    """Routing weights induced by the model at each node."""
    if cost_model not in COST_MODELS:
        raise ValueError(f"cost_model must be one of {COST_MODELS}")
    nodes = np.atleast_2d(np.asarray(nodes, dtype=float))
    lam = np.asarray(lam, dtype=float).ravel()
    if nodes.shape[1] != lam.shape[0]:
        raise ValueError(
            f"lambda has {lam.shape[0]} coefficients, node features have {nodes.shape[1]}"
        )
    scores = nodes @ lam
    return sigmoid(scores) if cost_model == "cost1" else softplus(scores)


def obj(lam, route, data: LabeledDataset, nodes, D, cfg: MltrpConfig) -> float:
    """Combined objective at a fixed route."""
    te = training_error(lam, data, cfg.c2)
    w = node_weights(lam, nodes, cfg.cost_model)
    return te + cfg.c1 * cost1(route, w, D)


def simultaneous_objective(lam, data: LabeledDataset, nodes, D, cfg: MltrpConfig) -> float:
    """Combined objective with the route re-optimized exactly for this lam."""
    te = training_error(lam, data, cfg.c2)
    w = node_weights(lam, nodes, cfg.cost_model)
    return te + cfg.c1 * solve_weighted_trp_dp(w, D).cost


def _finalize(lam, data, nodes, D, cfg, trace, method) -> MltrpSolution:
    lam = np.asarray(lam, dtype=float).ravel()
    te = training_error(lam, data, cfg.c2)
    sol = solve_weighted_trp_dp(node_weights(lam, nodes, cfg.cost_model), D)
    return MltrpSolution(
        lam=lam,
        route=sol.route,
        training_error=te,
        traversal_cost=sol.cost,
        combined_objective=te + cfg.c1 * sol.cost,
        trace=tuple(trace),
        method=method,
    )


def sequential_pipeline(data: LabeledDataset, nodes, D, cfg: MltrpConfig) -> MltrpSolution:
    """Fit first, route second; lam never sees the distances."""
    fit = fit_logistic(data, cfg.trainer_config())
    sol = _finalize(fit.lam, data, nodes, D, cfg, trace=(), method="sequential")
    return replace(sol, trace=(sol.combined_objective,))


def nelder_mead(data: LabeledDataset, nodes, D, cfg: MltrpConfig, lam0=None) -> MltrpSolution:
    """Downhill simplex on lam over the exact-inner-route objective.

    The starting simplex sits at lam0 (the plain logistic fit when omitted)
    plus one axis perturbation per coordinate, scaled by
    nm_scale * max(1, ||lam0||_inf).  The best vertex never worsens; the
    search stops when the simplex diameter falls under nm_diam_tol or the
    evaluation budget runs out.
    """
    if lam0 is None:
        lam0 = fit_logistic(data, cfg.trainer_config()).lam
    lam0 = np.asarray(lam0, dtype=float).ravel()
    d = lam0.shape[0]

    def f(v):
        val = simultaneous_objective(v, data, nodes, D, cfg)
        if not np.isfinite(val):
            raise ValueError(f"non-finite objective at simplex vertex {v.tolist()}")
        return val

    scale = cfg.nm_scale * max(1.0, float(np.abs(lam0).max()))
    verts = [lam0.copy()]
    for j in range(d):
        v = lam0.copy()
        v[j] += scale
        verts.append(v)
    fvals = [f(v) for v in verts]
    evals = d + 1
    trace = []
    while True:
        idx = np.argsort(fvals, kind="stable")
        verts = [verts[i] for i in idx]
        fvals = [fvals[i] for i in idx]
        trace.append(fvals[0])
        diam = max(float(np.abs(v - verts[0]).max()) for v in verts[1:])
        if diam < cfg.nm_diam_tol or evals >= cfg.nm_max_evals:
            break
        centroid = np.mean(verts[:-1], axis=0)
        worst = verts[-1]
        xr = centroid + cfg.nm_reflect * (centroid - worst)
        fr = f(xr)
        evals += 1
        if fr < fvals[0]:
            xe = centroid + cfg.nm_expand * (centroid - worst)
            fe = f(xe)
            evals += 1
            verts[-1], fvals[-1] = (xe, fe) if fe < fr else (xr, fr)
        elif fr < fvals[-2]:
            verts[-1], fvals[-1] = xr, fr
        else:
            shrink = False
            if fr < fvals[-1]:
                xc = centroid + cfg.nm_contract * (centroid - worst)
                fc = f(xc)
                evals += 1
                if fc <= fr:
                    verts[-1], fvals[-1] = xc, fc
                else:
                    shrink = True
            else:
                xc = centroid - cfg.nm_contract * (centroid - worst)
                fc = f(xc)
                evals += 1
                if fc < fvals[-1]:
                    verts[-1], fvals[-1] = xc, fc
                else:
                    shrink = True
            if shrink:
                for i in range(1, d + 1):
                    verts[i] = verts[0] + cfg.nm_shrink * (verts[i] - verts[0])
                    fvals[i] = f(verts[i])
                evals += d
    return _finalize(verts[0], data, nodes, D, cfg, trace, method="nm")


def _fixed_route_gradient(lam, lats, data, nodes, cfg: MltrpConfig) -> np.ndarray:
    # d/dlam of the route cost at frozen latencies, plus the training gradient.
    g = training_gradient(lam, data, cfg.c2)
    scores = nodes @ lam
    if cfg.cost_model == "cost1":
        s = sigmoid(scores)
        wgrad = s * (1.0 - s)
    else:
        wgrad = sigmoid(scores)
    return g + cfg.c1 * (nodes.T @ (lats * wgrad))


def alternating_minimization(
    data: LabeledDataset, nodes, D, cfg: MltrpConfig, lam0=None
) -> MltrpSolution:
    """Alternate exact routing with descent on lam at the frozen route.

    Each round first re-solves the route for the current weights, then runs
    the descent trainer on the combined objective with that route frozen,
    warm-started at the current lam.  Both half-steps can only lower the
    objective, so the recorded trace is non-increasing.  The loop stops early
    once the route repeats: the following lam step would start at its own
    minimizer and move nowhere.
    """
    if lam0 is None:
        lam0 = fit_logistic(data, cfg.trainer_config()).lam
    lam = np.asarray(lam0, dtype=float).ravel()
    nodes = np.atleast_2d(np.asarray(nodes, dtype=float))
    D = as_distance_matrix(D)
    tc = cfg.trainer_config()
    prev_route = None
    trace = []
    for _ in range(cfg.am_iters):
        w = node_weights(lam, nodes, cfg.cost_model)
        route = solve_weighted_trp_dp(w, D).route
        if route == prev_route:
            break
        lats = latency(route, D)
        res = minimize_descent(
            lambda v: obj(v, route, data, nodes, D, cfg),
            lambda v: _fixed_route_gradient(v, lats, data, nodes, cfg),
            lam,
            tc,
        )
        lam = res.lam
        trace.append(obj(lam, route, data, nodes, D, cfg))
        prev_route = route
    return _finalize(lam, data, nodes, D, cfg, trace, method="am")


@dataclass(frozen=True)
class SweepRow:
    c1: float
    train_auc: float
    test_auc: float  # nan when no test set was supplied
    traversal_cost: float
    train_loss: float
    route: list[int]


def _solve(method, data, nodes, D, cfg, lam0):
    if method == "sequential":
        return sequential_pipeline(data, nodes, D, cfg)
    if method == "nm":
        return nelder_mead(data, nodes, D, cfg, lam0=lam0)
    if method == "am":
        return alternating_minimization(data, nodes, D, cfg, lam0=lam0)
    raise ValueError(f"method must be one of {METHODS}")


def c1_sweep(
    data: LabeledDataset,
    nodes,
    D,
    cfg: MltrpConfig,
    c1_grid,
    method: str = "am",
    test_data: LabeledDataset | None = None,
) -> list[SweepRow]:
    """Trace the accuracy/cost trade-off over a grid of C1 values.

    All grid points share the same warm start (the plain logistic fit), so
    rows differ only through C1.
    """
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}")
    grid = [float(c) for c in c1_grid]
    if not grid:
        raise ValueError("c1_grid must be non-empty")
    if any(not (math.isfinite(c) and c >= 0) for c in grid):
        raise ValueError("c1 values must be finite and >= 0")
    lam0 = fit_logistic(data, cfg.trainer_config()).lam
    rows = []
    for c1 in grid:
        sol = _solve(method, data, nodes, D, replace(cfg, c1=c1), lam0)
        train_auc = auc(data.features @ sol.lam, data.labels)
        test_auc = (
            auc(test_data.features @ sol.lam, test_data.labels)
            if test_data is not None
            else math.nan
        )
        rows.append(
            SweepRow(
                c1=c1,
                train_auc=train_auc,
                test_auc=test_auc,
                traversal_cost=sol.traversal_cost,
                train_loss=sol.training_error,
                route=sol.route,
            )
        )
    return rows


def route_string(route) -> str:
    """Render a route as a dash-joined closed tour, e.g. 1-3-2-1."""
    return "-".join(str(int(i)) for i in list(route) + [route[0]])


def sweep_csv(rows) -> str:
    """Plot-ready CSV for a C1 sweep, one row per grid point."""
    lines = ["c1,train_auc,test_auc,traversal_cost,train_loss,route"]
    for r in rows:
        lines.append(
            f"{r.c1!r},{r.train_auc!r},{r.test_auc!r},"
            f"{r.traversal_cost!r},{r.train_loss!r},{route_string(r.route)}"
        )
    return "\n".join(lines) + "\n"
