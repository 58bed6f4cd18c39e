"""Command-line front end.

Subcommands cover the full workflow: fit a model, route a fitted model,
optimize both jointly, export the routing MILP as LP text, replay the
bundled demos, validate costs by simulation, and evaluate the deviation
bound.  All outputs are written atomically under --out-dir and contain no
timestamps or host details, so identical invocations produce identical
bytes.  Exit codes: 0 on success, 2 for bad input, 1 for internal errors.
"""

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import dataio
from .bound import BoundInputs, generalization_bound
from .core import cost1, cost2_exact, latency, standard_trp_cost
from .dataio import ValidationError
from .demo import INSTANCES
from .learn import TrainConfig, auc, fit_logistic
from .milp import build_milp, export_lp
from .opt import (
    METHODS,
    MltrpConfig,
    alternating_minimization,
    c1_sweep,
    nelder_mead,
    node_weights,
    route_string,
    sequential_pipeline,
    sweep_csv,
)
from .sim import SimConfig, simulate_route_cost
from .trp import naive_route, solve_weighted_trp_dp

_CLI_COST_MODELS = ("cost1", "cost2")


def _internal_cost_model(name: str) -> str:
    return "cost1" if name == "cost1" else "cost2_surrogate"


def _require(args, *names):
    for name in names:
        if getattr(args, name.replace("-", "_")) is None:
            raise ValidationError(f"--{name} is required for this command")


def _mltrp_config(args, c1=None) -> MltrpConfig:
    if c1 is None:
        c1 = args.c1 if args.c1 is not None else 0.0
    return MltrpConfig(
        c2=args.c2,
        c1=c1,
        cost_model=_internal_cost_model(args.cost_model),
        seed=args.seed,
    )


def _model_dict(fit, c2: float, data) -> dict:
    scores = data.features @ fit.lam
    both = (data.labels == 1).any() and (data.labels == -1).any()
    return {
        "lambda": fit.lam,
        "loss": fit.loss,
        "grad_norm": fit.grad_norm,
        "iterations": fit.iterations,
        "converged": fit.converged,
        "c2": c2,
        "train_auc": auc(scores, data.labels) if both else None,
    }


def _route_dict(route, lam, nodes, D, cost_model: str) -> dict:
    w = node_weights(lam, nodes, cost_model)
    probs = node_weights(lam, nodes, "cost1")
    lats = latency(route, D)
    naive = naive_route(w)
    return {
        "route": list(route),
        "route_string": route_string(route),
        "latencies_by_node": lats,
        "weights": w,
        "probabilities": probs,
        "cost1": cost1(route, probs, D),
        "cost2_exact": cost2_exact(route, lam, nodes, D),
        "weighted_latency_cost": cost1(route, w, D),
        "standard_trp_cost": standard_trp_cost(route, D),
        "naive": {
            "route": list(naive),
            "route_string": route_string(naive),
            "cost1": cost1(naive, probs, D),
            "cost2_exact": cost2_exact(naive, lam, nodes, D),
            "weighted_latency_cost": cost1(naive, w, D),
        },
    }


def _load_problem(args):
    data = dataio.load_labeled_csv(args.train)
    nodes = dataio.load_nodes_csv(args.nodes)
    D = dataio.load_distances_csv(args.distances)
    if nodes.shape[1] != data.d:
        raise ValidationError(
            f"node features have {nodes.shape[1]} columns, training data has {data.d}"
        )
    if nodes.shape[0] != D.shape[0]:
        raise ValidationError(
            f"{nodes.shape[0]} node rows do not match a {D.shape[0]}x{D.shape[0]} distance matrix"
        )
    return data, nodes, D


def cmd_train(args) -> int:
    _require(args, "train", "c2", "out-dir")
    data = dataio.load_labeled_csv(args.train)
    fit = fit_logistic(data, TrainConfig(C2=args.c2))
    dataio.write_json(Path(args.out_dir) / "model.json", _model_dict(fit, args.c2, data))
    return 0


def cmd_route(args) -> int:
    _require(args, "train", "nodes", "distances", "c2", "out-dir")
    data, nodes, D = _load_problem(args)
    cfg = _mltrp_config(args, c1=0.0)
    fit = fit_logistic(data, cfg.trainer_config())
    route = solve_weighted_trp_dp(node_weights(fit.lam, nodes, cfg.cost_model), D).route
    out = Path(args.out_dir)
    dataio.write_json(out / "model.json", _model_dict(fit, args.c2, data))
    dataio.write_json(out / "route.json", _route_dict(route, fit.lam, nodes, D, cfg.cost_model))
    return 0


def cmd_simultaneous(args) -> int:
    _require(args, "train", "nodes", "distances", "c2", "out-dir")
    data, nodes, D = _load_problem(args)
    test = dataio.load_labeled_csv(args.test) if args.test else None
    if test is not None and test.d != data.d:
        raise ValidationError(
            f"test data has {test.d} feature columns, training data has {data.d}"
        )
    cfg = _mltrp_config(args)
    out = Path(args.out_dir)
    solver = {
        "sequential": sequential_pipeline,
        "nm": nelder_mead,
        "am": alternating_minimization,
    }[args.method]
    sol = solver(data, nodes, D, cfg)
    dataio.write_json(
        out / "solution.json",
        {
            "method": sol.method,
            "c1": cfg.c1,
            "c2": cfg.c2,
            "cost_model": args.cost_model,
            "lambda": sol.lam,
            "route": list(sol.route),
            "route_string": route_string(sol.route),
            "training_error": sol.training_error,
            "traversal_cost": sol.traversal_cost,
            "combined_objective": sol.combined_objective,
            "trace": list(sol.trace),
        },
    )
    dataio.write_json(out / "route.json", _route_dict(sol.route, sol.lam, nodes, D, cfg.cost_model))
    if args.c1_grid:
        try:
            grid = [float(tok) for tok in args.c1_grid.split(",") if tok.strip()]
        except ValueError:
            raise ValidationError(f"--c1-grid must be comma-separated numbers, got {args.c1_grid!r}") from None
        rows = c1_sweep(data, nodes, D, cfg, grid, method=args.method, test_data=test)
        dataio.write_csv(out / "sweep.csv", sweep_csv(rows))
    return 0


def cmd_export_milp(args) -> int:
    _require(args, "train", "nodes", "distances", "c2")
    if args.lp_out is None and args.out_dir is None:
        raise ValidationError("--lp-out or --out-dir is required for this command")
    data, nodes, D = _load_problem(args)
    cfg = _mltrp_config(args, c1=0.0)
    fit = fit_logistic(data, cfg.trainer_config())
    w = node_weights(fit.lam, nodes, cfg.cost_model)
    text = export_lp(build_milp(w, D))
    target = Path(args.lp_out) if args.lp_out else Path(args.out_dir) / "model.lp"
    dataio.write_text(target, text)
    return 0


def cmd_demo(args) -> int:
    _require(args, "out-dir")
    inst = INSTANCES[args.which](seed=args.seed)
    data, nodes, D = inst.train, inst.nodes, inst.D
    cfg = inst.cfg
    if args.c1 is not None:
        cfg = replace(cfg, c1=args.c1)
    if args.c2 is not None:
        cfg = replace(cfg, c2=args.c2)
    out = Path(args.out_dir)

    header = ",".join(f"f{k+1}" for k in range(data.d))
    train_rows = [header + ",label"] + [
        ",".join(repr(v) for v in row) + f",{int(lab):+d}"
        for row, lab in zip(data.features.tolist(), data.labels.tolist())
    ]
    dataio.write_csv(out / "train.csv", "\n".join(train_rows) + "\n")
    node_rows = [header] + [",".join(repr(v) for v in row) for row in nodes.tolist()]
    dataio.write_csv(out / "nodes.csv", "\n".join(node_rows) + "\n")
    dist_rows = [",".join(repr(v) for v in row) for row in D.tolist()]
    dataio.write_csv(out / "distances.csv", "\n".join(dist_rows) + "\n")

    seq = sequential_pipeline(data, nodes, D, cfg)
    solver = {"nm": nelder_mead, "am": alternating_minimization}[args.method if args.method != "sequential" else "am"]
    sim_sol = solver(data, nodes, D, cfg)

    def _summary(sol):
        probs = node_weights(sol.lam, nodes, "cost1")
        return {
            "route": list(sol.route),
            "route_string": route_string(sol.route),
            "cost1": cost1(sol.route, probs, D),
            "cost2_exact": cost2_exact(sol.route, sol.lam, nodes, D),
            "training_error": sol.training_error,
            "probabilities": probs,
        }

    s_seq, s_sim = _summary(seq), _summary(sim_sol)
    dataio.write_json(out / "sequential.json", s_seq)
    dataio.write_json(out / "simultaneous.json", s_sim)
    shift = np.abs(np.asarray(s_seq["probabilities"]) - np.asarray(s_sim["probabilities"]))
    dataio.write_json(
        out / "summary.json",
        {
            "instance": inst.name,
            "c1": cfg.c1,
            "c2": cfg.c2,
            "cost_model": cfg.cost_model,
            "method": sim_sol.method,
            "seed": args.seed,
            "sequential": s_seq,
            "simultaneous": s_sim,
            "cost1_reduction_pct": 100.0 * (s_seq["cost1"] - s_sim["cost1"]) / s_seq["cost1"],
            "probability_shift": shift,
            "max_shift_node": int(shift.argmax()) + 1,
            "odd_node": inst.odd_node,
        },
    )
    return 0


def cmd_simulate(args) -> int:
    _require(args, "train", "nodes", "distances", "c2", "out-dir")
    data, nodes, D = _load_problem(args)
    cfg = _mltrp_config(args, c1=0.0)
    sol = sequential_pipeline(data, nodes, D, cfg)
    sim_cfg = SimConfig(trials=args.trials, seed=args.seed, steps_per_unit=args.steps_per_unit)
    report = simulate_route_cost(
        sol.route, D, sim_cfg, model=args.cost_model, lam=sol.lam, nodes=nodes
    )
    doc = report.to_dict()
    doc["route"] = list(sol.route)
    doc["route_string"] = route_string(sol.route)
    dataio.write_json(Path(args.out_dir) / "simulation.json", doc)
    return 0


def cmd_bound(args) -> int:
    _require(args, "nodes", "distances", "cg", "eps", "out-dir")
    nodes = dataio.load_nodes_csv(args.nodes)
    D = dataio.load_distances_csv(args.distances)
    if nodes.shape[0] != D.shape[0]:
        raise ValidationError(
            f"{nodes.shape[0]} node rows do not match a {D.shape[0]}x{D.shape[0]} distance matrix"
        )
    m1 = args.m1
    m = args.m
    norm_cap = float(np.linalg.norm(nodes, axis=1).max())
    if args.train:
        data = dataio.load_labeled_csv(args.train)
        if data.d != nodes.shape[1]:
            raise ValidationError(
                f"training data has {data.d} feature columns, nodes have {nodes.shape[1]}"
            )
        if args.c2 is None:
            raise ValidationError("--c2 is required when --train is used")
        fit = fit_logistic(data, TrainConfig(C2=args.c2))
        lam_norm = float(np.linalg.norm(fit.lam))
        m1 = max(m1, lam_norm) if m1 is not None else lam_norm
        m = m if m is not None else data.m
        norm_cap = max(norm_cap, float(np.linalg.norm(data.features, axis=1).max()))
    if m1 is None:
        raise ValidationError("supply --m1 or --train to set the coefficient norm cap")
    if m is None:
        raise ValidationError("supply --m or --train to set the sample size")
    m2 = args.m2 if args.m2 is not None else norm_cap
    try:
        inputs = BoundInputs(M1=m1, M2=m2, Cg=args.cg, eps=args.eps, m=m, nodes=nodes, D=D)
        report = generalization_bound(inputs)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None
    dataio.write_json(
        Path(args.out_dir) / "bound.json",
        {
            "M1": m1,
            "M2": m2,
            "Cg": args.cg,
            "eps": args.eps,
            "m": m,
            "dimension": inputs.d,
            "shortest_distances": report.dists,
            "m1_slope": report.m1,
            "m0_intercept": report.m0,
            "c_tilde": report.c_tilde,
            "c_tilde0": report.c_tilde0,
            "c": report.c,
            "c_norm_inv": report.c_norm_inv,
            "z_prime": report.z_prime,
            "r_prime": report.r_prime,
            "alpha": report.alpha,
            "covering_factor": report.covering_factor,
            "exp_factor": report.exp_factor,
            "bound": report.bound,
            "constraint_vacuous": report.constraint_vacuous,
        },
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="repairroute",
        description="Failure-probability estimation coupled with minimum-latency routing.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, model=True):
        p.add_argument("--train", help="training CSV (features + label column)")
        p.add_argument("--test", help="held-out CSV with the same columns")
        p.add_argument("--nodes", help="node feature CSV")
        p.add_argument("--distances", help="square travel-cost CSV, no header")
        p.add_argument("--c1", type=float, help="routing-cost weight (default 0)")
        p.add_argument("--c2", type=float, help="squared-norm regularization weight")
        if model:
            p.add_argument(
                "--cost-model", choices=_CLI_COST_MODELS, default="cost1",
                help="cost1: expected failure counts; cost2: early-failure surrogate",
            )
        p.add_argument("--method", choices=METHODS, default="am")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out-dir", help="directory for output files")
        p.add_argument("--c1-grid", help="comma-separated C1 values for a sweep CSV")
        p.add_argument("--trials", type=int, default=100_000)
        p.add_argument("--lp-out", help="output path for LP text")

    p = sub.add_parser("train", help="fit the regularized logistic model")
    common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("route", help="fit, then route the fitted weights")
    common(p)
    p.set_defaults(func=cmd_route)

    p = sub.add_parser("simultaneous", help="joint fit and route")
    common(p)
    p.set_defaults(func=cmd_simultaneous)

    p = sub.add_parser("export-milp", help="write the routing MILP as LP text")
    common(p)
    p.set_defaults(func=cmd_export_milp)

    p = sub.add_parser("demo", help="run a bundled synthetic showcase")
    common(p)
    p.add_argument("--which", choices=sorted(INSTANCES), default="six_node")
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("simulate", help="Monte Carlo check of the analytic costs")
    common(p)
    p.add_argument("--steps-per-unit", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bound", help="evaluate the deviation bound")
    common(p, model=False)
    p.add_argument("--cg", type=float, help="budget on the weighted failure-rate sum")
    p.add_argument("--eps", type=float, help="deviation size")
    p.add_argument("--m1", type=float, help="coefficient norm cap")
    p.add_argument("--m2", type=float, help="feature norm cap")
    p.add_argument("--m", type=int, help="training sample size")
    p.set_defaults(func=cmd_bound)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
