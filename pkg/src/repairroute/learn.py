"""Regularized logistic training and ranking diagnostics.

The trainer is plain batch gradient descent with Armijo backtracking.  The
same minimizer drives both the stand-alone fit and the coefficient step of
the alternating scheme in :mod:`repairroute.opt`, which tacks a routing term
onto the objective.
"""

from dataclasses import dataclass

import numpy as np

from .core import LabeledDataset, sigmoid, softplus

_STEP_FLOOR = 1e-20
_STEP_CAP = 1e12


@dataclass(frozen=True)
class TrainConfig:
    """Settings for the logistic trainer.

    C2 is the coefficient of the squared-norm penalty and must be chosen by
    the caller; there is no hidden default regularization.
    """

    C2: float
    max_iters: int = 10000
    grad_tol: float = 1e-8
    step0: float = 1.0
    step_shrink: float = 0.5
    step_grow: float = 2.0
    armijo_c: float = 1e-4

    def __post_init__(self):
        if not (np.isfinite(self.C2) and self.C2 >= 0):
            raise ValueError("C2 must be finite and >= 0")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.grad_tol > 0:
            raise ValueError("grad_tol must be positive")
        if not 0 < self.step_shrink < 1:
            raise ValueError("step_shrink must be in (0, 1)")
        if self.step_grow < 1:
            raise ValueError("step_grow must be >= 1")
        if not 0 < self.armijo_c < 1:
            raise ValueError("armijo_c must be in (0, 1)")
        if not self.step0 > 0:
            raise ValueError("step0 must be positive")


@dataclass(frozen=True)
class FitResult:
    lam: np.ndarray
    loss: float
    grad_norm: float
    iterations: int
    converged: bool


def sigmoid_prob(lam, x) -> float:
    """Failure probability sigmoid(lam . x) for a single feature vector."""
    lam = np.asarray(lam, dtype=float).ravel()
    x = np.asarray(x, dtype=float).ravel()
    if lam.shape != x.shape:
        raise ValueError(f"lambda has {lam.shape[0]} coefficients, x has {x.shape[0]}")
    return float(sigmoid(lam @ x))


def training_error(lam, data: LabeledDataset, C2: float) -> float:
    """Logistic loss sum log(1 + exp(-y_i lam.x_i)) plus C2 * ||lam||^2."""
    lam = np.asarray(lam, dtype=float).ravel()
    margins = data.labels * (data.features @ lam)
    return float(np.sum(softplus(-margins)) + C2 * lam @ lam)


def training_gradient(lam, data: LabeledDataset, C2: float) -> np.ndarray:
    """Gradient of :func:`training_error` at lam."""
    lam = np.asarray(lam, dtype=float).ravel()
    margins = data.labels * (data.features @ lam)
    slack = sigmoid(-margins)
    return -(data.features.T @ (data.labels * slack)) + 2.0 * C2 * lam


def minimize_descent(fun, grad, x0, config: TrainConfig) -> FitResult:
    """Gradient descent with Armijo backtracking on a smooth convex objective.

    Stops when the gradient norm drops to config.grad_tol, the line search
    stalls at the step floor, or max_iters is reached.  The accepted step is
    re-grown after each success so the search adapts in both directions.
    """
    x = np.asarray(x0, dtype=float).ravel().copy()
    f = fun(x)
    if not np.isfinite(f):
        raise ValueError("non-finite loss at the starting point; check data scaling")
    step = config.step0
    gnorm = np.inf
    iterations = 0
    converged = False
    for iterations in range(1, config.max_iters + 1):
        g = grad(x)
        gnorm = float(np.linalg.norm(g))
        if gnorm <= config.grad_tol:
            converged = True
            iterations -= 1
            break
        s = step
        accepted = False
        while s >= _STEP_FLOOR:
            cand = x - s * g
            fc = fun(cand)
            if np.isfinite(fc) and fc <= f - config.armijo_c * s * gnorm * gnorm:
                accepted = True
                break
            s *= config.step_shrink
        if not accepted:
            break
        x, f = cand, fc
        step = min(s * config.step_grow, _STEP_CAP)
    if not converged:
        g = grad(x)
        gnorm = float(np.linalg.norm(g))
        converged = gnorm <= config.grad_tol
    return FitResult(lam=x, loss=float(f), grad_norm=gnorm, iterations=iterations, converged=converged)


def fit_logistic(data: LabeledDataset, config: TrainConfig) -> FitResult:
    """Minimize the regularized logistic loss from a zero start."""
    return minimize_descent(
        lambda lam: training_error(lam, data, config.C2),
        lambda lam: training_gradient(lam, data, config.C2),
        np.zeros(data.d),
        config,
    )


def auc(scores, labels) -> float:
    """Area under the ROC curve by the rank-sum statistic; ties count 1/2.

    Equals the probability that a uniformly drawn positive outscores a
    uniformly drawn negative, with ties worth half.
    """
    scores = np.asarray(scores, dtype=float).ravel()
    labels = np.asarray(labels, dtype=float).ravel()
    if scores.shape != labels.shape:
        raise ValueError("scores and labels must have the same length")
    if not np.isfinite(scores).all():
        raise ValueError("scores contain non-finite values")
    if not np.all(np.isin(labels, (-1.0, 1.0))):
        raise ValueError("labels must be -1 or +1")
    pos = labels == 1.0
    npos = int(pos.sum())
    nneg = labels.shape[0] - npos
    if npos == 0 or nneg == 0:
        raise ValueError("AUC needs at least one positive and one negative label")
    order = np.argsort(scores, kind="mergesort")
    ranks = np.empty(scores.shape[0])
    srt = scores[order]
    i = 0
    while i < srt.shape[0]:
        j = i
        while j + 1 < srt.shape[0] and srt[j + 1] == srt[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0  # average of 1-based ranks
        i = j + 1
    u = ranks[pos].sum() - npos * (npos + 1) / 2.0
    return float(u / (npos * nneg))
