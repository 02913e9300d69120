"""Maximization of the regularized likelihood.

Gradient ascent and damped Newton share one backtracking loop: a step is
accepted only when the objective strictly increases. Newton uses a Hessian
built from central differences of the analytic gradient and falls back to a
gradient step whenever that Hessian cannot give an ascent direction.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .datasets import LabeledDataset, UnlabeledDataset, two_moons
from .errors import ConfigurationError, NonFiniteObjectiveError
from .logistic.objective import RegularizedLikelihood
from .models import (
    ContinuationSchedule,
    ContinuationStudy,
    FitConfig,
    FitResult,
    OptimizerConfig,
    RegularizerKind,
    ThetaVector,
    TracePoint,
)
from .validation import FloatArray, as_vector

logger = logging.getLogger(__name__)

ObjectiveFn = Callable[[FloatArray], float]
GradientFn = Callable[[FloatArray], FloatArray]
Reason = Literal["grad_tol", "max_iter", "step_exhausted"]

HESSIAN_STEP = 1e-4
MAX_CONDITION = 1e12
RESTART_STD = 0.1


@dataclass(frozen=True)
class OptimizationResult:
    theta: FloatArray
    value: float
    trace: list[tuple[int, float]]
    iterations: int
    reason: Reason
    grad_norm: float
    fallback_iterations: list[int] = field(default_factory=list)


def finite_difference_hessian(
    gradient: GradientFn,
    theta: FloatArray,
    step: float = HESSIAN_STEP,
    symmetrize: bool = True,
) -> FloatArray:
    """Hessian from central differences of ``gradient``, column by column."""

    theta = as_vector(theta)
    d = theta.shape[0]
    hessian = np.empty((d, d))
    for i in range(d):
        plus = theta.copy()
        minus = theta.copy()
        plus[i] += step
        minus[i] -= step
        hessian[:, i] = (gradient(plus) - gradient(minus)) / (2.0 * step)
    if symmetrize:
        hessian = 0.5 * (hessian + hessian.T)
    return hessian


def _newton_direction(hessian: FloatArray, grad: FloatArray) -> FloatArray | None:
    if not np.all(np.isfinite(hessian)):
        return None
    if np.linalg.cond(hessian) > MAX_CONDITION:
        return None
    try:
        direction = np.linalg.solve(-hessian, grad)
    except np.linalg.LinAlgError:
        return None
    if not np.all(np.isfinite(direction)) or float(grad @ direction) <= 0.0:
        return None
    return np.asarray(direction)


def _check_finite(value: float, grad: FloatArray, where: str) -> None:
    if not math.isfinite(value) or not np.all(np.isfinite(grad)):
        raise NonFiniteObjectiveError(f"objective or gradient is not finite at {where}")


def maximize(
    fun: ObjectiveFn,
    gradient: GradientFn,
    theta0: FloatArray | ThetaVector,
    config: OptimizerConfig | None = None,
) -> OptimizationResult:
    """Climb ``fun`` from ``theta0`` until the gradient is small or steps run out.

    Raises:
        NonFiniteObjectiveError: the objective or gradient is not finite at ``theta0``.
    """

    config = config or OptimizerConfig()
    theta = theta0.array if isinstance(theta0, ThetaVector) else as_vector(theta0).copy()
    value = float(fun(theta))
    grad = np.asarray(gradient(theta), dtype=float)
    _check_finite(value, grad, "the starting point")

    trace: list[tuple[int, float]] = [(0, value)]
    fallbacks: list[int] = []
    reason: Reason = "max_iter"
    iterations = 0

    for iteration in range(1, config.max_iter + 1):
        if float(np.linalg.norm(grad)) <= config.grad_tol:
            reason = "grad_tol"
            break

        direction = grad
        if config.method == "newton":
            newton = _newton_direction(finite_difference_hessian(gradient, theta), grad)
            if newton is None:
                fallbacks.append(iteration)
                logger.warning(
                    "Newton step unavailable at iteration %d; taking a gradient step",
                    iteration,
                )
            else:
                direction = newton

        step = config.step
        accepted = False
        for _ in range(config.max_halvings + 1):
            candidate = theta + step * direction
            candidate_value = float(fun(candidate))
            if math.isfinite(candidate_value) and candidate_value > value:
                accepted = True
                break
            step *= config.shrink
        if not accepted:
            reason = "step_exhausted"
            break

        theta = candidate
        value = candidate_value
        grad = np.asarray(gradient(theta), dtype=float)
        _check_finite(value, grad, f"iteration {iteration}")
        iterations = iteration
        trace.append((iteration, value))
        logger.debug("iteration %d: objective %.12g (step %.3g)", iteration, value, step)
    else:
        if float(np.linalg.norm(grad)) <= config.grad_tol:
            reason = "grad_tol"

    grad_norm = float(np.linalg.norm(grad))
    logger.debug(
        "maximize finished after %d iterations: %s, objective %.12g, |grad| %.3g",
        iterations,
        reason,
        value,
        grad_norm,
    )
    return OptimizationResult(
        theta=theta,
        value=value,
        trace=trace,
        iterations=iterations,
        reason=reason,
        grad_norm=grad_norm,
        fallback_iterations=fallbacks,
    )


def _restart_start(seed: int, dim: int) -> FloatArray:
    return np.random.default_rng(seed).normal(0.0, RESTART_STD, size=dim)


def _run_restart(
    likelihood: RegularizedLikelihood,
    theta0: FloatArray,
    optimizer: OptimizerConfig,
    schedule: ContinuationSchedule | None,
) -> OptimizationResult:
    if schedule is None:
        return maximize(likelihood.value, likelihood.gradient, theta0, optimizer)

    theta = theta0
    trace: list[tuple[int, float]] = []
    fallbacks: list[int] = []
    offset = 0
    result: OptimizationResult | None = None
    for lam in schedule.lambdas:
        stage = likelihood.with_lambda(lam)
        result = maximize(stage.value, stage.gradient, theta, optimizer)
        trace.extend((offset + i, v) for i, v in result.trace)
        fallbacks.extend(offset + i for i in result.fallback_iterations)
        offset += result.iterations + 1
        theta = result.theta
        logger.debug("continuation stage lambda=%g: objective %.12g", lam, result.value)
    assert result is not None
    return OptimizationResult(
        theta=result.theta,
        value=result.value,
        trace=trace,
        iterations=offset - 1,
        reason=result.reason,
        grad_norm=result.grad_norm,
        fallback_iterations=fallbacks,
    )


def fit(
    labeled: LabeledDataset,
    unlabeled: UnlabeledDataset | None,
    fit_config: FitConfig,
    optimizer_config: OptimizerConfig | None = None,
    schedule: ContinuationSchedule | None = None,
) -> FitResult:
    """Fit θ with ``fit_config.restarts`` seeded random starts; keep the best.

    Restart ``r`` starts from N(0, 0.1²I) drawn with seed ``fit_config.seed + r``.
    With a ``schedule`` every restart walks the λ values in order, warm-starting
    each stage from the previous solution. Ties go to the lowest restart index.
    """

    optimizer_config = optimizer_config or OptimizerConfig()
    if schedule is not None and schedule.target != fit_config.lam:
        raise ConfigurationError(
            f"continuation schedule ends at {schedule.target}, "
            f"but the fit targets lambda={fit_config.lam}"
        )

    likelihood = RegularizedLikelihood(labeled, unlabeled, fit_config)
    best: OptimizationResult | None = None
    best_index = 0
    objectives: list[float] = []
    for restart in range(fit_config.restarts):
        theta0 = _restart_start(fit_config.seed + restart, likelihood.dim)
        result = _run_restart(likelihood, theta0, optimizer_config, schedule)
        objectives.append(result.value)
        logger.debug("restart %d: objective %.12g (%s)", restart, result.value, result.reason)
        if best is None or result.value > best.value:
            best = result
            best_index = restart
    assert best is not None

    theta = ThetaVector(weights=best.theta, bias=fit_config.bias)
    final = likelihood.value(theta.array)
    logger.info(
        "Fit %s (lambda=%g) finished: objective %.6g from restart %d of %d",
        fit_config.regularizer.value,
        fit_config.lam,
        final,
        best_index,
        fit_config.restarts,
    )
    return FitResult(
        theta=theta,
        objective=final,
        trace=tuple(TracePoint(iteration=i, objective=v) for i, v in best.trace),
        restart_index=best_index,
        reason=best.reason,
        iterations=best.iterations,
        fallback_iterations=tuple(best.fallback_iterations),
        restart_objectives=tuple(objectives),
        config=fit_config,
    )


def continuation_study(
    instances: int = 100,
    lam: float = 1.0,
    seed: int = 0,
    regularizer: RegularizerKind = RegularizerKind.INFO_KERNEL,
    tau: float = 0.25,
    optimizer_config: OptimizerConfig | None = None,
) -> ContinuationStudy:
    """Count instances where continuation ends at least as high as a cold start.

    Each instance is a small two-moons problem fitted once from the same random
    start, with and without the default geometric schedule.
    """

    optimizer_config = optimizer_config or OptimizerConfig(max_iter=300)
    schedule = ContinuationSchedule.geometric(lam)
    config = FitConfig(
        lam=lam,
        regularizer=regularizer,
        tau=tau if regularizer is RegularizerKind.INFO_KERNEL else None,
        restarts=1,
        bias=True,
    )
    wins = 0
    margins: list[float] = []
    for instance in range(instances):
        labeled, unlabeled = two_moons(6, 60, seed=seed + instance)
        instance_config = config.model_copy(update={"seed": seed + instance})
        cold = fit(labeled, unlabeled, instance_config, optimizer_config)
        warm = fit(labeled, unlabeled, instance_config, optimizer_config, schedule)
        margin = warm.objective - cold.objective
        margins.append(margin)
        if margin >= -1e-9:
            wins += 1
    fraction = wins / instances if instances else 0.0
    logger.info(
        "Continuation matched or beat a cold start on %d of %d instances", wins, instances
    )
    return ContinuationStudy(
        instances=instances,
        wins=wins,
        fraction=fraction,
        lam=lam,
        margins=tuple(margins),
    )


__all__ = [
    "OptimizationResult",
    "continuation_study",
    "finite_difference_hessian",
    "fit",
    "maximize",
]
