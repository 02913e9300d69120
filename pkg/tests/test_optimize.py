from __future__ import annotations

import math

import numpy as np
import pytest

from inforeg import optimize
from inforeg.datasets import LabeledDataset, UnlabeledDataset, two_moons
from inforeg.errors import ConfigurationError, NonFiniteObjectiveError
from inforeg.logistic import RegularizedLikelihood
from inforeg.models import ContinuationSchedule, FitConfig, OptimizerConfig, RegularizerKind
from inforeg.optimize import continuation_study, finite_difference_hessian, fit, maximize

TARGET = np.asarray([1.5, -0.5, 2.0])
CURVATURE = np.asarray([[2.0, 0.5, 0.0], [0.5, 1.0, 0.2], [0.0, 0.2, 3.0]])


def _quadratic(theta: np.ndarray) -> float:
    diff = theta - TARGET
    return -0.5 * float(diff @ CURVATURE @ diff)


def _quadratic_gradient(theta: np.ndarray) -> np.ndarray:
    return -(CURVATURE @ (theta - TARGET))


@pytest.fixture
def separable() -> LabeledDataset:
    return LabeledDataset.from_arrays(
        [[1.0, 2.0], [2.0, 0.5], [-1.0, -1.5], [-2.0, 0.2]], [1, 1, -1, -1]
    )


@pytest.fixture
def moons() -> tuple[LabeledDataset, UnlabeledDataset]:
    return two_moons(6, 40, seed=2)


def test_maximize_recovers_isotropic_maximizer() -> None:
    target = np.asarray([0.7, -1.2])
    result = maximize(
        lambda t: -float((t - target) @ (t - target)),
        lambda t: -2.0 * (t - target),
        np.zeros(2),
    )
    np.testing.assert_allclose(result.theta, target, atol=1e-6)
    assert result.reason == "grad_tol"


@pytest.mark.parametrize("method", ["gradient", "newton"])
def test_methods_agree_on_concave_quadratic(method: str) -> None:
    config = OptimizerConfig(method=method, grad_tol=1e-11, max_iter=10_000)
    result = maximize(_quadratic, _quadratic_gradient, np.zeros(3), config)
    np.testing.assert_allclose(result.theta, TARGET, atol=1e-8)


def test_trace_is_nondecreasing_and_ends_above_start() -> None:
    result = maximize(_quadratic, _quadratic_gradient, np.asarray([5.0, 5.0, -5.0]))
    values = [v for _, v in result.trace]
    assert all(b > a for a, b in zip(values, values[1:]))
    assert result.value >= _quadratic(np.asarray([5.0, 5.0, -5.0]))


def test_unregularized_fit_diverges_on_separable_data(separable: LabeledDataset) -> None:
    likelihood = RegularizedLikelihood(separable, None, FitConfig(lam=0.0, regularizer="none"))
    short = maximize(
        likelihood.value, likelihood.gradient, np.zeros(2), OptimizerConfig(max_iter=10)
    )
    long = maximize(
        likelihood.value, likelihood.gradient, np.zeros(2), OptimizerConfig(max_iter=40)
    )
    assert long.reason == "max_iter"
    assert np.linalg.norm(long.theta) > np.linalg.norm(short.theta)


def test_maximize_rejects_nonfinite_start() -> None:
    with pytest.raises(NonFiniteObjectiveError):
        maximize(lambda t: math.nan, lambda t: np.zeros_like(t), np.zeros(2))


def test_newton_falls_back_on_singular_hessian() -> None:
    result = maximize(
        lambda t: -float(t[1] ** 2),
        lambda t: np.asarray([0.0, -2.0 * t[1]]),
        np.asarray([0.3, 1.0]),
        OptimizerConfig(method="newton"),
    )
    assert result.fallback_iterations == [1]
    assert result.reason == "grad_tol"
    assert result.theta[1] == pytest.approx(0.0, abs=1e-12)


def test_fit_reports_newton_fallbacks(
    separable: LabeledDataset, monkeypatch: pytest.MonkeyPatch
) -> None:
    config = FitConfig(lam=1.0, regularizer=RegularizerKind.L2, restarts=2)
    newton = OptimizerConfig(method="newton", max_iter=200)
    clean = fit(separable, None, config, newton)
    assert clean.fallback_iterations == ()

    monkeypatch.setattr(optimize, "_newton_direction", lambda hessian, grad: None)
    forced = fit(separable, None, config, newton)

    assert forced.iterations > 0
    assert forced.fallback_iterations[: forced.iterations] == tuple(
        range(1, forced.iterations + 1)
    )
    np.testing.assert_allclose(forced.theta.array, clean.theta.array, atol=1e-4)


def test_finite_difference_hessian_is_nearly_symmetric(
    moons: tuple[LabeledDataset, UnlabeledDataset],
) -> None:
    labeled, unlabeled = moons
    config = FitConfig(lam=2.0, regularizer=RegularizerKind.INFO_KERNEL, tau=0.25)
    likelihood = RegularizedLikelihood(labeled, unlabeled, config)
    rng = np.random.default_rng(0)
    for _ in range(5):
        theta = rng.normal(size=2)
        raw = finite_difference_hessian(likelihood.gradient, theta, symmetrize=False)
        assert float(np.max(np.abs(raw - raw.T))) < 1e-6


def test_fit_is_deterministic(moons: tuple[LabeledDataset, UnlabeledDataset]) -> None:
    labeled, unlabeled = moons
    config = FitConfig(lam=1.0, regularizer=RegularizerKind.INFO_EMPIRICAL, restarts=3, seed=7)
    optimizer = OptimizerConfig(max_iter=200)
    assert fit(labeled, unlabeled, config, optimizer) == fit(labeled, unlabeled, config, optimizer)


def test_fit_keeps_best_restart(moons: tuple[LabeledDataset, UnlabeledDataset]) -> None:
    labeled, unlabeled = moons
    config = FitConfig(lam=3.0, regularizer=RegularizerKind.INFO_KERNEL, tau=0.25, restarts=4)
    result = fit(labeled, unlabeled, config, OptimizerConfig(max_iter=200))
    assert len(result.restart_objectives) == 4
    assert result.objective >= max(result.restart_objectives) - 1e-12
    assert result.restart_objectives[result.restart_index] == max(result.restart_objectives)


def test_zero_lambda_ignores_regularizer(moons: tuple[LabeledDataset, UnlabeledDataset]) -> None:
    labeled, unlabeled = moons
    optimizer = OptimizerConfig(max_iter=100)
    plain = fit(labeled, None, FitConfig(lam=0.0, regularizer="none", seed=3), optimizer)
    for config in (
        FitConfig(lam=0.0, regularizer=RegularizerKind.INFO_EMPIRICAL, seed=3),
        FitConfig(lam=0.0, regularizer=RegularizerKind.INFO_KERNEL, tau=0.25, seed=3),
    ):
        informed = fit(labeled, unlabeled, config, optimizer)
        np.testing.assert_allclose(informed.theta.array, plain.theta.array, atol=1e-6)


def test_continuation_schedule_must_end_at_target(
    moons: tuple[LabeledDataset, UnlabeledDataset],
) -> None:
    labeled, unlabeled = moons
    config = FitConfig(lam=1.0, regularizer=RegularizerKind.INFO_EMPIRICAL)
    with pytest.raises(ConfigurationError):
        fit(labeled, unlabeled, config, schedule=ContinuationSchedule(lambdas=(0.1, 0.5)))


def test_continuation_fit_reports_target_objective(
    moons: tuple[LabeledDataset, UnlabeledDataset],
) -> None:
    labeled, unlabeled = moons
    config = FitConfig(lam=2.0, regularizer=RegularizerKind.INFO_EMPIRICAL, restarts=1, bias=True)
    schedule = ContinuationSchedule.geometric(2.0, steps=4)
    result = fit(labeled, unlabeled, config, OptimizerConfig(max_iter=150), schedule)
    likelihood = RegularizedLikelihood(labeled, unlabeled, config)
    assert result.objective == pytest.approx(likelihood.value(result.theta))
    assert result.theta.bias
    iterations = [p.iteration for p in result.trace]
    assert iterations == sorted(iterations)


def test_geometric_schedule() -> None:
    schedule = ContinuationSchedule.geometric(10.0, steps=8)
    assert len(schedule.lambdas) == 8
    assert schedule.lambdas[0] == pytest.approx(0.1)
    assert schedule.target == 10.0
    assert ContinuationSchedule.geometric(0.0).lambdas == (0.0,)


def test_schedule_must_increase() -> None:
    with pytest.raises(ValueError):
        ContinuationSchedule(lambdas=(1.0, 1.0))


def test_continuation_study_bookkeeping() -> None:
    study = continuation_study(
        instances=2, lam=1.0, seed=5, optimizer_config=OptimizerConfig(max_iter=60)
    )
    assert study.instances == 2
    assert len(study.margins) == 2
    assert 0 <= study.wins <= 2
    assert study.fraction == study.wins / 2
