"""Regularized log-likelihood Σ log σ(y_i θᵀx_i) − λ R(θ) and its gradient."""

from __future__ import annotations

import copy
import logging
import math
from collections.abc import Callable

import numpy as np
from scipy.special import expit, log_expit

from ..datasets import LabeledDataset, UnlabeledDataset
from ..errors import ConfigurationError, DimensionMismatchError
from ..models import FitConfig, RegularizerKind
from ..validation import FloatArray, as_vector
from .model import ThetaLike, add_bias_column, theta_array
from .regularizers import Regularizer, get_regularizer

logger = logging.getLogger(__name__)

_INFO_KINDS = (RegularizerKind.INFO_EMPIRICAL, RegularizerKind.INFO_KERNEL)


class RegularizedLikelihood:
    """Objective and gradient over θ for one dataset pair and one config.

    Design rows (with the bias column when ``config.bias`` is set) are built
    once; evaluation only touches the weights.
    """

    def __init__(
        self,
        labeled: LabeledDataset,
        unlabeled: UnlabeledDataset | None,
        config: FitConfig,
    ) -> None:
        labeled.require_nonempty()
        if config.regularizer in _INFO_KINDS:
            if unlabeled is None or len(unlabeled) == 0:
                raise ConfigurationError(
                    f"the {config.regularizer.value} regularizer needs unlabeled points"
                )
        if unlabeled is not None:
            unlabeled.check_pairs_with(labeled)

        self.config = config
        self.feature_dim = labeled.dim
        self.dim = labeled.dim + int(config.bias)
        self._x = add_bias_column(labeled.x) if config.bias else np.asarray(labeled.x)
        self._y = np.asarray(labeled.y)

        points: FloatArray | None = None
        if unlabeled is not None and len(unlabeled):
            points = add_bias_column(unlabeled.x) if config.bias else np.asarray(unlabeled.x)
        self.regularizer: Regularizer = get_regularizer(config, points)

    @property
    def lam(self) -> float:
        return self.config.lam

    def _weights(self, theta: ThetaLike) -> FloatArray:
        weights = theta_array(theta)
        if weights.shape[0] != self.dim:
            raise DimensionMismatchError(self.dim, weights.shape[0], "theta")
        return weights

    def log_likelihood(self, theta: ThetaLike) -> float:
        weights = self._weights(theta)
        return math.fsum(log_expit(self._y * (self._x @ weights)))

    def log_likelihood_gradient(self, theta: ThetaLike) -> FloatArray:
        weights = self._weights(theta)
        margins = self._y * (self._x @ weights)
        return np.asarray((self._y * expit(-margins)) @ self._x)

    def value(self, theta: ThetaLike) -> float:
        weights = self._weights(theta)
        ll = self.log_likelihood(weights)
        if self.lam == 0.0:
            return ll
        return ll - self.lam * self.regularizer.value(weights)

    def gradient(self, theta: ThetaLike) -> FloatArray:
        weights = self._weights(theta)
        grad = self.log_likelihood_gradient(weights)
        if self.lam == 0.0:
            return grad
        return grad - self.lam * self.regularizer.gradient(weights)

    def with_lambda(self, lam: float) -> RegularizedLikelihood:
        """Same data and regularizer, different λ."""

        clone = copy.copy(self)
        clone.config = self.config.model_copy(update={"lam": float(lam)})
        return clone


def objective(
    theta: ThetaLike,
    labeled: LabeledDataset,
    unlabeled: UnlabeledDataset | None,
    config: FitConfig,
) -> float:
    """log-likelihood − λ·R(θ) for the regularizer selected by ``config``."""

    return RegularizedLikelihood(labeled, unlabeled, config).value(theta)


def objective_gradient(
    theta: ThetaLike,
    labeled: LabeledDataset,
    unlabeled: UnlabeledDataset | None,
    config: FitConfig,
) -> FloatArray:
    """Analytic gradient of :func:`objective`."""

    return RegularizedLikelihood(labeled, unlabeled, config).gradient(theta)


def central_difference_gradient(
    func: Callable[[FloatArray], float], theta: ThetaLike, step: float = 1e-5
) -> FloatArray:
    """Central finite-difference gradient of a scalar function of θ."""

    base = as_vector(theta_array(theta))
    grad = np.empty_like(base)
    for i in range(base.shape[0]):
        plus = base.copy()
        minus = base.copy()
        plus[i] += step
        minus[i] -= step
        grad[i] = (func(plus) - func(minus)) / (2.0 * step)
    return grad


__all__ = [
    "RegularizedLikelihood",
    "central_difference_gradient",
    "objective",
    "objective_gradient",
]
