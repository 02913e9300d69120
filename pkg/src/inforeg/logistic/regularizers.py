"""Penalties on θ and their gradients.

The information regularizer approximates ∫ p(x) Tr F(x; θ) dx, either by an
average over the unlabeled points (empirical form) or in closed form under a
Gaussian kernel estimate of p with variance τ (kernel form). λ is applied by
the objective, never here.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Protocol, runtime_checkable

import numpy as np
from numpy.typing import ArrayLike

from ..datasets import UnlabeledDataset
from ..errors import ConfigurationError
from ..models import FitConfig, RegularizerKind
from ..validation import FloatArray, check_nonempty
from .model import (
    ThetaLike,
    design_matrix,
    sigma_product,
    sigma_product_derivative,
    theta_array,
)

logger = logging.getLogger(__name__)


def _unlabeled_design(theta: ThetaLike, unlabeled: UnlabeledDataset | ArrayLike) -> FloatArray:
    x = unlabeled.x if isinstance(unlabeled, UnlabeledDataset) else np.asarray(unlabeled)
    check_nonempty(x, "unlabeled dataset")
    return design_matrix(theta, x)


def _empirical_value(theta: FloatArray, x: FloatArray, norm_factor: bool) -> float:
    mean = float(np.mean(sigma_product(x @ theta)))
    return float(theta @ theta) * mean if norm_factor else mean


def _empirical_gradient(theta: FloatArray, x: FloatArray, norm_factor: bool) -> FloatArray:
    s = x @ theta
    m = x.shape[0]
    inner = (sigma_product_derivative(s) @ x) / m
    if not norm_factor:
        return np.asarray(inner)
    mean = float(np.mean(sigma_product(s)))
    return np.asarray(2.0 * mean * theta + float(theta @ theta) * inner)


def _kernel_value(theta: FloatArray, x: FloatArray, tau: float) -> float:
    norm2 = float(theta @ theta)
    q = 1.0 + 0.5 * tau * norm2
    s = x @ theta
    kernel_sum = math.fsum(np.exp(-(s * s) / (4.0 * q)))
    return norm2 / math.sqrt(q) * kernel_sum / (4.0 * x.shape[0])


def _kernel_gradient(theta: FloatArray, x: FloatArray, tau: float) -> FloatArray:
    m = x.shape[0]
    norm2 = float(theta @ theta)
    q = 1.0 + 0.5 * tau * norm2
    s = x @ theta
    e = np.exp(-(s * s) / (4.0 * q))
    total = float(e.sum())
    rq = 1.0 / math.sqrt(q)

    # d/dθ of exp(−s_j²/(4q)) with q depending on ‖θ‖².
    de = (-(e * s) / (2.0 * q)) @ x + (tau * float(e @ (s * s)) / (4.0 * q * q)) * theta

    grad = (
        2.0 * rq * total * theta
        - 0.5 * norm2 * tau * rq**3 * total * theta
        + norm2 * rq * de
    )
    return np.asarray(grad / (4.0 * m))


def info_reg_empirical(
    theta: ThetaLike,
    unlabeled: UnlabeledDataset | ArrayLike,
    include_theta_norm_factor: bool = True,
) -> float:
    """(1/m) Σ_j σ(θᵀx'_j)σ(−θᵀx'_j), times ‖θ‖² when the norm factor is on."""

    x = _unlabeled_design(theta, unlabeled)
    return _empirical_value(theta_array(theta), x, include_theta_norm_factor)


def info_reg_kernel(
    theta: ThetaLike, unlabeled: UnlabeledDataset | ArrayLike, tau: float
) -> float:
    """‖θ‖²/√q · (1/4m) Σ_j exp(−(θᵀx'_j)²/(4q)) with q = 1 + τ‖θ‖²/2.

    This is the Gaussian approximation of σσ integrated exactly against the
    kernel estimate (1/m) Σ_j N(x; x'_j, τI).
    """

    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    x = _unlabeled_design(theta, unlabeled)
    return _kernel_value(theta_array(theta), x, tau)


@runtime_checkable
class Regularizer(Protocol):
    """A penalty R(θ) with its gradient, evaluated on prepared design rows."""

    name: str

    def value(self, theta: FloatArray) -> float: ...

    def gradient(self, theta: FloatArray) -> FloatArray: ...


@dataclass(frozen=True)
class NoRegularizer:
    name: str = "none"

    def value(self, theta: FloatArray) -> float:
        return 0.0

    def gradient(self, theta: FloatArray) -> FloatArray:
        return np.zeros_like(theta)


@dataclass(frozen=True)
class L2Regularizer:
    name: str = "l2"

    def value(self, theta: FloatArray) -> float:
        return float(theta @ theta)

    def gradient(self, theta: FloatArray) -> FloatArray:
        return 2.0 * theta


@dataclass(frozen=True, eq=False)
class EmpiricalInfoRegularizer:
    points: FloatArray
    include_theta_norm_factor: bool = True
    name: str = "info_empirical"

    def value(self, theta: FloatArray) -> float:
        return _empirical_value(theta, self.points, self.include_theta_norm_factor)

    def gradient(self, theta: FloatArray) -> FloatArray:
        return _empirical_gradient(theta, self.points, self.include_theta_norm_factor)


@dataclass(frozen=True, eq=False)
class KernelInfoRegularizer:
    points: FloatArray
    tau: float
    name: str = "info_kernel"

    def value(self, theta: FloatArray) -> float:
        return _kernel_value(theta, self.points, self.tau)

    def gradient(self, theta: FloatArray) -> FloatArray:
        return _kernel_gradient(theta, self.points, self.tau)


def get_regularizer(config: FitConfig, points: FloatArray | None) -> Regularizer:
    """Build the regularizer named by ``config``.

    ``points`` are the unlabeled design rows (bias column already appended when
    the fit uses one); they are required by the information regularizers only.
    """

    kind = config.regularizer
    if kind is RegularizerKind.NONE:
        return NoRegularizer()
    if kind is RegularizerKind.L2:
        return L2Regularizer()
    if points is None or points.shape[0] == 0:
        raise ConfigurationError(f"the {kind.value} regularizer needs unlabeled points")
    if kind is RegularizerKind.INFO_EMPIRICAL:
        return EmpiricalInfoRegularizer(points, config.include_theta_norm_factor)
    if config.tau is None:
        raise ConfigurationError("the info_kernel regularizer needs tau")
    return KernelInfoRegularizer(points, config.tau)


__all__ = [
    "EmpiricalInfoRegularizer",
    "KernelInfoRegularizer",
    "L2Regularizer",
    "NoRegularizer",
    "Regularizer",
    "get_regularizer",
    "info_reg_empirical",
    "info_reg_kernel",
]
