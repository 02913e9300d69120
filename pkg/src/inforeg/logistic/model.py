"""The logistic conditional p(y|x; θ) = σ(yθᵀx) and its Fisher information."""

from __future__ import annotations

import math
from typing import Union

import numpy as np
from numpy.typing import ArrayLike
from scipy.special import expit, log_expit

from ..datasets import LabeledDataset
from ..models import ThetaVector
from ..validation import FloatArray, as_points, as_vector, check_nonempty

ThetaLike = Union[ThetaVector, ArrayLike]


def theta_array(theta: ThetaLike) -> FloatArray:
    """Return the weights of ``theta`` as a flat float array."""

    if isinstance(theta, ThetaVector):
        return theta.array
    return as_vector(theta, what="theta")


def add_bias_column(x: FloatArray) -> FloatArray:
    """Append the constant-1 feature used for the bias weight."""

    return np.hstack([x, np.ones((x.shape[0], 1))])


def design_matrix(theta: ThetaLike, x: ArrayLike) -> FloatArray:
    """Points as rows matching the length of ``theta``.

    A :class:`ThetaVector` with ``bias`` set gets the constant feature appended;
    a bare array must already match the point dimension.
    """

    weights = theta_array(theta)
    if isinstance(theta, ThetaVector) and theta.bias:
        return add_bias_column(as_points(x, theta.feature_dim))
    return as_points(x, weights.shape[0])


def scores(theta: ThetaLike, x: ArrayLike) -> FloatArray:
    """θᵀx for each point."""

    return design_matrix(theta, x) @ theta_array(theta)


def predict_proba(theta: ThetaLike, x: ArrayLike) -> FloatArray:
    """p(y=+1|x) for each point."""

    return np.asarray(expit(scores(theta, x)))


def predict(theta: ThetaLike, x: ArrayLike) -> float:
    """p(y=+1|x) = σ(θᵀx) for a single point."""

    values = predict_proba(theta, x)
    if values.shape[0] != 1:
        raise ValueError(f"predict expects a single point, got {values.shape[0]}")
    return float(values[0])


def _labeled_scores(theta: ThetaLike, labeled: LabeledDataset) -> FloatArray:
    check_nonempty(labeled.y, "labeled dataset")
    return labeled.y * scores(theta, labeled.x)


def log_likelihood(theta: ThetaLike, labeled: LabeledDataset) -> float:
    """Σ_i log σ(y_i θᵀx_i), exactly summed."""

    margins = _labeled_scores(theta, labeled)
    return math.fsum(log_expit(margins))


def log_likelihood_gradient(theta: ThetaLike, labeled: LabeledDataset) -> FloatArray:
    """Σ_i y_i x_i σ(−y_i θᵀx_i)."""

    margins = _labeled_scores(theta, labeled)
    design = design_matrix(theta, labeled.x)
    return np.asarray((labeled.y * expit(-margins)) @ design)


def sigma_product(s: ArrayLike) -> FloatArray:
    """σ(s)σ(−s); largest (1/4) at s = 0."""

    arr = np.asarray(s, dtype=float)
    return np.asarray(expit(arr) * expit(-arr))


def sigma_product_derivative(s: ArrayLike) -> FloatArray:
    """d/ds σ(s)σ(−s) = σ(s)σ(−s)(1 − 2σ(s))."""

    arr = np.asarray(s, dtype=float)
    return sigma_product(arr) * (1.0 - 2.0 * expit(arr))


def gauss_approx_sigma_product(s: ArrayLike) -> FloatArray:
    """¼ exp(−s²/4), the Gaussian approximation of σ(s)σ(−s)."""

    arr = np.asarray(s, dtype=float)
    return 0.25 * np.exp(-0.25 * arr * arr)


def fisher_trace(theta: ThetaLike, x: ArrayLike) -> float:
    """Tr F(x; θ) = ‖θ‖² σ(θᵀx)σ(−θᵀx) at a single point."""

    weights = theta_array(theta)
    s = scores(theta, x)
    if s.shape[0] != 1:
        raise ValueError(f"fisher_trace expects a single point, got {s.shape[0]}")
    return float(weights @ weights * sigma_product(s[0]))


def fisher_information(theta: ThetaLike, x: ArrayLike) -> FloatArray:
    """F(x; θ) = σ(θᵀx)σ(−θᵀx) θθᵀ at a single point."""

    weights = theta_array(theta)
    s = scores(theta, x)
    if s.shape[0] != 1:
        raise ValueError(f"fisher_information expects a single point, got {s.shape[0]}")
    return float(sigma_product(s[0])) * np.outer(weights, weights)


def error_rate(theta: ThetaLike, labeled: LabeledDataset) -> float:
    """Fraction of points with sign(θᵀx) ≠ y; θᵀx = 0 counts as an error."""

    margins = _labeled_scores(theta, labeled)
    return float(np.count_nonzero(margins <= 0.0)) / margins.shape[0]


__all__ = [
    "ThetaLike",
    "add_bias_column",
    "design_matrix",
    "error_rate",
    "fisher_information",
    "fisher_trace",
    "gauss_approx_sigma_product",
    "log_likelihood",
    "log_likelihood_gradient",
    "predict",
    "predict_proba",
    "scores",
    "sigma_product",
    "sigma_product_derivative",
    "theta_array",
]
