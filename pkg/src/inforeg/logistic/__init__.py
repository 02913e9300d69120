"""Information-regularized logistic regression."""

from .model import (
    error_rate,
    fisher_information,
    fisher_trace,
    gauss_approx_sigma_product,
    log_likelihood,
    log_likelihood_gradient,
    predict,
    predict_proba,
    sigma_product,
)
from .objective import RegularizedLikelihood, objective, objective_gradient
from .regularizers import Regularizer, get_regularizer, info_reg_empirical, info_reg_kernel

__all__ = [
    "Regularizer",
    "RegularizedLikelihood",
    "error_rate",
    "fisher_information",
    "fisher_trace",
    "gauss_approx_sigma_product",
    "get_regularizer",
    "info_reg_empirical",
    "info_reg_kernel",
    "log_likelihood",
    "log_likelihood_gradient",
    "objective",
    "objective_gradient",
    "predict",
    "predict_proba",
    "sigma_product",
]
