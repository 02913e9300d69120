"""Information regularization for semi-supervised classification.

Logistic regression penalized by the label information carried about example
location, the closed-form one-dimensional nonparametric solution, numeric
checks of the accompanying bounds, and the two-Gaussian benchmark.
"""

from .config import Settings, get_settings
from .datasets import LabeledDataset, UnlabeledDataset
from .densities import Density, parse_density
from .errors import InfoRegError, NumericalError
from .models import ExperimentConfig, FitConfig, OptimizerConfig, RegularizerKind
from .optimize import fit

__all__ = [
    "Density",
    "ExperimentConfig",
    "FitConfig",
    "InfoRegError",
    "LabeledDataset",
    "NumericalError",
    "OptimizerConfig",
    "RegularizerKind",
    "Settings",
    "UnlabeledDataset",
    "fit",
    "get_settings",
    "parse_density",
]
