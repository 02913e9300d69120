"""Pydantic models for configuration, results, reports and HTTP payloads."""

from __future__ import annotations

import math
from enum import Enum
from typing import Literal, Optional, Union

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    NonNegativeFloat,
    PositiveFloat,
    field_validator,
    model_validator,
)

from .densities import Density
from .validation import FloatArray, validate_finite


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)


class RegularizerKind(str, Enum):
    """Penalty subtracted from the log-likelihood."""

    NONE = "none"
    L2 = "l2"
    INFO_EMPIRICAL = "info_empirical"
    INFO_KERNEL = "info_kernel"


# Spellings accepted on the command line.
REGULARIZER_ALIASES: dict[str, RegularizerKind] = {
    "none": RegularizerKind.NONE,
    "l2": RegularizerKind.L2,
    "info-emp": RegularizerKind.INFO_EMPIRICAL,
    "info_empirical": RegularizerKind.INFO_EMPIRICAL,
    "info-kernel": RegularizerKind.INFO_KERNEL,
    "info_kernel": RegularizerKind.INFO_KERNEL,
}


class ThetaVector(_Frozen):
    """Logistic weights; the last entry is the bias weight when ``bias`` is set."""

    weights: tuple[float, ...] = Field(min_length=1)
    bias: bool = False

    @field_validator("weights", mode="before")
    @classmethod
    def _coerce(cls, value: object) -> tuple[float, ...]:
        arr = np.atleast_1d(np.asarray(value, dtype=float)).ravel()
        if not validate_finite(arr):
            raise ValueError("theta entries must be finite")
        return tuple(float(v) for v in arr)

    @model_validator(mode="after")
    def _check_bias(self) -> ThetaVector:
        if self.bias and len(self.weights) < 2:
            raise ValueError("a theta with a bias weight needs at least one feature weight")
        return self

    @property
    def array(self) -> FloatArray:
        return np.asarray(self.weights, dtype=float)

    @property
    def dim(self) -> int:
        return len(self.weights)

    @property
    def feature_dim(self) -> int:
        """Dimension of the raw points this theta applies to."""
        return len(self.weights) - int(self.bias)


class FitConfig(_Frozen):
    """Regularized logistic fit settings. ``lam`` reads and writes as ``lambda``."""

    lam: NonNegativeFloat = Field(default=1.0, alias="lambda")
    regularizer: RegularizerKind = RegularizerKind.INFO_EMPIRICAL
    tau: Optional[PositiveFloat] = None
    include_theta_norm_factor: bool = True
    bias: bool = False
    restarts: int = Field(default=8, ge=1)
    seed: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def _check_tau(self) -> FitConfig:
        kernel = self.regularizer is RegularizerKind.INFO_KERNEL
        if kernel and self.tau is None:
            raise ValueError("tau is required for the info_kernel regularizer")
        if not kernel and self.tau is not None:
            raise ValueError("tau is only valid for the info_kernel regularizer")
        return self


class OptimizerConfig(_Frozen):
    method: Literal["gradient", "newton"] = "gradient"
    step: PositiveFloat = 1.0
    grad_tol: PositiveFloat = 1e-6
    max_iter: int = Field(default=500, ge=1)
    shrink: float = Field(default=0.5, gt=0.0, lt=1.0)
    max_halvings: int = Field(default=40, ge=0)


class ContinuationSchedule(_Frozen):
    """Increasing λ values solved in order, each warm-started from the last."""

    lambdas: tuple[NonNegativeFloat, ...] = Field(min_length=1)

    @field_validator("lambdas")
    @classmethod
    def _increasing(cls, value: tuple[float, ...]) -> tuple[float, ...]:
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("continuation lambdas must be strictly increasing")
        return value

    @classmethod
    def geometric(
        cls, target: float, steps: int = 8, start_fraction: float = 0.01
    ) -> ContinuationSchedule:
        """``steps`` geometrically spaced values from ``start_fraction·target`` to ``target``."""

        if target < 0:
            raise ValueError(f"target lambda must be nonnegative, got {target}")
        if target == 0.0 or steps == 1:
            return cls(lambdas=(float(target),))
        values = np.geomspace(start_fraction * target, target, steps)
        values[-1] = target
        return cls(lambdas=tuple(float(v) for v in values))

    @property
    def target(self) -> float:
        return self.lambdas[-1]


class TracePoint(_Frozen):
    iteration: int
    objective: float


class FitResult(_Frozen):
    theta: ThetaVector
    objective: float
    trace: tuple[TracePoint, ...] = ()
    restart_index: int = Field(ge=0)
    reason: Literal["grad_tol", "max_iter", "step_exhausted"] = "grad_tol"
    iterations: int = 0
    fallback_iterations: tuple[int, ...] = ()
    restart_objectives: tuple[float, ...] = ()
    config: FitConfig

    def to_model_file(self) -> ModelFile:
        return ModelFile(
            theta=self.theta.weights,
            bias=self.theta.bias,
            config=self.config,
            objective=self.objective,
        )


class ModelFile(_Frozen):
    """On-disk form of a fitted model."""

    theta: tuple[float, ...]
    bias: bool = False
    config: FitConfig
    objective: float

    def theta_vector(self) -> ThetaVector:
        return ThetaVector(weights=self.theta, bias=self.bias)


class ContinuationStudy(_Frozen):
    instances: int
    wins: int
    fraction: float
    lam: float = Field(alias="lambda")
    margins: tuple[float, ...]


# --- harness -----------------------------------------------------------------


ExperimentMethod = Literal["none", "l2", "info_empirical", "info_kernel"]


class ExperimentConfig(_Frozen):
    """Two isotropic Gaussian classes sharing one variance."""

    n_labeled: int = Field(default=5, ge=2)
    n_unlabeled: int = Field(default=100, ge=1)
    n_test: int = Field(default=2000, ge=1)
    n_validation: int = Field(default=2000, ge=1)
    trials: int = Field(default=100, ge=1)
    dim: int = Field(default=2, ge=1)
    class_means: Optional[tuple[tuple[float, ...], tuple[float, ...]]] = None
    shared_covariance: PositiveFloat = 1.0
    mean_separation: NonNegativeFloat = 3.0
    lambda_grid: tuple[NonNegativeFloat, ...] = Field(
        default=(0.1, 0.3, 1.0, 3.0, 10.0, 30.0), min_length=1
    )
    tau: PositiveFloat = 0.25
    methods: tuple[ExperimentMethod, ...] = Field(
        default=("l2", "info_empirical", "info_kernel"), min_length=1
    )
    restarts: int = Field(default=8, ge=1)
    include_theta_norm_factor: bool = True
    bias: bool = False
    seed: int = Field(default=0, ge=0)
    optimizer: OptimizerConfig = OptimizerConfig()

    @field_validator("methods")
    @classmethod
    def _unique_methods(cls, value: tuple[str, ...]) -> tuple[str, ...]:
        if len(set(value)) != len(value):
            raise ValueError(f"methods must be distinct, got {list(value)}")
        return value

    @model_validator(mode="after")
    def _check_means(self) -> ExperimentConfig:
        if self.class_means is not None:
            for mean in self.class_means:
                if len(mean) != self.dim:
                    raise ValueError(
                        f"class mean {list(mean)} does not have dimension {self.dim}"
                    )
        return self

    def resolved_means(self) -> tuple[FloatArray, FloatArray]:
        """Means of the (+1, -1) classes; defaults to ±separation/2 on the first axis."""

        if self.class_means is not None:
            return (np.asarray(self.class_means[0]), np.asarray(self.class_means[1]))
        offset = np.zeros(self.dim)
        offset[0] = self.mean_separation / 2.0
        return (offset, -offset)

    def fit_config(self, method: str, lam: float, seed: int) -> FitConfig:
        kind = RegularizerKind(method)
        return FitConfig(
            lam=lam,
            regularizer=kind,
            tau=self.tau if kind is RegularizerKind.INFO_KERNEL else None,
            include_theta_norm_factor=self.include_theta_norm_factor,
            bias=self.bias,
            restarts=self.restarts,
            seed=seed,
        )


class TrialOutcome(_Frozen):
    trial: int
    error: Optional[float] = None
    lam: Optional[float] = Field(default=None, alias="lambda")
    failure: Optional[str] = None


class MethodSummary(_Frozen):
    """Aggregate over trials; means are ``None`` when every trial failed."""

    mean_error: Optional[float]
    standard_error: Optional[float]
    errors: tuple[Optional[float], ...]
    selected_lambdas: tuple[Optional[float], ...]
    failures: int = 0


class ExperimentReport(_Frozen):
    config: ExperimentConfig
    methods: dict[str, MethodSummary]
    wall_time: float = 0.0

    @model_validator(mode="after")
    def _check_counts(self) -> ExperimentReport:
        for name, summary in self.methods.items():
            if len(summary.errors) != self.config.trials:
                raise ValueError(
                    f"method {name} has {len(summary.errors)} errors for "
                    f"{self.config.trials} trials"
                )
        return self


# --- theory ------------------------------------------------------------------


class TheoryQuery(_Frozen):
    epsilon: float = Field(gt=0.0, lt=1.0)
    delta: float = Field(gt=0.0, lt=1.0)
    gamma: PositiveFloat
    density: Density

    @model_validator(mode="after")
    def _one_dimensional(self) -> TheoryQuery:
        if self.density.dim != 1:
            raise ValueError("theory calculators need a one-dimensional density")
        return self


class ComplexityProfile(_Frozen):
    alphas: tuple[PositiveFloat, ...]
    m_values: tuple[float, ...]
    c_values: tuple[int, ...]
    max_pdf: float

    @model_validator(mode="after")
    def _aligned(self) -> ComplexityProfile:
        if not len(self.alphas) == len(self.m_values) == len(self.c_values):
            raise ValueError("alphas, m_values and c_values must have equal length")
        if any(b <= a for a, b in zip(self.alphas, self.alphas[1:])):
            raise ValueError("alphas must be strictly increasing")
        if any(c < 1 for c in self.c_values):
            raise ValueError("interval counts must be positive")
        return self


class BoundResult(_Frozen):
    epsilon: float
    delta: float
    gamma: float
    m_p_inverse: float
    c_p: int
    raw: float
    bound: int


class Lemma3Report(_Frozen):
    x1: float
    x2: float
    lhs: float
    rhs: float
    margin: float
    passed: bool


class Lemma4Report(_Frozen):
    expected_lhs: float
    expected_rhs: float
    expected_slack: float
    empirical_lhs: float
    empirical_rhs: float
    empirical_slack: float
    passed: bool


class MIReport(_Frozen):
    diameters: tuple[float, ...]
    exact: tuple[float, ...]
    asymptotic: tuple[float, ...]
    errors: tuple[float, ...]
    order: Optional[float]
    passed: bool


class IsotropyReport(_Frozen):
    values: tuple[float, ...]
    spread: float
    isotropic: bool


class SweepReport(_Frozen):
    check: str
    instances: int
    violations: int
    worst: float
    passed: bool


# --- nonparametric 1D --------------------------------------------------------


class Anchor(_Frozen):
    x: float
    y: Literal[-1, 1]


class AnchorSet(_Frozen):
    """Labeled 1D points, kept sorted by location."""

    anchors: tuple[Anchor, ...] = Field(min_length=1)

    @field_validator("anchors")
    @classmethod
    def _sorted(cls, value: tuple[Anchor, ...]) -> tuple[Anchor, ...]:
        if not all(math.isfinite(a.x) for a in value):
            raise ValueError("anchor locations must be finite")
        return tuple(sorted(value, key=lambda a: a.x))

    @classmethod
    def from_pairs(cls, pairs: list[tuple[float, int]]) -> AnchorSet:
        return cls(anchors=tuple(Anchor(x=x, y=y) for x, y in pairs))

    def merged(self) -> tuple[FloatArray, FloatArray, FloatArray]:
        """Distinct locations with their counts of +1 and −1 labels."""

        xs = np.asarray([a.x for a in self.anchors])
        ys = np.asarray([a.y for a in self.anchors])
        locations, inverse = np.unique(xs, return_inverse=True)
        positives = np.bincount(inverse, weights=(ys > 0), minlength=locations.shape[0])
        negatives = np.bincount(inverse, weights=(ys < 0), minlength=locations.shape[0])
        return locations, positives, negatives

    def __len__(self) -> int:
        return len(self.anchors)


class Solve1DSummary(_Frozen):
    objective: float
    regularizer: float
    anchor_values: tuple[float, ...]
    locations: tuple[float, ...]
    lam: float = Field(alias="lambda")


# --- HTTP payloads -----------------------------------------------------------


DensityRef = Union[Density, str]


class PredictRequest(_Frozen):
    theta: tuple[float, ...] = Field(min_length=1)
    bias: bool = False
    points: list[list[float]] = Field(min_length=1)


class PredictResponse(_Frozen):
    probabilities: list[float]


class Solve1DRequest(_Frozen):
    density: DensityRef
    anchors: list[Anchor] = Field(min_length=1)
    lam: NonNegativeFloat = Field(default=1.0, alias="lambda")
    grid: int = Field(default=101, ge=2, le=10_000)


class CurvePoint(_Frozen):
    x: float
    f: float


class Solve1DResponse(_Frozen):
    summary: Solve1DSummary
    curve: list[CurvePoint]


class BoundRequest(_Frozen):
    epsilon: float = Field(gt=0.0, lt=1.0)
    delta: float = Field(gt=0.0, lt=1.0)
    gamma: PositiveFloat
    density: DensityRef


class ProfileRequest(_Frozen):
    density: DensityRef
    alphas: Optional[list[PositiveFloat]] = None
    points: int = Field(default=50, ge=2, le=1000)


__all__ = [
    "Anchor",
    "AnchorSet",
    "BoundRequest",
    "BoundResult",
    "ComplexityProfile",
    "ContinuationSchedule",
    "ContinuationStudy",
    "CurvePoint",
    "DensityRef",
    "ExperimentConfig",
    "ExperimentReport",
    "FitConfig",
    "FitResult",
    "IsotropyReport",
    "Lemma3Report",
    "Lemma4Report",
    "MIReport",
    "MethodSummary",
    "ModelFile",
    "OptimizerConfig",
    "PredictRequest",
    "PredictResponse",
    "ProfileRequest",
    "REGULARIZER_ALIASES",
    "RegularizerKind",
    "Solve1DRequest",
    "Solve1DResponse",
    "Solve1DSummary",
    "SweepReport",
    "TheoryQuery",
    "ThetaVector",
    "TracePoint",
    "TrialOutcome",
]
