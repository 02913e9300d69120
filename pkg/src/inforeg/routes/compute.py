"""Numerical endpoints: prediction, the 1D solver and the theory calculators.

Handlers are plain ``def`` so FastAPI runs the CPU-bound work in its thread pool.
"""

from __future__ import annotations

import logging

from fastapi import APIRouter, Depends

from ..densities import Density
from ..logistic import predict_proba
from ..models import (
    AnchorSet,
    BoundRequest,
    BoundResult,
    ComplexityProfile,
    CurvePoint,
    DensityRef,
    PredictRequest,
    PredictResponse,
    ProfileRequest,
    Solve1DRequest,
    Solve1DResponse,
    ThetaVector,
    TheoryQuery,
)
from ..nonparam1d import solve1d
from ..services.presets import PresetRegistry
from ..theory import complexity_profile, sample_bound
from .meta import preset_registry_dependency

logger = logging.getLogger(__name__)

router = APIRouter(tags=["compute"])


def _density(ref: DensityRef, presets: PresetRegistry) -> Density:
    return presets.resolve(ref)


@router.post("/predict", response_model=PredictResponse)
def predict(payload: PredictRequest) -> PredictResponse:
    """p(y=+1|x) for each point under the given weights."""

    theta = ThetaVector(weights=payload.theta, bias=payload.bias)
    probabilities = predict_proba(theta, payload.points)
    logger.info("Predicted %d points", len(payload.points))
    return PredictResponse(probabilities=[float(p) for p in probabilities])


@router.post("/solve1d", response_model=Solve1DResponse)
def solve_1d(
    payload: Solve1DRequest,
    presets: PresetRegistry = Depends(preset_registry_dependency),
) -> Solve1DResponse:
    """Fit the anchor values and return the minimal-information curve between them."""

    density = _density(payload.density, presets)
    anchors = AnchorSet(anchors=tuple(payload.anchors))
    _, summary, curve = solve1d(anchors, density, payload.lam, payload.grid)
    logger.info(
        "Solved 1D problem with %d anchors: objective %.6g", len(anchors), summary.objective
    )
    return Solve1DResponse(
        summary=summary, curve=[CurvePoint(x=x, f=f) for x, f in curve]
    )


@router.post("/theory/bound", response_model=BoundResult)
def theory_bound(
    payload: BoundRequest,
    presets: PresetRegistry = Depends(preset_registry_dependency),
) -> BoundResult:
    """Labeled-sample bound for accuracy ε and confidence δ."""

    query = TheoryQuery(
        epsilon=payload.epsilon,
        delta=payload.delta,
        gamma=payload.gamma,
        density=_density(payload.density, presets),
    )
    return sample_bound(query)


@router.post("/theory/profile", response_model=ComplexityProfile)
def theory_profile(
    payload: ProfileRequest,
    presets: PresetRegistry = Depends(preset_registry_dependency),
) -> ComplexityProfile:
    """m_p and c_p over an α grid."""

    density = _density(payload.density, presets)
    return complexity_profile(density, payload.alphas, payload.points)


__all__ = ["router"]
