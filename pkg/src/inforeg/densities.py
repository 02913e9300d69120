"""Marginal densities p(x): analytic families, empirical samples and Gaussian KDEs.

Each variant is a frozen pydantic model tagged by ``kind`` so that a density
round-trips through JSON::

    {"kind": "mixture", "components": [
        {"weight": 0.5, "density": {"kind": "gaussian", "mean": [-3], "variance": 1}},
        {"weight": 0.5, "density": {"kind": "gaussian", "mean": [3], "variance": 1}}]}

The module-level functions (:func:`pdf`, :func:`sample`,
:func:`reciprocal_integral`) are the entry points used by the rest of the
package.
"""

from __future__ import annotations

import logging
import math
import warnings
from pathlib import Path
from typing import Annotated, Any, Literal, Union

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, TypeAdapter
from pydantic import field_validator, model_validator
from scipy import integrate, special, stats

from .errors import DivergentIntegralError, UnsupportedOperationError
from .validation import FloatArray, as_points

logger = logging.getLogger(__name__)

# Unbounded densities are integrated over mean ± 12 standard deviations.
SUPPORT_SIGMAS = 12.0
QUAD_EPSABS = 1e-10
QUAD_EPSREL = 1e-8
QUAD_LIMIT = 200
ZERO_SCAN_POINTS = 2001


def _to_point(value: Any) -> tuple[float, ...]:
    arr = np.atleast_1d(np.asarray(value, dtype=float))
    if arr.ndim != 1:
        raise ValueError("each point must be a scalar or a flat vector")
    return tuple(float(v) for v in arr)


def _to_point_set(value: Any) -> tuple[tuple[float, ...], ...]:
    if isinstance(value, np.ndarray):
        value = value.tolist()
    points = tuple(_to_point(v) for v in value)
    if not points:
        raise ValueError("at least one point is required")
    dims = {len(p) for p in points}
    if len(dims) != 1:
        raise ValueError(f"points have inconsistent dimensions {sorted(dims)}")
    return points


class _DensityBase(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    @property
    def dim(self) -> int:
        raise NotImplementedError

    @property
    def is_analytic(self) -> bool:
        """Whether the variant has a pointwise pdf."""
        return True

    def pdf_values(self, x: ArrayLike) -> FloatArray:
        """Evaluate p at each point of ``x`` (see :func:`inforeg.validation.as_points`)."""
        raise NotImplementedError

    def pdf(self, x: ArrayLike) -> float:
        """Evaluate p at a single point."""
        values = self.pdf_values(x)
        if values.shape[0] != 1:
            raise ValueError(f"pdf expects a single point, got {values.shape[0]}")
        return float(values[0])

    def sample(self, n: int, seed: int) -> FloatArray:
        """Draw ``n`` points as an ``(n, dim)`` array, deterministic in ``seed``."""
        if n < 1:
            raise ValueError(f"n must be >= 1, got {n}")
        return self._sample(n, np.random.default_rng(seed))

    def _sample(self, n: int, rng: np.random.Generator) -> FloatArray:
        raise NotImplementedError

    def cdf(self, x: ArrayLike) -> FloatArray:
        """Cumulative distribution of a one-dimensional density."""
        raise UnsupportedOperationError(f"cdf is not available for {self.kind_name}")

    def effective_support(self) -> tuple[float, float]:
        """Interval carrying all but a negligible fraction of the mass (1D only)."""
        raise UnsupportedOperationError(
            f"effective support is not defined for {self.kind_name}"
        )

    def breakpoints(self) -> tuple[float, ...]:
        """Points where the pdf or its derivative jumps (1D only)."""
        return ()

    def reciprocal_antiderivative(self, x: float) -> float | None:
        """Closed-form antiderivative of 1/p, or ``None`` when unavailable."""
        return None

    @property
    def kind_name(self) -> str:
        return str(getattr(self, "kind", type(self).__name__))


class Uniform1D(_DensityBase):
    """Uniform density on the closed interval ``[lo, hi]``."""

    kind: Literal["uniform"] = "uniform"
    lo: float
    hi: float

    @model_validator(mode="after")
    def _check_bounds(self) -> Uniform1D:
        if not self.lo < self.hi:
            raise ValueError(f"uniform requires lo < hi, got [{self.lo}, {self.hi}]")
        return self

    @property
    def dim(self) -> int:
        return 1

    @property
    def height(self) -> float:
        return 1.0 / (self.hi - self.lo)

    def pdf_values(self, x: ArrayLike) -> FloatArray:
        pts = as_points(x, 1)[:, 0]
        inside = (pts >= self.lo) & (pts <= self.hi)
        return np.where(inside, self.height, 0.0)

    def _sample(self, n: int, rng: np.random.Generator) -> FloatArray:
        return rng.uniform(self.lo, self.hi, size=(n, 1))

    def cdf(self, x: ArrayLike) -> FloatArray:
        pts = as_points(x, 1)[:, 0]
        return np.clip((pts - self.lo) * self.height, 0.0, 1.0)

    def effective_support(self) -> tuple[float, float]:
        return (self.lo, self.hi)

    def breakpoints(self) -> tuple[float, ...]:
        return (self.lo, self.hi)

    def reciprocal_antiderivative(self, x: float) -> float | None:
        return (x - self.lo) * (self.hi - self.lo)


class Gaussian(_DensityBase):
    """Isotropic Gaussian N(mean, variance·I)."""

    kind: Literal["gaussian"] = "gaussian"
    mean: tuple[float, ...]
    variance: PositiveFloat

    @field_validator("mean", mode="before")
    @classmethod
    def _coerce_mean(cls, value: Any) -> tuple[float, ...]:
        return _to_point(value)

    @property
    def dim(self) -> int:
        return len(self.mean)

    @property
    def sd(self) -> float:
        return math.sqrt(self.variance)

    def pdf_values(self, x: ArrayLike) -> FloatArray:
        pts = as_points(x, self.dim)
        logpdf = stats.norm.logpdf(pts, loc=np.asarray(self.mean), scale=self.sd)
        return np.exp(logpdf.sum(axis=1))

    def _sample(self, n: int, rng: np.random.Generator) -> FloatArray:
        return rng.normal(np.asarray(self.mean), self.sd, size=(n, self.dim))

    def cdf(self, x: ArrayLike) -> FloatArray:
        _require_1d(self, "cdf")
        pts = as_points(x, 1)[:, 0]
        return np.asarray(stats.norm.cdf(pts, loc=self.mean[0], scale=self.sd))

    def effective_support(self) -> tuple[float, float]:
        _require_1d(self, "effective support")
        half = SUPPORT_SIGMAS * self.sd
        return (self.mean[0] - half, self.mean[0] + half)

    def reciprocal_antiderivative(self, x: float) -> float | None:
        if self.dim != 1:
            return None
        u = (x - self.mean[0]) / (self.sd * math.sqrt(2.0))
        return float(math.pi * self.variance * special.erfi(u))


class Laplace1D(_DensityBase):
    """Laplace density with the given location and scale b (variance 2b²)."""

    kind: Literal["laplace"] = "laplace"
    location: float = 0.0
    scale: PositiveFloat = 1.0

    @property
    def dim(self) -> int:
        return 1

    def pdf_values(self, x: ArrayLike) -> FloatArray:
        pts = as_points(x, 1)[:, 0]
        return np.asarray(stats.laplace.pdf(pts, loc=self.location, scale=self.scale))

    def _sample(self, n: int, rng: np.random.Generator) -> FloatArray:
        return rng.laplace(self.location, self.scale, size=(n, 1))

    def cdf(self, x: ArrayLike) -> FloatArray:
        pts = as_points(x, 1)[:, 0]
        return np.asarray(stats.laplace.cdf(pts, loc=self.location, scale=self.scale))

    def effective_support(self) -> tuple[float, float]:
        half = SUPPORT_SIGMAS * math.sqrt(2.0) * self.scale
        return (self.location - half, self.location + half)

    def breakpoints(self) -> tuple[float, ...]:
        return (self.location,)

    def reciprocal_antiderivative(self, x: float) -> float | None:
        b = self.scale
        offset = x - self.location
        return math.copysign(2.0 * b * b * math.expm1(abs(offset) / b), offset)


class MixtureComponent(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    weight: float = Field(ge=0.0, le=1.0)
    density: Density


class Mixture(_DensityBase):
    """Finite mixture Σ_k w_k p_k(x)."""

    kind: Literal["mixture"] = "mixture"
    components: tuple[MixtureComponent, ...] = Field(min_length=1)

    @model_validator(mode="after")
    def _check_components(self) -> Mixture:
        total = math.fsum(c.weight for c in self.components)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"mixture weights must sum to 1, got {total!r}")
        dims = {c.density.dim for c in self.components}
        if len(dims) != 1:
            raise ValueError(f"mixture components have different dimensions {sorted(dims)}")
        return self

    @property
    def dim(self) -> int:
        return self.components[0].density.dim

    @property
    def is_analytic(self) -> bool:
        return all(c.density.is_analytic for c in self.components)

    @property
    def weights(self) -> FloatArray:
        return np.asarray([c.weight for c in self.components], dtype=float)

    def pdf_values(self, x: ArrayLike) -> FloatArray:
        pts = as_points(x, self.dim)
        total = np.zeros(pts.shape[0])
        for component in self.components:
            total += component.weight * component.density.pdf_values(pts)
        return total

    def _sample(self, n: int, rng: np.random.Generator) -> FloatArray:
        # The generator passed in only seeds the per-component streams.
        streams = np.random.SeedSequence(int(rng.integers(0, 2**62))).spawn(
            len(self.components) + 1
        )
        choose = np.random.default_rng(streams[0])
        cumulative = np.cumsum(self.weights)
        picks = np.searchsorted(cumulative, choose.random(n), side="right")
        picks = np.minimum(picks, len(self.components) - 1)
        out = np.empty((n, self.dim))
        for k, component in enumerate(self.components):
            mask = picks == k
            count = int(mask.sum())
            if count:
                child_seed = int(streams[k + 1].generate_state(1)[0])
                out[mask] = component.density.sample(count, child_seed)
        return out

    def cdf(self, x: ArrayLike) -> FloatArray:
        pts = as_points(x, 1)
        return sum(
            (c.weight * c.density.cdf(pts) for c in self.components),
            start=np.zeros(pts.shape[0]),
        )

    def effective_support(self) -> tuple[float, float]:
        spans = [c.density.effective_support() for c in self.components]
        return (min(s[0] for s in spans), max(s[1] for s in spans))

    def breakpoints(self) -> tuple[float, ...]:
        points = {p for c in self.components for p in c.density.breakpoints()}
        return tuple(sorted(points))


class Empirical(_DensityBase):
    """A bare sample {x'_j}; it has no pointwise pdf and cannot be resampled."""

    kind: Literal["empirical"] = "empirical"
    points: tuple[tuple[float, ...], ...]

    @field_validator("points", mode="before")
    @classmethod
    def _coerce_points(cls, value: Any) -> tuple[tuple[float, ...], ...]:
        return _to_point_set(value)

    @property
    def dim(self) -> int:
        return len(self.points[0])

    @property
    def is_analytic(self) -> bool:
        return False

    def as_array(self) -> FloatArray:
        return np.asarray(self.points, dtype=float)

    def pdf_values(self, x: ArrayLike) -> FloatArray:
        raise UnsupportedOperationError(
            "an empirical density has no pointwise pdf; use a kde density instead"
        )

    def _sample(self, n: int, rng: np.random.Generator) -> FloatArray:
        raise UnsupportedOperationError("sampling is not supported for empirical densities")

    def effective_support(self) -> tuple[float, float]:
        _require_1d(self, "effective support")
        arr = self.as_array()[:, 0]
        return (float(arr.min()), float(arr.max()))


class GaussianKDE(_DensityBase):
    """Kernel estimate (1/m) Σ_j N(x; x'_j, τI) with bandwidth τ as a variance.

    Centers are stored sorted lexicographically, so the summation order (and
    hence every pdf value) does not depend on the order they were given in.
    """

    kind: Literal["kde"] = "kde"
    centers: tuple[tuple[float, ...], ...]
    bandwidth: PositiveFloat

    @field_validator("centers", mode="before")
    @classmethod
    def _coerce_centers(cls, value: Any) -> tuple[tuple[float, ...], ...]:
        return tuple(sorted(_to_point_set(value)))

    @property
    def dim(self) -> int:
        return len(self.centers[0])

    @property
    def sd(self) -> float:
        return math.sqrt(self.bandwidth)

    def as_array(self) -> FloatArray:
        return np.asarray(self.centers, dtype=float)

    def pdf_values(self, x: ArrayLike) -> FloatArray:
        pts = as_points(x, self.dim)
        centers = self.as_array()
        logk = stats.norm.logpdf(pts[:, None, :], loc=centers[None, :, :], scale=self.sd)
        return np.exp(logk.sum(axis=2)).mean(axis=1)

    def _sample(self, n: int, rng: np.random.Generator) -> FloatArray:
        centers = self.as_array()
        picks = rng.integers(0, centers.shape[0], size=n)
        return centers[picks] + rng.normal(0.0, self.sd, size=(n, self.dim))

    def cdf(self, x: ArrayLike) -> FloatArray:
        _require_1d(self, "cdf")
        pts = as_points(x, 1)[:, 0]
        centers = self.as_array()[:, 0]
        return np.asarray(
            stats.norm.cdf(pts[:, None], loc=centers[None, :], scale=self.sd).mean(axis=1)
        )

    def effective_support(self) -> tuple[float, float]:
        _require_1d(self, "effective support")
        centers = self.as_array()[:, 0]
        half = SUPPORT_SIGMAS * self.sd
        return (float(centers.min()) - half, float(centers.max()) + half)


Density = Annotated[
    Union[Uniform1D, Gaussian, Laplace1D, Mixture, Empirical, GaussianKDE],
    Field(discriminator="kind"),
]
MixtureComponent.model_rebuild()
Mixture.model_rebuild()

DensityAdapter: TypeAdapter[Density] = TypeAdapter(Density)


def parse_density(data: Any) -> Density:
    """Validate a density from a decoded JSON object (or pass a density through)."""

    if isinstance(data, _DensityBase):
        return data  # type: ignore[return-value]
    return DensityAdapter.validate_python(data)


def load_density(path: Path) -> Density:
    """Read a density JSON file."""

    logger.debug("Loading density from %s", path)
    return DensityAdapter.validate_json(path.read_text(encoding="utf-8"))


def dump_density(density: Density) -> dict[str, Any]:
    return DensityAdapter.dump_python(density, mode="json")  # type: ignore[no-any-return]


def _require_1d(density: _DensityBase, operation: str) -> None:
    if density.dim != 1:
        raise UnsupportedOperationError(
            f"{operation} requires a one-dimensional density, got dimension {density.dim}"
        )


def require_1d_analytic(density: _DensityBase, operation: str) -> None:
    """Raise unless ``density`` is one-dimensional with a pointwise pdf."""

    _require_1d(density, operation)
    if not density.is_analytic:
        raise UnsupportedOperationError(
            f"{operation} requires a density with a pointwise pdf, got {density.kind_name}"
        )


def pdf(density: _DensityBase, x: ArrayLike) -> float:
    """Return p(x) at a single point."""

    return density.pdf(x)


def sample(density: _DensityBase, n: int, seed: int) -> FloatArray:
    """Draw ``n`` points from ``density``; identical seeds give identical draws."""

    return density.sample(n, seed)


def effective_support(density: _DensityBase) -> tuple[float, float]:
    return density.effective_support()


def _interior_breakpoints(density: _DensityBase, a: float, b: float) -> list[float]:
    return [p for p in density.breakpoints() if a < p < b]


def first_zero(
    density: _DensityBase, a: float, b: float, grid: int = ZERO_SCAN_POINTS
) -> float | None:
    """Return the first point of ``[a, b]`` where p vanishes, or ``None``.

    A uniform scan (plus breakpoints and the midpoints between neighbouring
    scan points) finds the first zero sample; bisection then narrows the
    boundary between the last positive and the first zero sample. The
    midpoints catch zero gaps between two breakpoints closer together than
    the scan spacing.
    """

    xs = np.union1d(np.linspace(a, b, grid), _interior_breakpoints(density, a, b))
    xs = np.union1d(xs, 0.5 * (xs[1:] + xs[:-1]))
    values = density.pdf_values(xs)
    zero = np.flatnonzero(values <= 0.0)
    if zero.size == 0:
        return None
    i = int(zero[0])
    if i == 0:
        return a
    lo, hi = float(xs[i - 1]), float(xs[i])
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if density.pdf(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return hi


def _reciprocal_pdf(density: _DensityBase, t: float) -> float:
    p = density.pdf(t)
    return 1.0 / p if p > 0.0 else math.inf


def reciprocal_integral(density: _DensityBase, a: float, b: float) -> float:
    """Return ∫_a^b dx / p(x) for a one-dimensional analytic density.

    Uses the density's closed-form antiderivative of 1/p when it has one and
    adaptive Gauss–Kronrod quadrature (QUADPACK) otherwise.

    Raises:
        DivergentIntegralError: p reaches zero on [a, b].
        UnsupportedOperationError: the density is not 1D or has no pdf.
    """

    require_1d_analytic(density, "reciprocal_integral")
    if not a < b:
        raise ValueError(f"reciprocal_integral requires a < b, got a={a}, b={b}")

    zero = first_zero(density, a, b)
    if zero is not None:
        raise DivergentIntegralError(a, b, zero)

    fa = density.reciprocal_antiderivative(a)
    fb = density.reciprocal_antiderivative(b)
    if fa is not None and fb is not None:
        value = fb - fa
    else:
        points = _interior_breakpoints(density, a, b) or None
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", integrate.IntegrationWarning)
            value, abserr = integrate.quad(
                lambda t: _reciprocal_pdf(density, t),
                a,
                b,
                epsabs=QUAD_EPSABS,
                epsrel=QUAD_EPSREL,
                limit=QUAD_LIMIT,
                points=points,
            )
        for warning in caught:
            logger.warning(
                "Quadrature of 1/p on [%g, %g] reported: %s (abs err %.3g)",
                a,
                b,
                warning.message,
                abserr,
            )

    if not math.isfinite(value) or value <= 0.0:
        raise DivergentIntegralError(a, b)
    return float(value)


def total_mass(density: _DensityBase) -> float:
    """Integrate p over its effective support (should be 1 within 1e-6)."""

    require_1d_analytic(density, "total_mass")
    lo, hi = density.effective_support()
    points = _interior_breakpoints(density, lo, hi) or None
    value, _ = integrate.quad(
        lambda t: density.pdf(t), lo, hi, epsabs=1e-12, epsrel=1e-10, limit=500, points=points
    )
    return float(value)


__all__ = [
    "Density",
    "DensityAdapter",
    "Empirical",
    "Gaussian",
    "GaussianKDE",
    "Laplace1D",
    "Mixture",
    "MixtureComponent",
    "Uniform1D",
    "dump_density",
    "effective_support",
    "first_zero",
    "load_density",
    "parse_density",
    "pdf",
    "reciprocal_integral",
    "require_1d_analytic",
    "sample",
    "total_mass",
]
