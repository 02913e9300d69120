"""Complexity measures of a 1D marginal and numeric checks of the information bounds.

``m_p(α)`` is the mass where the density is at most α and ``c_p(α)`` counts the
maximal intervals where it exceeds α. Both come from one sign-change scan of
p − α over the effective support, refined with Brent's method.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Optional, Protocol, runtime_checkable

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, model_validator
from scipy import integrate, interpolate, optimize, special

from .datasets import LabeledDataset
from .densities import (
    Density,
    Gaussian,
    Laplace1D,
    Mixture,
    MixtureComponent,
    Uniform1D,
    reciprocal_integral,
    require_1d_analytic,
)
from .errors import EmptySuperlevelSetError, NumericalError
from .models import (
    BoundResult,
    ComplexityProfile,
    IsotropyReport,
    Lemma3Report,
    Lemma4Report,
    MIReport,
    SweepReport,
    TheoryQuery,
)
from .validation import FloatArray, as_points

logger = logging.getLogger(__name__)

LEVEL_GRID_POINTS = 10_000
ROOT_XTOL = 1e-10
BISECTION_RTOL = 1e-12
MARGIN_TOL = 1e-9
MIN_MI_ORDER = 2.5
ISOTROPY_TOL = 1e-12
UNIT_TOL = 1e-9
QUAD_OPTS: dict[str, Any] = {"epsabs": 1e-14, "epsrel": 1e-12, "limit": 400}
NQUAD_OPTS: dict[str, Any] = {"epsabs": 1e-13, "epsrel": 1e-10, "limit": 100}


# --- level sets ---------------------------------------------------------------


def _level_grid(density: Density) -> FloatArray:
    lo, hi = density.effective_support()
    inner = [p for p in density.breakpoints() if lo < p < hi]
    return np.union1d(np.linspace(lo, hi, LEVEL_GRID_POINTS), inner)


def _crossing(density: Density, alpha: float, a: float, b: float) -> float:
    return float(
        optimize.brentq(lambda t: density.pdf(t) - alpha, a, b, xtol=ROOT_XTOL)
    )


def superlevel_intervals(density: Density, alpha: float) -> list[tuple[float, float]]:
    """Maximal intervals where p(x) > α, inside the effective support."""

    require_1d_analytic(density, "superlevel_intervals")
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    xs = _level_grid(density)
    above = density.pdf_values(xs) > alpha

    intervals: list[tuple[float, float]] = []
    start: float | None = float(xs[0]) if above[0] else None
    for i in np.flatnonzero(above[1:] != above[:-1]):
        edge = _crossing(density, alpha, float(xs[i]), float(xs[i + 1]))
        if above[i + 1]:
            start = edge
        else:
            assert start is not None
            intervals.append((start, edge))
            start = None
    if start is not None:
        intervals.append((start, float(xs[-1])))
    return intervals


def m_p(density: Density, alpha: float) -> float:
    """Probability mass of {x : p(x) ≤ α}."""

    intervals = superlevel_intervals(density, alpha)
    if not intervals:
        return 1.0
    ends = np.asarray(intervals)
    cdf_lo = density.cdf(ends[:, 0])
    cdf_hi = density.cdf(ends[:, 1])
    inside = math.fsum(cdf_hi - cdf_lo)
    return min(max(1.0 - inside, 0.0), 1.0)


def c_p(density: Density, alpha: float) -> int:
    """Number of maximal intervals where p(x) > α.

    Raises:
        EmptySuperlevelSetError: α is at or above the maximum of p.
    """

    count = len(superlevel_intervals(density, alpha))
    if count == 0:
        raise EmptySuperlevelSetError(f"p never exceeds alpha={alpha:.6g}")
    return count


def max_pdf(density: Density) -> float:
    """Maximum of p: grid argmax refined by bounded scalar minimization."""

    require_1d_analytic(density, "max_pdf")
    xs = _level_grid(density)
    values = density.pdf_values(xs)
    i = int(np.argmax(values))
    best = float(values[i])
    lo, hi = float(xs[max(i - 1, 0)]), float(xs[min(i + 1, xs.shape[0] - 1)])
    if hi > lo:
        res = optimize.minimize_scalar(
            lambda t: -density.pdf(t), bounds=(lo, hi), method="bounded",
            options={"xatol": 1e-12},
        )
        best = max(best, -float(res.fun))
    return best


def m_p_inverse(density: Density, t: float) -> float:
    """sup{α : m_p(α) ≤ t} by bisection on [0, max p].

    Returns the upper end of the final bracket, so densities whose m_p jumps
    (uniform) get the level of the jump.
    """

    if not 0.0 < t < 1.0:
        raise ValueError(f"t must lie in (0, 1), got {t}")
    pmax = max_pdf(density)
    lo, hi = 0.0, pmax
    while hi - lo > BISECTION_RTOL * pmax:
        mid = 0.5 * (lo + hi)
        if m_p(density, mid) <= t:
            lo = mid
        else:
            hi = mid
    if hi <= BISECTION_RTOL * pmax:
        raise NumericalError(f"m_p exceeds {t:.6g} at every positive level")
    return hi


def complexity_profile(
    density: Density,
    alphas: Optional[Sequence[float]] = None,
    points: int = 50,
) -> ComplexityProfile:
    """m_p and c_p over an α grid (default: ``points`` levels from 1% to 99% of max p)."""

    pmax = max_pdf(density)
    if alphas is None:
        grid = np.linspace(pmax / 100.0, 0.99 * pmax, points)
    else:
        grid = np.asarray(alphas, dtype=float)
    if grid.size and float(grid.max()) >= pmax:
        raise EmptySuperlevelSetError(
            f"alpha {float(grid.max()):.6g} is not below max pdf {pmax:.6g}"
        )
    m_values: list[float] = []
    c_values: list[int] = []
    for alpha in grid:
        intervals = superlevel_intervals(density, float(alpha))
        if not intervals:
            raise EmptySuperlevelSetError(f"p never exceeds alpha={alpha:.6g}")
        ends = np.asarray(intervals)
        inside = math.fsum(density.cdf(ends[:, 1]) - density.cdf(ends[:, 0]))
        m_values.append(min(max(1.0 - inside, 0.0), 1.0))
        c_values.append(len(intervals))
    logger.debug("Complexity profile over %d levels (max pdf %.6g)", grid.size, pmax)
    return ComplexityProfile(
        alphas=tuple(float(a) for a in grid),
        m_values=tuple(m_values),
        c_values=tuple(c_values),
        max_pdf=pmax,
    )


def mass_slope(profile: ComplexityProfile) -> float:
    """Smallest K with m_p(α) ≤ Kα on the profiled levels."""

    return max(m / a for m, a in zip(profile.m_values, profile.alphas))


def sample_bound(query: TheoryQuery) -> BoundResult:
    """Labeled-sample size ε⁻⁴ ln(1/ε) [ln(1/δ) + c_p(α) + γ/α²], α = m_p⁻¹(ε²).

    The leading constant is taken as 1.
    """

    eps, delta, gamma = query.epsilon, query.delta, query.gamma
    alpha = m_p_inverse(query.density, eps * eps)
    pmax = max_pdf(query.density)
    count = c_p(query.density, min(alpha, pmax * (1.0 - 1e-9)))
    raw = eps**-4 * math.log(1.0 / eps) * (math.log(1.0 / delta) + count + gamma / alpha**2)
    result = BoundResult(
        epsilon=eps,
        delta=delta,
        gamma=gamma,
        m_p_inverse=alpha,
        c_p=count,
        raw=raw,
        bound=math.ceil(raw),
    )
    logger.info(
        "Sample bound %d (m_p^-1=%.6g, c_p=%d) for eps=%g delta=%g gamma=%g",
        result.bound, alpha, count, eps, delta, gamma,
    )
    return result


# --- smooth conditionals --------------------------------------------------------


@runtime_checkable
class SmoothConditional(Protocol):
    """p(y=1|x) on the real line with its derivative."""

    def value(self, x: ArrayLike) -> FloatArray: ...

    def derivative(self, x: ArrayLike) -> FloatArray: ...


def _flat(x: ArrayLike) -> FloatArray:
    return np.atleast_1d(np.asarray(x, dtype=float)).ravel()


@dataclass(frozen=True)
class ConstantConditional:
    level: float = 0.5

    def __post_init__(self) -> None:
        if not 0.0 <= self.level <= 1.0:
            raise ValueError(f"level must lie in [0, 1], got {self.level}")

    def value(self, x: ArrayLike) -> FloatArray:
        return np.full(_flat(x).shape, self.level)

    def derivative(self, x: ArrayLike) -> FloatArray:
        return np.zeros(_flat(x).shape)

    def gradient(self, x: ArrayLike, dim: int = 1) -> FloatArray:
        return np.zeros(as_points(x, dim).shape)


@dataclass(frozen=True)
class LogisticConditional:
    """σ(wᵀx + b); one weight for the line, more for regions in higher dimension."""

    weights: tuple[float, ...]
    offset: float = 0.0

    @property
    def dim(self) -> int:
        return len(self.weights)

    def _margin(self, x: ArrayLike) -> FloatArray:
        return np.asarray(as_points(x, self.dim) @ np.asarray(self.weights) + self.offset)

    def value(self, x: ArrayLike) -> FloatArray:
        return np.asarray(special.expit(self._margin(x)))

    def derivative(self, x: ArrayLike) -> FloatArray:
        if self.dim != 1:
            raise ValueError("derivative is only defined for one weight; use gradient")
        f = self.value(x)
        return f * (1.0 - f) * self.weights[0]

    def gradient(self, x: ArrayLike, dim: int | None = None) -> FloatArray:
        f = self.value(x)
        return np.outer(f * (1.0 - f), np.asarray(self.weights))


@dataclass(frozen=True)
class SplineConditional:
    """Cubic spline through logit(values) at the knots, constant beyond them."""

    knots: tuple[float, ...]
    values: tuple[float, ...]
    _spline: interpolate.CubicSpline = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.knots) < 2 or len(self.knots) != len(self.values):
            raise ValueError("need at least two knots with one value each")
        if any(b <= a for a, b in zip(self.knots, self.knots[1:])):
            raise ValueError("knots must be strictly increasing")
        if not all(0.0 < v < 1.0 for v in self.values):
            raise ValueError("spline values must lie strictly inside (0, 1)")
        spline = interpolate.CubicSpline(
            self.knots, special.logit(np.asarray(self.values)), bc_type="natural"
        )
        object.__setattr__(self, "_spline", spline)

    @classmethod
    def random(
        cls,
        rng: np.random.Generator,
        lo: float,
        hi: float,
        knots: int = 6,
        low: float = 0.05,
        high: float = 0.95,
    ) -> SplineConditional:
        xs = np.linspace(lo, hi, knots)
        values = rng.uniform(low, high, knots)
        return cls(tuple(float(x) for x in xs), tuple(float(v) for v in values))

    def _clip(self, x: ArrayLike) -> FloatArray:
        return np.clip(_flat(x), self.knots[0], self.knots[-1])

    def value(self, x: ArrayLike) -> FloatArray:
        return np.asarray(special.expit(self._spline(self._clip(x))))

    def derivative(self, x: ArrayLike) -> FloatArray:
        pts = _flat(x)
        f = self.value(pts)
        inside = (pts >= self.knots[0]) & (pts <= self.knots[-1])
        slope = self._spline(self._clip(pts), 1)
        return np.where(inside, f * (1.0 - f) * slope, 0.0)

    def gradient(self, x: ArrayLike, dim: int = 1) -> FloatArray:
        return self.derivative(as_points(x, 1)[:, 0])[:, None]


@dataclass(frozen=True)
class FunctionConditional:
    """Wraps a scalar function; the derivative falls back to central differences."""

    func: Callable[[float], float]
    deriv: Optional[Callable[[float], float]] = None
    step: float = 1e-6

    def value(self, x: ArrayLike) -> FloatArray:
        return np.asarray([float(self.func(float(t))) for t in _flat(x)])

    def derivative(self, x: ArrayLike) -> FloatArray:
        pts = _flat(x)
        if self.deriv is not None:
            return np.asarray([float(self.deriv(float(t))) for t in pts])
        h = self.step
        return (self.value(pts + h) - self.value(pts - h)) / (2.0 * h)

    def gradient(self, x: ArrayLike, dim: int = 1) -> FloatArray:
        return self.derivative(as_points(x, 1)[:, 0])[:, None]


def _quad(func: Callable[[float], float], a: float, b: float, points: Sequence[float]) -> float:
    inner = sorted({p for p in points if a < p < b})
    value, _ = integrate.quad(func, a, b, points=inner or None, **QUAD_OPTS)
    return float(value)


def _check_open_unit(values: FloatArray, what: str) -> None:
    if np.any(values <= 0.0) or np.any(values >= 1.0):
        raise ValueError(f"{what} must stay strictly inside (0, 1)")


# --- inequality checks -----------------------------------------------------------


def lemma3_check(
    conditional: SmoothConditional, density: Density, x1: float, x2: float
) -> Lemma3Report:
    """Compare ∫ p h'²/(h(1−h)) over [x1, x2] with 4(h(x2) − h(x1))² / ∫ dx/p.

    Raises:
        DivergentIntegralError: p vanishes on [x1, x2].
    """

    if not x1 < x2:
        raise ValueError(f"need x1 < x2, got {x1}, {x2}")
    recint = reciprocal_integral(density, x1, x2)
    _check_open_unit(conditional.value(np.linspace(x1, x2, 101)), "conditional")

    def integrand(t: float) -> float:
        h = float(conditional.value(t)[0])
        dh = float(conditional.derivative(t)[0])
        return density.pdf(t) * dh * dh / (h * (1.0 - h))

    lhs = _quad(integrand, x1, x2, density.breakpoints())
    ends = conditional.value([x1, x2])
    rhs = 4.0 * float(ends[1] - ends[0]) ** 2 / recint
    margin = lhs - rhs
    return Lemma3Report(
        x1=x1, x2=x2, lhs=lhs, rhs=rhs, margin=margin, passed=margin >= -MARGIN_TOL
    )


def _square_loss(h: FloatArray, y: FloatArray) -> FloatArray:
    return np.where(y > 0, (1.0 - h) ** 2, h**2)


def lemma4_check(
    h1: SmoothConditional,
    h2: SmoothConditional,
    density: Density,
    sample: LabeledDataset,
    truth: SmoothConditional | None = None,
) -> Lemma4Report:
    """Bound the square-loss gap by twice the L2 distance between conditionals.

    The expected side integrates against p and the true conditional ``truth``
    (constant 1/2 by default); the empirical side averages over ``sample``.
    """

    require_1d_analytic(density, "lemma4_check")
    if sample.dim != 1:
        raise ValueError(f"sample must be one-dimensional, got dimension {sample.dim}")
    sample.require_nonempty()
    truth = truth or ConstantConditional(0.5)
    lo, hi = density.effective_support()
    breaks = density.breakpoints()

    def loss_gap(t: float) -> float:
        a, b, q = float(h1.value(t)[0]), float(h2.value(t)[0]), float(truth.value(t)[0])
        gap = q * ((1.0 - a) ** 2 - (1.0 - b) ** 2) + (1.0 - q) * (a * a - b * b)
        return density.pdf(t) * gap

    def squared_distance(t: float) -> float:
        diff = float(h1.value(t)[0]) - float(h2.value(t)[0])
        return density.pdf(t) * diff * diff

    expected_lhs = abs(_quad(loss_gap, lo, hi, breaks))
    expected_rhs = 2.0 * math.sqrt(max(_quad(squared_distance, lo, hi, breaks), 0.0))

    xs = sample.x[:, 0]
    a, b = h1.value(xs), h2.value(xs)
    empirical_lhs = abs(float(np.mean(_square_loss(a, sample.y) - _square_loss(b, sample.y))))
    empirical_rhs = 2.0 * math.sqrt(float(np.mean((a - b) ** 2)))

    expected_slack = expected_rhs - expected_lhs
    empirical_slack = empirical_rhs - empirical_lhs
    return Lemma4Report(
        expected_lhs=expected_lhs,
        expected_rhs=expected_rhs,
        expected_slack=expected_slack,
        empirical_lhs=empirical_lhs,
        empirical_rhs=empirical_rhs,
        empirical_slack=empirical_slack,
        passed=min(expected_slack, empirical_slack) >= -MARGIN_TOL,
    )


class RegionSpec(BaseModel):
    """A box Q = center ± half_width, a density restricted to it and a conditional."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    center: tuple[float, ...] = Field(min_length=1)
    half_width: PositiveFloat
    conditional: Any
    density: Density

    @model_validator(mode="after")
    def _check(self) -> RegionSpec:
        if self.density.dim != len(self.center):
            raise ValueError(
                f"density has dimension {self.density.dim}, center has {len(self.center)}"
            )
        if not self.density.is_analytic:
            raise ValueError("the region density needs a pointwise pdf")
        if not hasattr(self.conditional, "value") or not hasattr(self.conditional, "gradient"):
            raise ValueError("the conditional must provide value() and gradient()")
        return self

    @property
    def dim(self) -> int:
        return len(self.center)

    def bounds(self, half_width: float) -> list[tuple[float, float]]:
        return [(c - half_width, c + half_width) for c in self.center]

    def values(self, x: ArrayLike) -> FloatArray:
        pts = as_points(x, self.dim)
        if self.dim == 1:
            return np.asarray(self.conditional.value(pts[:, 0]))
        return np.asarray(self.conditional.value(pts))


def _box_integral(
    func: Callable[[FloatArray], float], bounds: list[tuple[float, float]]
) -> float:
    if len(bounds) == 1:
        a, b = bounds[0]
        value, _ = integrate.quad(lambda t: func(np.asarray([t])), a, b, **QUAD_OPTS)
    else:
        value, _ = integrate.nquad(
            lambda *xs: func(np.asarray(xs)), bounds, opts=NQUAD_OPTS
        )
    return float(value)


def _region_information(region: RegionSpec, half_width: float) -> tuple[float, float]:
    """Exact mutual information between x ~ p_Q and y, and its quadratic approximation."""

    bounds = region.bounds(half_width)
    density = region.density
    d = region.dim

    def p(x: FloatArray) -> float:
        return density.pdf(x.reshape(1, d))

    def f(x: FloatArray) -> float:
        return float(region.values(x.reshape(1, d))[0])

    mass = _box_integral(p, bounds)
    mean = np.asarray(
        [_box_integral(lambda x, i=i: p(x) * x[i], bounds) / mass for i in range(d)]
    )
    cov = np.empty((d, d))
    for i in range(d):
        for j in range(i, d):
            moment = _box_integral(
                lambda x, i=i, j=j: p(x) * (x[i] - mean[i]) * (x[j] - mean[j]), bounds
            )
            cov[i, j] = cov[j, i] = moment / mass
    f_bar = _box_integral(lambda x: p(x) * f(x), bounds) / mass

    def divergence(x: FloatArray) -> float:
        fx = f(x)
        return p(x) * float(special.kl_div(fx, f_bar) + special.kl_div(1.0 - fx, 1.0 - f_bar))

    exact = _box_integral(divergence, bounds) / mass

    x0 = np.asarray(region.center).reshape(1, d)
    f0 = f(x0[0])
    grad = np.asarray(region.conditional.gradient(x0[:, 0] if d == 1 else x0)).reshape(d)
    fisher = np.outer(grad, grad) / (f0 * (1.0 - f0))
    asymptotic = 0.5 * float(np.trace(cov @ fisher))
    return exact, asymptotic


def mi_region_check(
    region: RegionSpec, diameters: Optional[Sequence[float]] = None
) -> MIReport:
    """Exact regional mutual information against ½ Tr[cov_Q F(x₀)] as Q shrinks.

    The order is the least-squares log–log slope of the errors over the last
    three diameters; it must reach 2.5 unless the errors vanish altogether.
    """

    if diameters is None:
        diameters = [2.0 * region.half_width / 2**k for k in range(4)]
    ds = [float(d) for d in diameters]
    if not ds or any(d <= 0 for d in ds) or any(b >= a for a, b in zip(ds, ds[1:])):
        raise ValueError("diameters must be positive and strictly decreasing")
    if ds[0] > 2.0 * region.half_width * (1.0 + 1e-12):
        raise ValueError("largest diameter exceeds the region")

    grid = np.stack(
        np.meshgrid(*[np.linspace(a, b, 41) for a, b in region.bounds(region.half_width)]),
        axis=-1,
    ).reshape(-1, region.dim)
    _check_open_unit(region.values(grid), "conditional on the region")

    exact: list[float] = []
    asymptotic: list[float] = []
    for diameter in ds:
        e, a = _region_information(region, 0.5 * diameter)
        exact.append(e)
        asymptotic.append(a)
        logger.debug("diameter %g: exact %.12g, asymptotic %.12g", diameter, e, a)
    errors = [abs(e - a) for e, a in zip(exact, asymptotic)]

    tail_d, tail_e = ds[-3:], errors[-3:]
    order: Optional[float] = None
    if len(tail_d) >= 2 and all(e > 0 for e in tail_e):
        order = float(np.polyfit(np.log(tail_d), np.log(tail_e), 1)[0])
    negligible = max(errors) <= 1e-13
    passed = negligible or (order is not None and order >= MIN_MI_ORDER)
    return MIReport(
        diameters=tuple(ds),
        exact=tuple(exact),
        asymptotic=tuple(asymptotic),
        errors=tuple(errors),
        order=order,
        passed=passed,
    )


def isotropy_check(cov0: ArrayLike, directions: ArrayLike) -> IsotropyReport:
    """vᵀ cov0 v for each unit direction; equal values for all v iff cov0 ∝ I."""

    cov = np.asarray(cov0, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise ValueError(f"cov0 must be square, got shape {cov.shape}")
    if not np.allclose(cov, cov.T, rtol=0.0, atol=1e-12):
        raise ValueError("cov0 must be symmetric")
    if np.any(np.linalg.eigvalsh(cov) <= 0.0):
        raise ValueError("cov0 must be positive definite")
    dirs = as_points(directions, cov.shape[0], "direction")
    norms = np.linalg.norm(dirs, axis=1)
    if np.any(np.abs(norms - 1.0) > UNIT_TOL):
        raise ValueError("directions must be unit vectors")

    values = np.einsum("ni,ij,nj->n", dirs, cov, dirs)
    spread = float(values.max() - values.min())
    scale = max(1.0, float(np.abs(values).max()))
    return IsotropyReport(
        values=tuple(float(v) for v in values),
        spread=spread,
        isotropic=spread <= ISOTROPY_TOL * scale,
    )


def random_unit_directions(dim: int, count: int, seed: int = 0) -> FloatArray:
    raw = np.random.default_rng(seed).normal(size=(count, dim))
    return raw / np.linalg.norm(raw, axis=1, keepdims=True)


# --- randomized sweeps ------------------------------------------------------------


def sweep_densities() -> list[Density]:
    """One-dimensional densities the randomized checks cycle through."""

    return [
        Uniform1D(lo=-2.0, hi=2.0),
        Gaussian(mean=(0.0,), variance=1.0),
        Laplace1D(location=0.0, scale=1.0),
        Mixture(
            components=(
                MixtureComponent(weight=0.5, density=Gaussian(mean=(-1.0,), variance=0.25)),
                MixtureComponent(weight=0.5, density=Gaussian(mean=(1.0,), variance=0.25)),
            )
        ),
        Mixture(
            components=(
                MixtureComponent(weight=0.7, density=Gaussian(mean=(0.0,), variance=1.0)),
                MixtureComponent(weight=0.3, density=Laplace1D(location=1.0, scale=0.5)),
            )
        ),
    ]


def _instance_rng(seed: int, instance: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, instance]))


def _run_sweep(
    check: str,
    instances: int,
    workers: int,
    run_one: Callable[[int], tuple[float, bool]],
) -> SweepReport:
    if instances < 1:
        raise ValueError(f"instances must be >= 1, got {instances}")
    with ThreadPoolExecutor(max_workers=max(workers, 1)) as pool:
        results = list(pool.map(run_one, range(instances)))
    violations = sum(1 for _, ok in results if not ok)
    worst = min(score for score, _ in results)
    if violations:
        logger.warning("%s: %d of %d instances failed", check, violations, instances)
    else:
        logger.info("%s: all %d instances passed (worst %.6g)", check, instances, worst)
    return SweepReport(
        check=check,
        instances=instances,
        violations=violations,
        worst=worst,
        passed=violations == 0,
    )


def _central_span(density: Density) -> tuple[float, float]:
    lo, hi = density.effective_support()
    center = 0.5 * (lo + hi)
    half = (hi - lo) / 6.0
    return center - half, center + half


def lemma3_sweep(
    instances: int = 100,
    seed: int = 0,
    densities: Optional[Sequence[Density]] = None,
    workers: int = 1,
) -> SweepReport:
    """Reciprocal-length bound margins for random spline conditionals on random intervals."""

    pool = list(densities) if densities is not None else sweep_densities()

    def run_one(instance: int) -> tuple[float, bool]:
        rng = _instance_rng(seed, instance)
        density = pool[instance % len(pool)]
        lo, hi = _central_span(density)
        x1, x2 = np.sort(rng.uniform(lo, hi, 2))
        conditional = SplineConditional.random(rng, float(x1), float(x2))
        report = lemma3_check(conditional, density, float(x1), float(x2))
        return report.margin, report.passed

    return _run_sweep("lemma3", instances, workers, run_one)


def lemma4_sweep(
    instances: int = 100,
    seed: int = 0,
    sample_size: int = 50,
    densities: Optional[Sequence[Density]] = None,
    workers: int = 1,
) -> SweepReport:
    """Square-loss gap slack for random conditional pairs and random labeled samples."""

    pool = list(densities) if densities is not None else sweep_densities()

    def run_one(instance: int) -> tuple[float, bool]:
        rng = _instance_rng(seed, instance)
        density = pool[instance % len(pool)]
        lo, hi = _central_span(density)
        h1 = SplineConditional.random(rng, lo, hi)
        h2 = SplineConditional.random(rng, lo, hi)
        truth = SplineConditional.random(rng, lo, hi)
        xs = density.sample(sample_size, int(rng.integers(0, 2**31)))
        ys = np.where(rng.random(sample_size) < truth.value(xs[:, 0]), 1.0, -1.0)
        report = lemma4_check(h1, h2, density, LabeledDataset(xs, ys), truth)
        return min(report.expected_slack, report.empirical_slack), report.passed

    return _run_sweep("lemma4", instances, workers, run_one)


def mi_sweep(
    instances: int = 10,
    seed: int = 0,
    diameters: Sequence[float] = (0.4, 0.2, 0.1, 0.05),
    workers: int = 1,
) -> SweepReport:
    """Convergence orders of the regional information for random logistic conditionals.

    Instances alternate between a uniform and a Gaussian marginal.
    """

    marginals: list[Density] = [Uniform1D(lo=-1.0, hi=1.0), Gaussian(mean=(0.0,), variance=1.0)]

    def run_one(instance: int) -> tuple[float, bool]:
        rng = _instance_rng(seed, instance)
        conditional = LogisticConditional(
            weights=(float(rng.uniform(-3.0, 3.0)),), offset=float(rng.uniform(-1.0, 1.0))
        )
        region = RegionSpec(
            center=(float(rng.uniform(-0.3, 0.3)),),
            half_width=0.5 * diameters[0],
            conditional=conditional,
            density=marginals[instance % len(marginals)],
        )
        report = mi_region_check(region, diameters)
        score = report.order if report.order is not None else math.inf
        return score, report.passed

    return _run_sweep("mi", instances, workers, run_one)


__all__ = [
    "ConstantConditional",
    "FunctionConditional",
    "LogisticConditional",
    "RegionSpec",
    "SmoothConditional",
    "SplineConditional",
    "c_p",
    "complexity_profile",
    "isotropy_check",
    "lemma3_check",
    "lemma3_sweep",
    "lemma4_check",
    "lemma4_sweep",
    "m_p",
    "m_p_inverse",
    "mass_slope",
    "max_pdf",
    "mi_region_check",
    "mi_sweep",
    "random_unit_directions",
    "sample_bound",
    "superlevel_intervals",
    "sweep_densities",
]
