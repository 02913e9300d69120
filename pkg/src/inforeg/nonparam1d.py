"""Minimal-information conditionals on the real line.

Between two labeled locations the conditional f(x) = p(y=1|x) that minimizes
∫ p(x) f'(x)² / (f(1−f)) dx is linear in g(f) = −2 arctan √(1/f − 1) along the
reciprocal-density length ∫ dx/p. The interval then costs (Δg)² / ∫ dx/p, and
choosing the values at the labeled points is a concave problem in g.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from typing import Union, overload

import numpy as np
from numpy.typing import ArrayLike
from scipy import integrate

from .densities import Density, reciprocal_integral, require_1d_analytic
from .errors import DivergentIntegralError
from .models import AnchorSet, Solve1DSummary
from .validation import FloatArray

logger = logging.getLogger(__name__)

EPS_F = 1e-6
GRAD_TOL = 1e-8
MAX_NEWTON_ITER = 200


@overload
def g_transform(f: float) -> float: ...
@overload
def g_transform(f: FloatArray) -> FloatArray: ...
def g_transform(f: Union[float, ArrayLike]) -> Union[float, FloatArray]:
    """g(f) = −2 arctan √((1 − f)/f), mapping [0, 1] onto [−π, 0]."""

    arr = np.asarray(f, dtype=float)
    if np.any((arr < 0.0) | (arr > 1.0)) or np.any(np.isnan(arr)):
        raise ValueError("g_transform expects probabilities in [0, 1]")
    with np.errstate(divide="ignore"):
        g = -2.0 * np.arctan(np.sqrt((1.0 - arr) / arr))
    return float(g) if g.ndim == 0 else g


@overload
def g_inverse(g: float) -> float: ...
@overload
def g_inverse(g: FloatArray) -> FloatArray: ...
def g_inverse(g: Union[float, ArrayLike]) -> Union[float, FloatArray]:
    """f = cos²(g/2)."""

    arr = np.asarray(g, dtype=float)
    f = np.cos(0.5 * arr) ** 2
    return float(f) if f.ndim == 0 else f


G_LOWER = g_transform(EPS_F)
G_UPPER = g_transform(1.0 - EPS_F)


def clamp(f: ArrayLike) -> FloatArray:
    return np.clip(np.asarray(f, dtype=float), EPS_F, 1.0 - EPS_F)


def interval_regularizer(f_a: float, f_b: float, recint: float) -> float:
    """(g(f_b) − g(f_a))² / recint: the least information cost of going from f_a to f_b."""

    if not recint > 0:
        raise ValueError(f"recint must be positive, got {recint}")
    delta = g_transform(f_b) - g_transform(f_a)
    return delta * delta / recint


@dataclass(frozen=True, eq=False)
class Conditional1D:
    """Piecewise minimal-information conditional through fixed anchor values.

    ``recints[k]`` is ∫ dx/p over the k-th gap, or ``None`` when p vanishes in
    it; the conditional then steps from one anchor value to the next at
    ``zeros[k]``. Outside the outer anchors the value is constant.
    """

    density: Density
    locations: tuple[float, ...]
    values: tuple[float, ...]
    recints: tuple[float | None, ...]
    zeros: tuple[float | None, ...]

    @classmethod
    def build(
        cls,
        density: Density,
        locations: Sequence[float],
        values: Sequence[float],
    ) -> Conditional1D:
        require_1d_analytic(density, "Conditional1D")
        locs = [float(x) for x in locations]
        if not locs:
            raise ValueError("at least one anchor location is required")
        if len(values) != len(locs):
            raise ValueError(f"{len(locs)} locations but {len(values)} values")
        if any(b <= a for a, b in zip(locs, locs[1:])):
            raise ValueError("anchor locations must be strictly increasing")
        recints, zeros = _gap_integrals(density, locs)
        return cls(
            density=density,
            locations=tuple(locs),
            values=tuple(float(v) for v in clamp(values)),
            recints=recints,
            zeros=zeros,
        )

    def with_values(self, values: Sequence[float]) -> Conditional1D:
        if len(values) != len(self.locations):
            raise ValueError(f"{len(self.locations)} locations but {len(values)} values")
        return Conditional1D(
            density=self.density,
            locations=self.locations,
            values=tuple(float(v) for v in clamp(values)),
            recints=self.recints,
            zeros=self.zeros,
        )

    @property
    def g_values(self) -> FloatArray:
        return np.asarray(g_transform(np.asarray(self.values)))

    def components(self) -> list[list[int]]:
        """Index groups of anchors joined by gaps where p stays positive."""

        groups: list[list[int]] = [[0]]
        for k, recint in enumerate(self.recints):
            if recint is None:
                groups.append([k + 1])
            else:
                groups[-1].append(k + 1)
        return groups

    def _locate(self, x: float) -> int | None:
        """Gap index containing ``x`` strictly inside, else ``None``."""

        if x <= self.locations[0] or x >= self.locations[-1]:
            return None
        k = int(np.searchsorted(self.locations, x, side="right")) - 1
        if x == self.locations[k]:
            return None
        return k

    def _fraction(self, k: int, x: float) -> float:
        recint = self.recints[k]
        assert recint is not None
        partial = reciprocal_integral(self.density, self.locations[k], x)
        return min(max(partial / recint, 0.0), 1.0)

    def _value_at(self, x: float) -> float:
        if x <= self.locations[0]:
            return self.values[0]
        if x >= self.locations[-1]:
            return self.values[-1]
        k = self._locate(x)
        if k is None:
            return self.values[self.locations.index(x)]
        f_a, f_b = self.values[k], self.values[k + 1]
        if self.recints[k] is None:
            zero = self.zeros[k]
            return f_a if zero is None or x < zero else f_b
        if f_a == f_b:
            return f_a
        g_a, g_b = g_transform(f_a), g_transform(f_b)
        return g_inverse(g_a + (g_b - g_a) * self._fraction(k, x))

    def _derivative_at(self, x: float) -> float:
        if x < self.locations[0] or x >= self.locations[-1]:
            return 0.0
        k = int(np.searchsorted(self.locations, x, side="right")) - 1
        recint = self.recints[k]
        f_a, f_b = self.values[k], self.values[k + 1]
        if recint is None or f_a == f_b:
            return 0.0
        g_a, g_b = g_transform(f_a), g_transform(f_b)
        g = g_a + (g_b - g_a) * (self._fraction(k, x) if x > self.locations[k] else 0.0)
        slope = (g_b - g_a) / (recint * self.density.pdf(x))
        return -0.5 * math.sin(g) * slope

    def value(self, x: ArrayLike) -> FloatArray:
        """p(y=1|x) at each point of ``x``."""

        pts = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
        return np.asarray([self._value_at(float(t)) for t in pts])

    def derivative(self, x: ArrayLike) -> FloatArray:
        """d/dx p(y=1|x); one-sided from the right at anchor locations."""

        pts = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
        return np.asarray([self._derivative_at(float(t)) for t in pts])


def _gap_integrals(
    density: Density, locations: Sequence[float]
) -> tuple[tuple[float | None, ...], tuple[float | None, ...]]:
    recints: list[float | None] = []
    zeros: list[float | None] = []
    for a, b in zip(locations, locations[1:]):
        try:
            recints.append(reciprocal_integral(density, a, b))
            zeros.append(None)
        except DivergentIntegralError as exc:
            logger.info("Density vanishes between anchors %g and %g; splitting there", a, b)
            recints.append(None)
            zeros.append(exc.at if exc.at is not None else 0.5 * (a + b))
    return tuple(recints), tuple(zeros)


def evaluate(cond: Conditional1D, x: float) -> float:
    """p(y=1|x) under the minimal-information interpolation."""

    return float(cond.value(x)[0])


def total_regularizer(cond: Conditional1D) -> float:
    """Σ_k (g_{k+1} − g_k)² / recint_k over gaps where p stays positive."""

    g = cond.g_values
    total = 0.0
    for k, recint in enumerate(cond.recints):
        if recint is not None:
            delta = g[k + 1] - g[k]
            total += delta * delta / recint
    return float(total)


def anchor_objective(cond: Conditional1D, anchors: AnchorSet, lam: float) -> float:
    """Σ_i log p(y_i|x_i) − λ · total_regularizer for the conditional's anchor values."""

    locations, positives, negatives = anchors.merged()
    if not np.array_equal(locations, np.asarray(cond.locations)):
        raise ValueError("conditional locations do not match the anchor set")
    f = np.asarray(cond.values)
    loglik = math.fsum(positives * np.log(f) + negatives * np.log1p(-f))
    return loglik - lam * total_regularizer(cond)


def _laplacian(weights: FloatArray) -> FloatArray:
    n = weights.shape[0] + 1
    lap = np.zeros((n, n))
    for k, w in enumerate(weights):
        lap[k, k] += w
        lap[k + 1, k + 1] += w
        lap[k, k + 1] -= w
        lap[k + 1, k] -= w
    return lap


@dataclass(frozen=True)
class _AnchorProblem:
    """Concave objective in g for one connected group of anchors."""

    positives: FloatArray
    negatives: FloatArray
    laplacian: FloatArray
    lam: float

    def value(self, g: FloatArray) -> float:
        half = 0.5 * g
        loglik = 2.0 * (
            self.positives * np.log(np.cos(half)) + self.negatives * np.log(-np.sin(half))
        )
        return float(loglik.sum() - self.lam * g @ self.laplacian @ g)

    def gradient(self, g: FloatArray) -> FloatArray:
        half = 0.5 * g
        return np.asarray(
            -self.positives * np.tan(half)
            + self.negatives / np.tan(half)
            - 2.0 * self.lam * self.laplacian @ g
        )

    def hessian(self, g: FloatArray) -> FloatArray:
        half = 0.5 * g
        diagonal = -0.5 * (
            self.positives / np.cos(half) ** 2 + self.negatives / np.sin(half) ** 2
        )
        return np.asarray(np.diag(diagonal) - 2.0 * self.lam * self.laplacian)

    def solve(self, start: FloatArray) -> tuple[FloatArray, float]:
        """Projected Newton ascent on the box [G_LOWER, G_UPPER]ⁿ.

        Stops when the projected gradient is below GRAD_TOL, or when no step
        changes g any more. The line search tolerates round-off in the value,
        which near the optimum is larger than the remaining gain.
        """

        g = np.clip(start, G_LOWER, G_UPPER)
        value = self.value(g)
        for _ in range(MAX_NEWTON_ITER):
            grad = self.gradient(g)
            at_lower = (g <= G_LOWER) & (grad < 0.0)
            at_upper = (g >= G_UPPER) & (grad > 0.0)
            free = ~(at_lower | at_upper)
            projected = np.where(free, grad, 0.0)
            if float(np.max(np.abs(projected))) <= GRAD_TOL:
                break

            direction = np.zeros_like(g)
            if free.any():
                h_free = self.hessian(g)[np.ix_(free, free)]
                try:
                    direction[free] = np.linalg.solve(-h_free, grad[free])
                except np.linalg.LinAlgError:
                    direction = projected
            if float(grad @ direction) <= 0.0:
                direction = projected
            slack = 1e-15 * (1.0 + abs(value))

            step = 1.0
            accepted = False
            while step > 1e-20:
                candidate = np.clip(g + step * direction, G_LOWER, G_UPPER)
                candidate_value = self.value(candidate)
                if candidate_value >= value + 1e-4 * float(grad @ (candidate - g)) - slack:
                    accepted = True
                    break
                step *= 0.5
            if not accepted or np.array_equal(candidate, g):
                break
            g, value = candidate, candidate_value
        return g, value


def fit_anchors(
    anchors: AnchorSet,
    density: Density,
    lam: float,
    restarts: int = 3,
    seed: int = 0,
) -> Conditional1D:
    """Choose the anchor values maximizing log-likelihood − λ · total information.

    Each connected group of anchors is solved on its own in g-coordinates;
    restart 0 starts every value at 1/2, further restarts at seeded uniform
    draws in the clamped range, and the best objective wins.
    """

    if lam < 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    if restarts < 1:
        raise ValueError(f"restarts must be >= 1, got {restarts}")
    require_1d_analytic(density, "fit_anchors")
    locations, positives, negatives = anchors.merged()
    at_anchors = density.pdf_values(locations)
    if np.any(at_anchors <= 0.0):
        bad = locations[at_anchors <= 0.0]
        raise ValueError(f"density vanishes at anchor locations {bad.tolist()}")

    skeleton = Conditional1D.build(density, locations, np.full(locations.shape[0], 0.5))
    rng = np.random.default_rng(seed)
    g_best = np.empty(locations.shape[0])
    for group in skeleton.components():
        idx = np.asarray(group)
        recints = [skeleton.recints[k] for k in group[:-1]]
        weights = np.asarray([1.0 / r for r in recints if r is not None])
        problem = _AnchorProblem(positives[idx], negatives[idx], _laplacian(weights), lam)
        best_value = -math.inf
        for restart in range(restarts):
            if restart == 0:
                start = np.full(idx.shape[0], -0.5 * math.pi)
            else:
                start = rng.uniform(G_LOWER, G_UPPER, size=idx.shape[0])
            g, value = problem.solve(start)
            if value > best_value:
                best_value = value
                g_best[idx] = g

    cond = skeleton.with_values(np.asarray(g_inverse(g_best)))
    logger.info(
        "Fitted %d anchor values (lambda=%g): objective %.10g",
        locations.shape[0],
        lam,
        anchor_objective(cond, anchors, lam),
    )
    return cond


def emit_curve(cond: Conditional1D, grid: int) -> list[tuple[float, float]]:
    """(x, f(x)) on ``grid`` evenly spaced points spanning the anchors."""

    if grid < 2:
        raise ValueError(f"grid must be >= 2, got {grid}")
    xs = np.linspace(cond.locations[0], cond.locations[-1], grid)
    xs[0], xs[-1] = cond.locations[0], cond.locations[-1]
    return [(float(x), float(f)) for x, f in zip(xs, cond.value(xs))]


def information_regularizer_1d(
    conditional: Conditional1D,
    a: float | None = None,
    b: float | None = None,
) -> float:
    """∫_a^b p f'² / (f(1 − f)) dx by adaptive quadrature.

    Defaults to the span of the anchors; it agrees with
    :func:`total_regularizer` when the density stays positive there.
    """

    lo = conditional.locations[0] if a is None else a
    hi = conditional.locations[-1] if b is None else b
    if not lo < hi:
        return 0.0
    density = conditional.density

    def integrand(t: float) -> float:
        f = float(conditional.value(t)[0])
        df = float(conditional.derivative(t)[0])
        return density.pdf(t) * df * df / (f * (1.0 - f))

    inner = [x for x in conditional.locations if lo < x < hi]
    inner += [z for z in conditional.zeros if z is not None and lo < z < hi]
    value, _ = integrate.quad(
        integrand, lo, hi, points=sorted(inner) or None, epsabs=1e-12, epsrel=1e-10, limit=200
    )
    return float(value)


def euler_lagrange_residual(cond: Conditional1D, x0: float, h: float) -> float:
    """Central-difference residual of (log p)' f' + f'' + ½(2f − 1) f'² / (f(1 − f)).

    The minimal-information conditional makes this vanish wherever p is smooth
    and positive, so the residual only carries the O(h²) difference error.
    """

    xs = np.asarray([x0 - h, x0, x0 + h])
    f = cond.value(xs)
    logp = np.log(cond.density.pdf_values(xs))
    df = (f[2] - f[0]) / (2.0 * h)
    d2f = (f[2] - 2.0 * f[1] + f[0]) / (h * h)
    dlogp = (logp[2] - logp[0]) / (2.0 * h)
    mid = f[1]
    return float(dlogp * df + d2f + 0.5 * (2.0 * mid - 1.0) * df * df / (mid * (1.0 - mid)))


def euler_lagrange_orders(
    cond: Conditional1D,
    x0: float,
    steps: Sequence[float] = (1e-2, 1e-3, 1e-4),
) -> tuple[list[float], list[float]]:
    """Residuals at each step and the convergence orders between consecutive steps."""

    residuals = [abs(euler_lagrange_residual(cond, x0, h)) for h in steps]
    orders = [
        math.log(r0 / r1) / math.log(h0 / h1)
        for (r0, r1), (h0, h1) in zip(
            zip(residuals, residuals[1:]), zip(steps, steps[1:])
        )
    ]
    return residuals, orders


def solve1d(
    anchors: AnchorSet, density: Density, lam: float, grid: int = 101
) -> tuple[Conditional1D, Solve1DSummary, list[tuple[float, float]]]:
    """Fit anchor values, then summarize and sample the resulting conditional."""

    cond = fit_anchors(anchors, density, lam)
    summary = Solve1DSummary(
        objective=anchor_objective(cond, anchors, lam),
        regularizer=total_regularizer(cond),
        anchor_values=cond.values,
        locations=cond.locations,
        lam=lam,
    )
    return cond, summary, emit_curve(cond, grid)


def reference_curves(
    densities: Mapping[str, Density],
    left: tuple[float, float] = (-1.5, 0.99),
    right: tuple[float, float] = (1.5, 0.01),
    grid: int = 101,
) -> dict[str, list[tuple[float, float]]]:
    """Minimal-information curves between two fixed values for each 1D density.

    Densities that are not one-dimensional or vanish at an end point are skipped.
    """

    curves: dict[str, list[tuple[float, float]]] = {}
    for name, density in densities.items():
        if density.dim != 1 or not density.is_analytic:
            continue
        ends = density.pdf_values([left[0], right[0]])
        if np.any(ends <= 0.0):
            logger.warning("Skipping %s: density vanishes at a curve end point", name)
            continue
        cond = Conditional1D.build(density, [left[0], right[0]], [left[1], right[1]])
        curves[name] = emit_curve(cond, grid)
    return curves


__all__ = [
    "Conditional1D",
    "EPS_F",
    "anchor_objective",
    "clamp",
    "emit_curve",
    "euler_lagrange_orders",
    "euler_lagrange_residual",
    "evaluate",
    "fit_anchors",
    "g_inverse",
    "g_transform",
    "information_regularizer_1d",
    "interval_regularizer",
    "reference_curves",
    "solve1d",
    "total_regularizer",
]
