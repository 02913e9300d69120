"""Shared fixtures and brute-force oracles for the numerical tests."""

from __future__ import annotations

import math
from collections.abc import Callable, Iterator

import numpy as np
import pytest
from scipy import integrate, linalg, optimize, stats

from inforeg.config import get_settings
from inforeg.densities import Density, Gaussian, Mixture, MixtureComponent, Uniform1D
from inforeg.services.presets import load_preset_registry

EPS = 1e-6


@pytest.fixture(autouse=True)
def clear_caches() -> Iterator[None]:
    """Settings and presets are cached per process; tests may change the environment."""
    get_settings.cache_clear()
    load_preset_registry.cache_clear()
    yield
    get_settings.cache_clear()
    load_preset_registry.cache_clear()


@pytest.fixture
def uniform01() -> Uniform1D:
    return Uniform1D(lo=0.0, hi=1.0)


@pytest.fixture
def std_normal() -> Gaussian:
    return Gaussian(mean=(0.0,), variance=1.0)


@pytest.fixture
def bimodal() -> Mixture:
    return Mixture(
        components=(
            MixtureComponent(weight=0.5, density=Gaussian(mean=(-3.0,), variance=1.0)),
            MixtureComponent(weight=0.5, density=Gaussian(mean=(3.0,), variance=1.0)),
        )
    )


def discretized_information(
    density: Density, a: float, b: float, f_a: float, f_b: float, points: int
) -> tuple[float, np.ndarray, np.ndarray]:
    """Minimize Σ p (Δf)² / (f(1−f)) / Δx over piecewise-linear f with fixed ends.

    Midpoint values stand in for f and p on each cell; L-BFGS-B works on the
    interior values with the analytic gradient. Returns the minimal energy, the
    grid and the minimizing values on it.
    """

    xs = np.linspace(a, b, points)
    dx = np.diff(xs)
    weights = density.pdf_values(0.5 * (xs[:-1] + xs[1:])) / dx

    def energy(inner: np.ndarray) -> tuple[float, np.ndarray]:
        f = np.concatenate([[f_a], inner, [f_b]])
        d = np.diff(f)
        m = 0.5 * (f[:-1] + f[1:])
        v = m * (1.0 - m)
        terms = weights * d * d / v
        # ∂/∂f_{i+1} and ∂/∂f_i of each cell term.
        common = -weights * d * d * (1.0 - 2.0 * m) / (2.0 * v * v)
        right = 2.0 * weights * d / v + common
        left = -2.0 * weights * d / v + common
        grad = np.zeros_like(f)
        grad[1:] += right
        grad[:-1] += left
        return float(terms.sum()), grad[1:-1]

    start = np.linspace(f_a, f_b, points)[1:-1]
    result = optimize.minimize(
        energy,
        start,
        jac=True,
        method="L-BFGS-B",
        bounds=[(EPS, 1.0 - EPS)] * start.shape[0],
        options={"maxiter": 20_000, "ftol": 1e-15, "gtol": 1e-12},
    )
    return float(result.fun), xs, np.concatenate([[f_a], result.x, [f_b]])


def discretized_g_information(
    density: Density, a: float, b: float, f_a: float, f_b: float, cells: int
) -> tuple[float, np.ndarray, np.ndarray]:
    """Minimize ∫ p g'² exactly over piecewise-linear g on ``cells`` equal cells.

    In g-coordinates the functional is ∫ p g'² dx, so a linear piece costs
    (Δg / Δx)² times the mass of its cell. Every discrete minimizer is an
    admissible conditional, which keeps the result above the continuous
    minimum; on nested grids it can only decrease. The interior values solve
    a tridiagonal system. Returns the energy, the nodes and f on them.
    """

    xs = np.linspace(a, b, cells + 1)
    mass = np.diff(density.cdf(xs))
    c = mass / np.diff(xs) ** 2
    g_a, g_b = (-2.0 * math.atan(math.sqrt((1.0 - f) / f)) for f in (f_a, f_b))
    bands = np.zeros((3, cells - 1))
    bands[0, 1:] = -c[1:-1]
    bands[1] = c[:-1] + c[1:]
    bands[2, :-1] = -c[1:-1]
    rhs = np.zeros(cells - 1)
    rhs[0] += c[0] * g_a
    rhs[-1] += c[-1] * g_b
    g = np.concatenate([[g_a], linalg.solve_banded((1, 1), bands, rhs), [g_b]])
    energy = float(np.sum(c * np.diff(g) ** 2))
    return energy, xs, np.cos(0.5 * g) ** 2


def anchor_grid_search(lam: float, recint: float, points: int = 400) -> float:
    """Best log f0 + log(1 − f1) − λ(g(f1) − g(f0))² / recint over a square grid."""

    f = np.linspace(EPS, 1.0 - EPS, points)
    g = -2.0 * np.arctan(np.sqrt((1.0 - f) / f))
    f0, f1 = np.meshgrid(f, f, indexing="ij")
    g0, g1 = np.meshgrid(g, g, indexing="ij")
    values = np.log(f0) + np.log1p(-f1) - lam * (g1 - g0) ** 2 / recint
    return float(values.max())


def kernel_quadrature(theta: np.ndarray, center: np.ndarray, tau: float) -> float:
    """∫ N(x; center, τI) ‖θ‖² ¼ exp(−(θᵀx)²/4) dx reduced to the line along θ."""

    norm = float(np.linalg.norm(theta))
    if norm == 0.0:
        return 0.0
    along = float(theta @ center) / norm

    def integrand(t: float) -> float:
        s = norm * t
        return float(stats.norm.pdf(t, along, math.sqrt(tau))) * 0.25 * math.exp(-0.25 * s * s)

    width = 12.0 * math.sqrt(tau)
    value, _ = integrate.quad(
        integrand, along - width, along + width, points=[along], epsabs=1e-14, epsrel=1e-12
    )
    return norm * norm * value


@pytest.fixture
def information_oracle() -> Callable[..., tuple[float, np.ndarray, np.ndarray]]:
    return discretized_information


@pytest.fixture
def g_grid_oracle() -> Callable[..., tuple[float, np.ndarray, np.ndarray]]:
    return discretized_g_information


@pytest.fixture
def grid_search_oracle() -> Callable[..., float]:
    return anchor_grid_search


@pytest.fixture
def kernel_oracle() -> Callable[..., float]:
    return kernel_quadrature
