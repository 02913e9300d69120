from __future__ import annotations

import json
import math

import numpy as np
import pytest
from pydantic import ValidationError
from scipy import integrate

from inforeg.densities import (
    Empirical,
    Gaussian,
    GaussianKDE,
    Laplace1D,
    Mixture,
    MixtureComponent,
    Uniform1D,
    dump_density,
    first_zero,
    load_density,
    parse_density,
    pdf,
    reciprocal_integral,
    sample,
    total_mass,
)
from inforeg.errors import (
    DimensionMismatchError,
    DivergentIntegralError,
    UnsupportedOperationError,
)


def test_uniform_pdf_at_midpoint(uniform01: Uniform1D) -> None:
    assert pdf(uniform01, 0.5) == 1.0
    assert pdf(uniform01, 1.5) == 0.0


def test_gaussian_pdf_at_mean(std_normal: Gaussian) -> None:
    assert pdf(std_normal, 0.0) == pytest.approx(0.39894, abs=1e-5)


def test_single_kernel_kde_matches_gaussian() -> None:
    kde = GaussianKDE(centers=[0.0], bandwidth=1.0)
    assert pdf(kde, 0.0) == pytest.approx(0.39894, abs=1e-5)


def test_kde_does_not_depend_on_center_order() -> None:
    a = GaussianKDE(centers=[[0.3, 1.0], [-1.0, 2.0], [0.0, 0.0]], bandwidth=0.5)
    b = GaussianKDE(centers=[[0.0, 0.0], [0.3, 1.0], [-1.0, 2.0]], bandwidth=0.5)
    x = [[0.1, 0.2]]
    assert a.pdf(x) == b.pdf(x)


def test_sample_is_deterministic(bimodal: Mixture) -> None:
    first = sample(bimodal, 200, seed=11)
    second = sample(bimodal, 200, seed=11)
    np.testing.assert_array_equal(first, second)
    assert not np.array_equal(first, sample(bimodal, 200, seed=12))


def test_gaussian_sample_mean(std_normal: Gaussian) -> None:
    draws = sample(std_normal, 100_000, seed=0)
    assert draws.shape == (100_000, 1)
    assert abs(float(draws.mean())) < 0.02


def test_mixture_sample_mean(bimodal: Mixture) -> None:
    draws = sample(bimodal, 100_000, seed=3)
    assert abs(float(draws.mean())) < 0.05


def test_sample_rejects_nonpositive_size(std_normal: Gaussian) -> None:
    with pytest.raises(ValueError):
        sample(std_normal, 0, seed=0)


@pytest.mark.parametrize(
    ("density", "a", "b", "expected"),
    [
        (Uniform1D(lo=0.0, hi=1.0), 0.0, 1.0, 1.0),
        (Uniform1D(lo=0.0, hi=2.0), 0.0, 1.0, 2.0),
    ],
)
def test_reciprocal_integral_uniform(
    density: Uniform1D, a: float, b: float, expected: float
) -> None:
    assert reciprocal_integral(density, a, b) == pytest.approx(expected, rel=1e-12)


def test_reciprocal_integral_gaussian_matches_trapezoid(std_normal: Gaussian) -> None:
    xs = np.linspace(0.0, 1.0, 200_001)
    oracle = integrate.trapezoid(np.exp(0.5 * xs * xs) * math.sqrt(2.0 * math.pi), xs)
    value = reciprocal_integral(std_normal, 0.0, 1.0)
    assert value == pytest.approx(oracle, rel=1e-8)
    assert value == pytest.approx(2.99531, abs=1e-4)


def test_reciprocal_integral_mixture_uses_quadrature(bimodal: Mixture) -> None:
    xs = np.linspace(-1.0, 1.0, 200_001)
    oracle = integrate.trapezoid(1.0 / bimodal.pdf_values(xs), xs)
    assert reciprocal_integral(bimodal, -1.0, 1.0) == pytest.approx(oracle, rel=1e-6)


def test_reciprocal_integral_laplace_closed_form() -> None:
    density = Laplace1D(location=0.0, scale=0.5)
    value, _ = integrate.quad(lambda t: 1.0 / density.pdf(t), -1.0, 2.0, points=[0.0])
    assert reciprocal_integral(density, -1.0, 2.0) == pytest.approx(value, rel=1e-9)


def test_reciprocal_integral_diverges_where_density_vanishes(uniform01: Uniform1D) -> None:
    with pytest.raises(DivergentIntegralError) as excinfo:
        reciprocal_integral(uniform01, 0.5, 1.5)
    assert excinfo.value.at == pytest.approx(1.0, abs=1e-9)


def test_reciprocal_integral_rejects_reversed_interval(uniform01: Uniform1D) -> None:
    with pytest.raises(ValueError):
        reciprocal_integral(uniform01, 0.8, 0.2)


def test_reciprocal_integral_rejects_2d_density() -> None:
    density = Gaussian(mean=(0.0, 0.0), variance=1.0)
    with pytest.raises(UnsupportedOperationError):
        reciprocal_integral(density, 0.0, 1.0)


def test_empirical_has_no_pdf() -> None:
    density = Empirical(points=[[0.0], [1.0]])
    assert not density.is_analytic
    with pytest.raises(UnsupportedOperationError):
        density.pdf(0.5)
    with pytest.raises(UnsupportedOperationError):
        reciprocal_integral(density, 0.0, 1.0)


def test_first_zero_finds_support_edge() -> None:
    density = Uniform1D(lo=-1.0, hi=0.25)
    assert first_zero(density, 0.0, 1.0) == pytest.approx(0.25, abs=1e-12)
    assert first_zero(density, -0.5, 0.0) is None


def _split_uniform(gap: float) -> Mixture:
    return Mixture(
        components=(
            MixtureComponent(weight=0.5, density=Uniform1D(lo=0.0, hi=1.0)),
            MixtureComponent(weight=0.5, density=Uniform1D(lo=1.0 + gap, hi=2.0)),
        )
    )


def test_first_zero_finds_gap_narrower_than_scan() -> None:
    density = _split_uniform(1e-4)
    zero = first_zero(density, 0.5, 1.5)
    assert zero is not None
    assert 1.0 <= zero < 1.0001
    assert first_zero(density, 0.2, 0.9) is None


def test_reciprocal_integral_diverges_across_narrow_gap() -> None:
    density = _split_uniform(1e-4)
    with pytest.raises(DivergentIntegralError) as excinfo:
        reciprocal_integral(density, 0.5, 1.5)
    assert excinfo.value.at == pytest.approx(1.0, abs=1e-4)
    # either side of the gap stays finite
    assert reciprocal_integral(density, 0.5, 1.0) == pytest.approx(1.0, rel=1e-8)
    assert reciprocal_integral(density, 1.5, 2.0) == pytest.approx(0.9999, rel=1e-8)


@pytest.mark.parametrize(
    ("density", "a", "b", "c"),
    [
        (Uniform1D(lo=-2.0, hi=2.0), -1.5, 0.25, 1.75),
        (Gaussian(mean=(0.5,), variance=2.0), -2.0, 0.3, 3.0),
        (Laplace1D(location=0.2, scale=0.7), -1.0, 0.6, 1.5),
        (
            Mixture(
                components=(
                    MixtureComponent(weight=0.3, density=Uniform1D(lo=-1.0, hi=1.0)),
                    MixtureComponent(weight=0.7, density=Gaussian(mean=(0.5,), variance=1.0)),
                )
            ),
            -2.0,
            0.0,
            2.0,
        ),
        (GaussianKDE(centers=[-1.0, 0.0, 2.5], bandwidth=0.3), -1.0, 1.2, 2.0),
    ],
    ids=["uniform", "gaussian", "laplace", "mixture", "kde"],
)
def test_reciprocal_integral_is_additive_over_intervals(
    density: Uniform1D | Gaussian | Laplace1D | Mixture | GaussianKDE,
    a: float,
    b: float,
    c: float,
) -> None:
    whole = reciprocal_integral(density, a, c)
    parts = reciprocal_integral(density, a, b) + reciprocal_integral(density, b, c)
    assert whole == pytest.approx(parts, rel=1e-7)


@pytest.mark.parametrize(
    "density",
    [
        Uniform1D(lo=-2.0, hi=2.0),
        Gaussian(mean=(1.0,), variance=0.5),
        Laplace1D(location=-0.5, scale=2.0),
        GaussianKDE(centers=[-1.0, 0.0, 2.5], bandwidth=0.3),
    ],
)
def test_total_mass_is_one(density: Uniform1D | Gaussian | Laplace1D | GaussianKDE) -> None:
    assert total_mass(density) == pytest.approx(1.0, abs=1e-6)


def test_mixture_weights_must_sum_to_one() -> None:
    with pytest.raises(ValidationError):
        Mixture(
            components=(
                MixtureComponent(weight=0.5, density=Uniform1D(lo=0.0, hi=1.0)),
                MixtureComponent(weight=0.4, density=Uniform1D(lo=1.0, hi=2.0)),
            )
        )


def test_mixture_components_must_share_dimension() -> None:
    with pytest.raises(ValidationError):
        Mixture(
            components=(
                MixtureComponent(weight=0.5, density=Uniform1D(lo=0.0, hi=1.0)),
                MixtureComponent(weight=0.5, density=Gaussian(mean=(0.0, 0.0), variance=1.0)),
            )
        )


def test_uniform_requires_ordered_bounds() -> None:
    with pytest.raises(ValidationError):
        Uniform1D(lo=1.0, hi=1.0)


def test_pdf_rejects_wrong_dimension() -> None:
    density = Gaussian(mean=(0.0, 0.0), variance=1.0)
    with pytest.raises(DimensionMismatchError):
        density.pdf_values([[0.0, 0.0, 0.0]])


def test_density_json_round_trip(bimodal: Mixture, tmp_path) -> None:
    path = tmp_path / "density.json"
    path.write_text(json.dumps(dump_density(bimodal)), encoding="utf-8")
    loaded = load_density(path)
    assert loaded == bimodal
    assert parse_density(dump_density(bimodal)) == bimodal


def test_parse_density_rejects_unknown_kind() -> None:
    with pytest.raises(ValidationError):
        parse_density({"kind": "cauchy", "location": 0.0})
