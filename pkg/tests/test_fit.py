"""
Tests for weighted-least-squares variogram fitting.
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from hocov.core.errors import DataError, DomainError, UndefinedObjectiveError
from hocov.schemas.data import Dataset, EmpiricalVariogram
from hocov.schemas.fit import FitProblem
from hocov.schemas.models import CovarianceModel, ModelFamily, ParameterVector
from hocov.services.fit import (
    default_bounds,
    fit,
    global_search,
    local_polish,
    make_problem,
    wls_objective,
    wls_terms,
)

E = math.e
CENTERS = [(k + 0.5) * 10.0 / 15.0 for k in range(15)]


def empirical(estimates, counts, centers=None) -> EmpiricalVariogram:
    centers = centers or [float(i + 1) for i in range(len(estimates))]
    return EmpiricalVariogram(
        bin_centers=centers,
        estimates=estimates,
        counts=counts,
        max_lag=centers[-1] + 0.5,
        n_bins=len(centers),
    )


def constant_model_problem(emp: EmpiricalVariogram) -> FitProblem:
    """A hole-effect problem with zero sill, so gamma(h) = nugget = 2e for h > 0."""
    return FitProblem(
        family=ModelFamily.HOLE_EFFECT,
        empirical=emp,
        fixed_params={"nugget": 2 * E, "sill": 0.0, "range": 1.0},
    )


def sine_cosine_problem(synthetic_variogram, sine_cosine_model) -> FitProblem:
    emp = synthetic_variogram(sine_cosine_model, CENTERS, [10] * len(CENTERS))
    return make_problem(
        ModelFamily.SINE_COSINE,
        emp,
        free=["sill", "range"],
        fixed={"nugget": 0.0},
        bounds={"sill": (0.01, 5.0), "range": (0.5, 8.0)},
    )


class TestObjective:
    """Test the WLS objective."""

    def test_single_bin(self):
        """Test Q = (log 4 - log 4e)^2 * 4 / 2 = 2."""
        problem = constant_model_problem(empirical([2.0], [4]))
        assert wls_objective(problem, ParameterVector(nugget=2 * E, sill=0.0)) == pytest.approx(
            2.0, rel=1e-13
        )

    def test_three_bins_by_hand(self):
        """Test residuals -1, 0, 1 with counts 4, 7, 6, giving Q = 2 + 0 + 3."""
        problem = constant_model_problem(empirical([2.0, 2 * E, 2 * E * E], [4, 7, 6]))
        theta = ParameterVector(nugget=2 * E, sill=0.0)
        assert wls_objective(problem, theta) == pytest.approx(5.0, rel=1e-13)

    def test_perfect_fit_is_zero(self, synthetic_variogram, sine_cosine_model):
        """Test that Q vanishes at the generating parameters."""
        problem = sine_cosine_problem(synthetic_variogram, sine_cosine_model)
        assert wls_objective(problem, sine_cosine_model.theta) == 0.0

    def test_doubling_counts_doubles_objective(self):
        """Test linearity of Q in the bin counts."""
        estimates = [0.3, 0.9, 1.4, 1.1]
        base = constant_model_problem(empirical(estimates, [3, 5, 8, 2]))
        doubled = constant_model_problem(empirical(estimates, [6, 10, 16, 4]))
        theta = ParameterVector(nugget=2 * E, sill=0.0)
        assert wls_objective(doubled, theta) == 2.0 * wls_objective(base, theta)

    def test_additive_over_bins(self):
        """Test that Q is the sum of its single-bin contributions."""
        estimates, counts = [0.3, 0.9, 1.4], [3, 5, 8]
        theta = ParameterVector(nugget=2 * E, sill=0.0)
        whole = wls_objective(constant_model_problem(empirical(estimates, counts)), theta)
        parts = [
            wls_objective(constant_model_problem(empirical([g], [n], [c])), theta)
            for g, n, c in zip(estimates, counts, [1.0, 2.0, 3.0])
        ]
        assert whole == pytest.approx(math.fsum(parts), rel=1e-15)

    def test_zero_estimates_excluded(self):
        """Test that bins with gamma_hat = 0 drop out."""
        problem = constant_model_problem(empirical([0.0, 2.0, 0.0], [5, 4, 9]))
        terms = wls_terms(problem, ParameterVector(nugget=2 * E, sill=0.0))
        assert terms.excluded == 2
        assert terms.value == pytest.approx(2.0, rel=1e-13)

    def test_all_bins_excluded(self):
        """Test that a vanishing model leaves the objective undefined."""
        problem = constant_model_problem(empirical([1.0, 2.0], [3, 3]))
        with pytest.raises(UndefinedObjectiveError):
            wls_objective(problem, ParameterVector(nugget=0.0, sill=0.0))


class TestFitProblem:
    """Test problem validation."""

    def test_missing_bounds(self):
        """Test that every free parameter needs bounds."""
        with pytest.raises(ValidationError):
            FitProblem(
                family=ModelFamily.HOLE_EFFECT,
                empirical=empirical([1.0], [2]),
                free_params=["sill"],
                fixed_params={"nugget": 0.0, "range": 1.0},
            )

    def test_partition(self):
        """Test that parameters are free or fixed, not both and not neither."""
        with pytest.raises(ValidationError):
            FitProblem(
                family=ModelFamily.HOLE_EFFECT,
                empirical=empirical([1.0], [2]),
                free_params=["sill"],
                fixed_params={"sill": 1.0, "nugget": 0.0, "range": 1.0},
                bounds={"sill": (0.1, 2.0)},
            )
        with pytest.raises(ValidationError):
            FitProblem(
                family=ModelFamily.HOLE_EFFECT,
                empirical=empirical([1.0], [2]),
                fixed_params={"nugget": 0.0},
            )

    def test_range_bound_positive(self):
        """Test that the range box excludes zero."""
        with pytest.raises(ValidationError):
            make_problem(
                ModelFamily.HOLE_EFFECT,
                empirical([1.0], [2]),
                free=["range"],
                fixed={"nugget": 0.0, "sill": 1.0},
                bounds={"range": (0.0, 5.0)},
            )


class TestStages:
    """Test the global and local stages separately."""

    def test_global_search(self, synthetic_variogram, sine_cosine_model):
        """Test that DIRECT-L gets close to a noise-free optimum."""
        problem = sine_cosine_problem(synthetic_variogram, sine_cosine_model)
        theta, value = global_search(problem, budget=1000)

        assert value < 1e-2
        assert value == wls_objective(problem, theta)
        assert 0.01 <= theta.sill <= 5.0
        assert 0.5 <= theta.range <= 8.0

    def test_global_budget_too_small(self, synthetic_variogram, sine_cosine_model):
        """Test that the budget must cover n_free + 1 evaluations."""
        problem = sine_cosine_problem(synthetic_variogram, sine_cosine_model)
        with pytest.raises(DomainError):
            global_search(problem, budget=2)

    def test_local_polish_recovers_parameters(self, synthetic_variogram, sine_cosine_model):
        """Test recovery within 1% after the global stage."""
        problem = sine_cosine_problem(synthetic_variogram, sine_cosine_model)
        theta_bar, value = global_search(problem, budget=1000)
        result = local_polish(problem, theta_bar)

        assert result.objective <= value
        assert result.theta_hat.sill == pytest.approx(1.0, rel=1e-2)
        assert result.theta_hat.range == pytest.approx(2.0, rel=1e-2)
        assert result.theta_hat.nugget == 0.0
        assert all(entry.stage == "local" for entry in result.trace)

    def test_local_polish_start_outside_bounds(self, synthetic_variogram, sine_cosine_model):
        """Test that the start must lie in the box."""
        problem = sine_cosine_problem(synthetic_variogram, sine_cosine_model)
        with pytest.raises(DomainError):
            local_polish(problem, ParameterVector(nugget=0.0, sill=9.0, range=2.0))


class TestFit:
    """Test the two-stage pipeline."""

    def test_sine_cosine_recovery(self, synthetic_variogram, sine_cosine_model):
        """Test the full pipeline on a noise-free variogram."""
        problem = sine_cosine_problem(synthetic_variogram, sine_cosine_model)
        result = fit(problem)

        assert result.objective <= result.global_stage_value
        assert result.theta_hat.sill == pytest.approx(1.0, rel=1e-2)
        assert result.theta_hat.range == pytest.approx(2.0, rel=1e-2)
        assert result.evaluations == result.global_evaluations + result.local_evaluations
        assert result.global_evaluations <= 1000
        assert result.sigma == pytest.approx(math.sqrt(result.theta_hat.sill))
        stages = [entry.stage for entry in result.trace]
        assert stages[0] == "global"
        assert "local" in stages

    def test_deterministic(self, synthetic_variogram, sine_cosine_model):
        """Test that repeated fits are identical."""
        problem = sine_cosine_problem(synthetic_variogram, sine_cosine_model)
        first = fit(problem, global_budget=200, local_max_evals=100)
        second = fit(problem, global_budget=200, local_max_evals=100)
        assert first == second

    def test_all_fixed(self, synthetic_variogram, sine_cosine_model):
        """Test that a problem without free parameters evaluates Q once."""
        emp = synthetic_variogram(sine_cosine_model, CENTERS)
        problem = make_problem(
            ModelFamily.SINE_COSINE,
            emp,
            free=[],
            fixed={"nugget": 0.0, "sill": 1.0, "range": 2.0},
            bounds={},
        )
        result = fit(problem)

        assert result.theta_hat == sine_cosine_model.theta
        assert result.objective == 0.0
        assert result.evaluations == 1
        assert [entry.stage for entry in result.trace] == ["fixed"]

    @pytest.mark.integration
    @pytest.mark.slow
    @pytest.mark.parametrize(
        "family, r, s",
        [
            (ModelFamily.GAUSSIAN_HO, 2, 0),
            (ModelFamily.BESSEL_C1, 1, 2),
            (ModelFamily.MULLER_C2, 2, 1),
            (ModelFamily.HOLE_EFFECT, 1, 0),
            (ModelFamily.SINE_COSINE, 1, 0),
            (ModelFamily.COSINE_EXPONENTIAL, 1, 0),
        ],
    )
    def test_recovery_for_every_family(self, synthetic_variogram, family, r, s):
        """Test parameter recovery from noise-free variograms of each family."""
        decay = 6.0 if family is ModelFamily.COSINE_EXPONENTIAL else None
        truth = CovarianceModel(
            family=family,
            r=r,
            s=s,
            theta=ParameterVector(nugget=0.0, sill=2.0, range=1.5, decay=decay),
        )
        emp = synthetic_variogram(truth, CENTERS)
        free = ["sill", "range"] + (["decay"] if decay else [])
        bounds = {"sill": (0.01, 20.0), "range": (0.1, 10.0), "decay": (0.5, 30.0)}
        problem = make_problem(family, emp, free, {"nugget": 0.0}, bounds, r=r, s=s)

        result = fit(problem)

        assert result.theta_hat.sill == pytest.approx(2.0, rel=1e-2)
        assert result.theta_hat.range == pytest.approx(1.5, rel=1e-2)
        if decay:
            assert result.theta_hat.decay == pytest.approx(6.0, rel=1e-2)


class TestDefaultBounds:
    """Test data-driven search boxes."""

    def test_scales(self, collinear_dataset):
        """Test the variance and distance scaling."""
        bounds = default_bounds(collinear_dataset, ModelFamily.SINE_COSINE, ["sill", "range", "nugget"])
        variance = 1.0 / 3.0

        assert bounds["sill"] == pytest.approx((1e-6 * variance, 10.0 * variance))
        assert bounds["nugget"] == pytest.approx((0.0, 10.0 * variance))
        assert bounds["range"] == (1.0, 2.0)
        assert list(bounds) == ["sill", "range", "nugget"]

    def test_unknown_parameter(self, collinear_dataset):
        """Test that decay has no box outside the cosine-exponential family."""
        with pytest.raises(DomainError):
            default_bounds(collinear_dataset, ModelFamily.SINE_COSINE, ["decay"])

    def test_constant_data(self):
        """Test that constant values give no variance scale."""
        data = Dataset(dim=1, locations=[(0.0,), (1.0,), (3.0,)], values=[2.0, 2.0, 2.0])
        with pytest.raises(DataError):
            default_bounds(data, ModelFamily.HOLE_EFFECT, ["sill"])

    def test_bounds_feed_a_fit(self, simulated_dataset):
        """Test that default boxes give a valid problem for simulated data."""
        from hocov.services.variogram import empirical_variogram

        emp = empirical_variogram(simulated_dataset, n_bins=10)
        bounds = default_bounds(simulated_dataset, ModelFamily.SINE_COSINE, ["sill", "range"])
        problem = make_problem(ModelFamily.SINE_COSINE, emp, ["sill", "range"], {"nugget": 0.0}, bounds)
        result = fit(problem, global_budget=300, local_max_evals=200)

        assert np.isfinite(result.objective)
        assert bounds["sill"][0] <= result.theta_hat.sill <= bounds["sill"][1]
        assert bounds["range"][0] <= result.theta_hat.range <= bounds["range"][1]
