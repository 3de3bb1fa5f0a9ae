"""
Tests for resource sweeps, model fitting and extrapolation.
"""

import math

import numpy as np
import pytest

from svp_oracle.errors import FitError, InvalidInputError
from svp_oracle.estimate import (
    FAMILY_TERMS,
    METRIC_FAMILY,
    REFERENCE_DIMS,
    REFERENCE_ORACLE_COUNTS,
    Extrapolation,
    Family,
    FitModel,
    asymptotic_slope,
    extrapolate,
    extrapolation_report,
    fit,
    fit_metric,
    fit_report,
    loglog_slope,
    points_from_report,
    random_basis,
    reference_cross_check,
    reference_prediction,
    sweep,
    sweep_point,
    sweep_report,
)

NS = [2, 3, 4, 5, 6, 8, 10, 12]


def _space_values(ns):
    return [3 * n * n * math.log2(n) + 5 * n + 7 for n in ns]


class TestFamilies:
    """Test model family definitions."""

    def test_term_counts(self):
        """Test the number of terms per family."""
        assert len(FAMILY_TERMS[Family.SPACE]) == 6
        assert len(FAMILY_TERMS[Family.TIME]) == 9
        assert len(FAMILY_TERMS[Family.COST]) == 12

    def test_metric_mapping(self):
        """Test each metric maps to its family."""
        assert METRIC_FAMILY["width"] == Family.SPACE
        assert METRIC_FAMILY["t_depth"] == Family.TIME
        assert METRIC_FAMILY["t_count"] == Family.COST


class TestFit:
    """Test least-squares fitting."""

    def test_recovers_coefficients(self):
        """Test an exact family member is recovered."""
        model = fit(NS, _space_values(NS), Family.SPACE, "width")
        expected = dict(zip(model.terms, (3.0, 0.0, 0.0, 0.0, 5.0, 7.0)))
        for label, coef in zip(model.terms, model.coefficients):
            assert coef == pytest.approx(expected[label], abs=1e-4)
        assert model.r_squared == pytest.approx(1.0)
        assert not model.poor
        assert (model.n_min, model.n_max) == (2, 12)

    def test_predict(self):
        """Test predictions outside the fitted range."""
        model = fit(NS, _space_values(NS), Family.SPACE)
        assert model.predict(20) == pytest.approx(_space_values([20])[0], rel=1e-6)

    def test_too_few_points(self):
        """Test fewer points than terms raise."""
        with pytest.raises(FitError):
            fit([2, 3, 4], [1, 2, 3], Family.SPACE)

    def test_rank_deficient(self):
        """Test repeated dimensions raise."""
        with pytest.raises(FitError):
            fit([4] * 6, [1, 2, 3, 4, 5, 6], Family.SPACE)

    def test_poor_fit_flagged(self):
        """Test exponential data is flagged as a poor fit."""
        ns = [2, 3, 4, 6, 8, 10, 12, 14, 16, 18, 20]
        model = fit(ns, [2.0**n for n in ns], Family.SPACE)
        assert model.poor

    def test_report_round_trip(self):
        """Test a fit report rebuilds the same model."""
        model = fit(NS, _space_values(NS), Family.SPACE, "width")
        rebuilt = FitModel.from_report(fit_report(model))
        assert rebuilt.coefficients == model.coefficients
        assert rebuilt.metric == "width"
        assert (rebuilt.n_min, rebuilt.n_max) == (2, 12)


class TestSlopes:
    """Test log-log slopes."""

    def test_cubic(self):
        """Test n³ has slope 3."""
        assert loglog_slope([2, 4, 8], [8, 64, 512]) == pytest.approx(3.0)

    def test_asymptotic(self):
        """Test the leading cost term n³·log²n between 2 and 4."""
        assert asymptotic_slope("quantum_cost", 2, 4) == pytest.approx(5.0)


class TestReferenceData:
    """Test published reference values."""

    def test_shapes(self):
        """Test one reference count per reference dimension."""
        for counts in REFERENCE_ORACLE_COUNTS.values():
            assert len(counts) == len(REFERENCE_DIMS)

    def test_width_natural_log(self):
        """Test the published width fit at n=186 under the natural log."""
        assert reference_prediction("width", 186, math.log) == pytest.approx(6.32e5, rel=5e-3)

    def test_cross_check(self):
        """Test both log readings are reported."""
        check = reference_cross_check(186)
        assert set(check) == {"width", "depth", "quantum_cost", "t_count"}
        assert check["width"]["log2"] > check["width"]["ln"]


class TestSweep:
    """Test resource sweeps."""

    def test_random_basis_seeded(self):
        """Test the same seed gives the same full-rank basis."""
        a = random_basis(4, seed=11)
        b = random_basis(4, seed=11)
        assert a == b
        assert a.is_full_rank
        assert all(-10 <= v <= 10 for row in a.rows for v in row)

    def test_random_basis_varies_with_n(self):
        """Test different dimensions draw independent streams."""
        assert random_basis(3, seed=11) != random_basis(3, seed=12)

    def test_sweep_point_dimension_two(self):
        """Test the smallest sweep point."""
        point = sweep_point(2, seed=5)
        assert point.total_input_bits == 2
        assert point.N == 4
        assert point.iterations == 1
        assert point.metrics.width > 0
        assert point.grover_totals.width >= point.metrics.width

    def test_sweep_point_without_grover(self):
        """Test the Grover totals can be skipped."""
        assert sweep_point(2, seed=5, grover=False).grover_totals is None

    def test_dimension_one_rejected(self):
        """Test dimension 1 is outside the sweep."""
        with pytest.raises(ValueError):
            sweep_point(1)

    def test_dims_must_ascend(self):
        """Test unsorted dimensions raise."""
        with pytest.raises(ValueError):
            sweep([3, 2])

    def test_report_round_trip(self):
        """Test sweep points survive a report round trip."""
        points = sweep([2, 3], seed=5)
        rebuilt = points_from_report(sweep_report(points))
        assert [p.n for p in rebuilt] == [2, 3]
        assert rebuilt[1].metrics == points[1].metrics
        assert rebuilt[1].iterations == points[1].iterations

    def test_metric_grows(self):
        """Test width grows with dimension."""
        points = sweep([2, 3, 4], seed=5)
        widths = [p.value("width") for p in points]
        assert widths == sorted(widths)

    @pytest.mark.slow
    def test_fit_sweep(self):
        """Test a space fit over a small sweep."""
        points = sweep([2, 3, 4, 5, 6, 8, 10, 12], seed=5)
        model = fit_metric(points, "width")
        assert model.r_squared > 0.99

    @pytest.mark.slow
    def test_scaling_between_25_and_50(self):
        """Test width grows like n² log n and quantum cost stays polynomial from n=25 to n=50."""
        points = sweep([25, 50], grover=False)
        ns = [p.n for p in points]
        width_slope = loglog_slope(ns, [p.value("width") for p in points])
        cost_slope = loglog_slope(ns, [p.value("quantum_cost") for p in points])
        assert 2.0 <= width_slope <= 2.6
        assert 1.6 <= cost_slope <= 2.6

    @pytest.mark.slow
    def test_published_counts_order_of_magnitude(self):
        """Test counts at n=10, 20 and 30 stay within a factor 10 of the published oracle counts."""
        for p in sweep([10, 20, 30], grover=False):
            column = REFERENCE_DIMS.index(p.n)
            for metric in ("width", "quantum_cost", "t_count"):
                ratio = p.value(metric) / REFERENCE_ORACLE_COUNTS[metric][column]
                assert 0.1 <= ratio <= 10, (p.n, metric, ratio)


class TestExtrapolation:
    """Test extrapolation to large dimensions."""

    def test_grover_total(self):
        """Test the total is the rounded per-iteration value times k."""
        result = Extrapolation(186, "quantum_cost", 900.0, 7, per_iteration_value=1000.4)
        assert result.grover_total == 7000
        assert result.log2_grover_total == pytest.approx(math.log2(1000.4) + math.log2(7))

    def test_width_not_repeated(self):
        """Test the width total is the per-iteration width."""
        result = Extrapolation(186, "width", 900.0, 7, per_iteration_value=1000.4)
        assert result.grover_total == 1000
        assert result.log2_grover_total == pytest.approx(math.log2(1000.4))

    def test_extrapolate(self):
        """Test extrapolating an oracle fit together with a per-iteration fit."""
        model = fit(NS, _space_values(NS), Family.SPACE, "width")
        per_iteration = fit(NS, [2 * v for v in _space_values(NS)], Family.SPACE, "width")
        per_iteration.per_iteration = True
        result = extrapolate(model, 186, per_iteration=per_iteration)
        assert result.oracle_value == pytest.approx(_space_values([186])[0], rel=1e-4)
        assert result.per_iteration_value == pytest.approx(2 * _space_values([186])[0], rel=1e-4)
        assert result.iterations > 10**100
        report = extrapolation_report(result)
        assert report["k"] == str(result.iterations)
        assert report["grover_total"] == str(round(result.per_iteration_value))
        assert report["reference"]["ln"] == pytest.approx(6.32e5, rel=5e-3)

    def test_without_per_iteration_fit(self):
        """Test no Grover total is reported without a per-iteration fit."""
        result = extrapolate(fit(NS, _space_values(NS), Family.SPACE, "width"), 186)
        assert result.grover_total is None
        assert extrapolation_report(result)["grover_total"] is None

    def test_at_largest_sweep_dimension(self):
        """Test extrapolating at the largest fitted dimension returns the fit value."""
        model = fit(NS, _space_values(NS), Family.SPACE)
        assert extrapolate(model, 12).oracle_value == pytest.approx(_space_values([12])[0], rel=1e-6)

    def test_below_largest_sweep_dimension(self):
        """Test a target below the largest fitted dimension raises."""
        model = fit(NS, _space_values(NS), Family.SPACE)
        with pytest.raises(InvalidInputError):
            extrapolate(model, 10)

    def test_oracle_fit_as_per_iteration_rejected(self):
        """Test an oracle fit cannot stand in for a per-iteration fit."""
        model = fit(NS, _space_values(NS), Family.SPACE, "depth")
        with pytest.raises(InvalidInputError):
            extrapolate(model, 186, per_iteration=model)

    def test_per_iteration_fit_from_sweep(self):
        """Test per-iteration counts exceed oracle counts and survive a report round trip."""
        points = points_from_report(sweep_report(sweep([2, 3], seed=5, grover=False)))
        for p in points:
            assert p.value("quantum_cost", per_iteration=True) > p.value("quantum_cost")
        with pytest.raises(FitError):
            fit_metric(points, "width", per_iteration=True)

    def test_missing_per_iteration_metrics(self):
        """Test fitting per-iteration counts of an old sweep report raises."""
        points = sweep([2], seed=5, grover=False)
        points[0].per_iteration = None
        with pytest.raises(FitError):
            points[0].value("width", per_iteration=True)

    def test_published_width_at_400(self):
        """Test the published width fit at n=400 lands within a factor 2 of 3.3e6 in one log reading."""
        check = reference_cross_check(400)["width"]
        assert any(0.5 <= value / 3.3e6 <= 2 for value in check.values())
