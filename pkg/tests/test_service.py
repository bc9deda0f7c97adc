"""HTTP endpoints: happy paths, strict validation, error mapping."""

import numpy as np
import pytest
from fastapi.testclient import TestClient

from whittlemix.covariance import CovarianceSpec, acv_sequence
from whittlemix.design import DesignSpec, LinearTrend, SeasonalPair, build_design
from whittlemix.errors import FactorizationError, ParameterDomainError
from whittlemix.sampling import simulate_gaussian_process
from whittlemix.service.app import _status_for, create_app

client = TestClient(create_app(), raise_server_exceptions=False)

FAST_SETTINGS = {
    "design": [{"kind": "linear_trend"}, {"kind": "seasonal_pair"}],
    "profile_regression": True,
    "optimizer": {"restarts": 1, "maxiter": 3000, "seed": 5},
}


def make_values(n=96, missing_seed=3):
    alpha = CovarianceSpec("matern", c0=0.05, c1=1.0, lambda_m=10.0, nu=1.5)
    errors = simulate_gaussian_process(alpha, n, seed=7)
    design = DesignSpec((LinearTrend(), SeasonalPair(12.0)))
    x = build_design(design, n).values @ np.array([2.0, 1.0, -0.5]) + errors
    mask = np.random.default_rng(missing_seed).random(n) > 0.12
    mask[[0, n - 1]] = True
    return [float(v) if keep else None for v, keep in zip(x, mask)]


VALUES = make_values()


class TestHealthAndValidation:
    def test_health(self):
        body = client.get("/health").json()
        assert body["status"] == "ok"
        assert body["version"]

    def test_unknown_field_rejected(self):
        response = client.post("/fit", json={
            "series": {"values": [1.0, 2.0]}, "surprise": 1})
        assert response.status_code == 422

    def test_unknown_nested_field_rejected(self):
        response = client.post("/fit", json={
            "series": {"values": [1.0, 2.0]},
            "settings": {"optimizer": {"temperature": 0.7}}})
        assert response.status_code == 422

    def test_domain_error_status_mapping(self):
        assert _status_for(ParameterDomainError("x")) == 422
        assert _status_for(FactorizationError("x")) == 500


class TestFitEndpoint:
    def test_fit_happy_path(self):
        response = client.post("/fit", json={
            "series": {"values": VALUES}, "settings": FAST_SETTINGS})
        assert response.status_code == 200
        fit = response.json()["fit"]
        assert fit["method"] == "whittle"
        assert fit["converged"] is True
        assert set(fit["beta"]) == {"trend", "seasonal_sin", "seasonal_cos"}
        assert set(fit["covariance"]) == {"c0", "c1", "lambda_m", "nu"}
        assert fit["beta"]["trend"] == pytest.approx(2.0, abs=0.8)
        assert fit["optimizer"]["iterations"] > 0

    def test_invalid_design_combination_maps_to_422(self):
        settings = dict(FAST_SETTINGS)
        settings["design"] = [{"kind": "intercept"},
                              {"kind": "cyclic_splines", "count": 4}]
        response = client.post("/fit", json={
            "series": {"values": VALUES}, "settings": settings})
        assert response.status_code == 422
        body = response.json()
        assert body["error_type"] == "DesignError"
        assert body["message"]

    def test_aep_without_pinned_variance_maps_to_422(self):
        settings = dict(FAST_SETTINGS)
        settings = {**settings, "method": "aep_ml",
                    "profile_regression": False}
        response = client.post("/fit", json={
            "series": {"values": VALUES}, "settings": settings})
        assert response.status_code == 422
        assert response.json()["error_type"] == "ParameterDomainError"


class TestPredictionEndpoints:
    def test_fill_predicts_every_missing_time(self):
        response = client.post("/fill", json={
            "series": {"values": VALUES}, "settings": FAST_SETTINGS,
            "level": 0.9})
        assert response.status_code == 200
        body = response.json()
        missing = [i + 1 for i, v in enumerate(VALUES) if v is None]
        assert [row["time"] for row in body["predictions"]] == missing
        for row in body["predictions"]:
            assert row["variance"] >= 0.0
            assert row["lower"] <= row["mean"] <= row["upper"]

    def test_fill_is_deterministic(self):
        payload = {"series": {"values": VALUES}, "settings": FAST_SETTINGS}
        first = client.post("/fill", json=payload)
        second = client.post("/fill", json=payload)
        assert first.content == second.content

    def test_fill_with_no_missing_values_is_empty(self):
        values = [float(i % 7) + 10.0 for i in range(64)]
        response = client.post("/fill", json={
            "series": {"values": values}, "settings": FAST_SETTINGS})
        assert response.status_code == 200
        assert response.json()["predictions"] == []

    def test_forecast_targets_follow_the_sample(self):
        response = client.post("/forecast", json={
            "series": {"values": VALUES}, "settings": FAST_SETTINGS,
            "horizon": 6})
        assert response.status_code == 200
        times = [row["time"] for row in response.json()["predictions"]]
        assert times == [len(VALUES) + k for k in range(1, 7)]

    def test_forecast_variance_grows_toward_total(self):
        response = client.post("/forecast", json={
            "series": {"values": VALUES}, "settings": FAST_SETTINGS,
            "horizon": 60})
        body = response.json()
        variances = [row["variance"] for row in body["predictions"]]
        total = sum(body["fit"]["covariance"][k] for k in ("c0", "c1"))
        assert variances[-1] == pytest.approx(total, rel=0.05)
        assert variances[0] < variances[-1]


class TestDiagnoseEndpoint:
    def test_tables_have_expected_shape(self):
        response = client.post("/diagnose", json={
            "series": {"values": VALUES}, "settings": FAST_SETTINGS,
            "max_lag": 20})
        assert response.status_code == 200
        body = response.json()
        assert [row["lag"] for row in body["acv"]] == list(range(21))
        alpha = CovarianceSpec("matern", **body["fit"]["covariance"])
        expected = acv_sequence(alpha, 21)
        model = [row["model"] for row in body["acv"]]
        assert np.allclose(model, expected, rtol=1e-12)
        observed = sum(v is not None for v in VALUES)
        assert len(body["qq"]) == body["residual_count"] == observed
        quantiles = [row["residual"] for row in body["qq"]]
        assert quantiles == sorted(quantiles)
        assert set(body["marginal"]["params"]) == {
            "mu", "sigma", "varsigma", "p1", "p2"}

    def test_lag_zero_empirical_matches_residual_moment(self):
        response = client.post("/diagnose", json={
            "series": {"values": VALUES}, "settings": FAST_SETTINGS,
            "max_lag": 5})
        body = response.json()
        residuals = np.array([row["residual"] for row in body["qq"]])
        assert body["acv"][0]["empirical"] == pytest.approx(
            float(residuals @ residuals) / residuals.size)


class TestSimulateEndpoint:
    def test_small_study_runs(self):
        response = client.post("/simulate", json={"config": {
            "scenarios": [{"scenario": "standard_mixed", "n": 96,
                           "replicates": 2}],
            "methods": ["two_stage"], "base_seed": 42,
            "optimizer": {"restarts": 1, "maxiter": 1500},
        }})
        assert response.status_code == 200
        body = response.json()
        metrics = {row["metric"] for row in body["rows"]}
        assert {"alpha_relative_error", "beta_relative_error",
                "irf_divergence", "missing_rmse", "wall_seconds",
                "converged"} == metrics
        assert body["failures"] == []
        assert any(group["metric"] == "missing_rmse"
                   for group in body["groups"])
        assert body["gap"] is None

    def test_simulated_gap_study(self):
        arm = {"method": "two_stage", "covariance": {"family": "matern"}}
        other = {"method": "two_stage",
                 "covariance": {"family": "exponential"}}
        response = client.post("/simulate", json={"config": {
            "scenarios": [{"scenario": "standard_mixed", "n": 96,
                           "replicates": 1}],
            "methods": ["two_stage"], "base_seed": 1,
            "optimizer": {"restarts": 1, "maxiter": 1500},
            "gap": {"run": True, "scenario": "standard_mixed", "n": 96,
                    "missing_fraction": 0.0, "repeats": 2,
                    "plans": [{"gaps": 3, "width": 1}],
                    "candidate": arm, "baseline": other},
        }})
        assert response.status_code == 200
        gap = response.json()["gap"]
        assert gap["candidate"] == "two_stage-matern"
        assert gap["baseline"] == "two_stage-exponential"
        assert [row["plan"] for row in gap["rows"]] == ["3x1"]
        rmse = gap["rows"][0]["rmse"]
        assert set(rmse) == {"two_stage-matern", "two_stage-exponential"}
        assert all(value > 0.0 for value in rmse.values())


class TestGapExperimentEndpoint:
    def test_identical_arms_report_zero_reduction(self):
        arm = {"method": "two_stage"}
        response = client.post("/gap-experiment", json={
            "series": {"values": make_values(n=120, missing_seed=9)},
            "design": FAST_SETTINGS["design"],
            "candidate": arm, "baseline": arm,
            "optimizer": {"restarts": 1, "maxiter": 1500, "seed": 2},
            "plans": [{"gaps": 3, "width": 1}, {"gaps": 2, "width": 2}],
            "repeats": 3, "seed": 8})
        assert response.status_code == 200
        body = response.json()
        result = body["result"]
        assert result["candidate"] == "two_stage-matern (candidate)"
        assert result["baseline"] == "two_stage-matern (baseline)"
        for row in result["rows"]:
            assert row["reduction_percent"] == 0.0
            values = list(row["rmse"].values())
            assert values[0] == values[1]
        assert set(body["fits"]) == {result["candidate"],
                                     result["baseline"]}
