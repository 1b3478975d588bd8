import math
import warnings

import numpy as np
import pytest

with warnings.catch_warnings():
    warnings.simplefilter("ignore", DeprecationWarning)
    from fastapi.testclient import TestClient

from qobserver import __version__
from qobserver.service import app


@pytest.fixture(scope="module")
def client():
    with TestClient(app) as c:
        yield c


DESIGN_BODY = {
    "plant": {"C_p": [1.0, 0.0], "x_p0_mean": [1.0, 0.0]},
    "observer": {"beta": [0.0, 1.0], "omega_o": 0.0, "kappa": 1.0},
}


def test_health(client):
    r = client.get("/health")
    assert r.status_code == 200
    assert r.json() == {"status": "ok", "version": __version__}


class TestDesignEndpoint:
    def test_reference_design(self, client):
        r = client.post("/design", json=DESIGN_BODY)
        assert r.status_code == 200
        body = r.json()
        assert body["schema_version"] == 1
        assert np.allclose(body["e"], [4.0, 0.0])
        assert np.allclose(body["K"], [0.25, 0.0])
        assert body["noise_intensity"] == pytest.approx(0.0625)
        assert body["time_constant"] == pytest.approx(2.0)
        assert body["realizability"]["passed"] is True

    def test_validation_error_maps_to_422(self, client):
        bad = {"plant": DESIGN_BODY["plant"],
               "observer": {"beta": [0.0, 1.0], "kappa": -1.0}}
        r = client.post("/design", json=bad)
        assert r.status_code == 422
        assert "greater than 0" in str(r.json()["detail"])

    def test_unobservable_plant_maps_to_422(self, client):
        bad = {"plant": DESIGN_BODY["plant"],
               "observer": {"beta": [0.0, 0.0], "kappa": 1.0}}
        r = client.post("/design", json=bad)
        assert r.status_code == 422
        assert "unobservable" in r.json()["detail"]


class TestSimulateEndpoint:
    def test_small_run_with_paths(self, client):
        body = dict(DESIGN_BODY)
        body["sim"] = {"dt": 0.05, "t_final": 2.0, "seed": 7, "n_trajectories": 3,
                      "method": "exact"}
        r = client.post("/simulate", json=body)
        assert r.status_code == 200
        out = r.json()
        assert out["stats"]["n_trajectories"] == 3
        assert out["zp_max_drift"] <= 1e-10
        assert len(out["trajectories"]) == 3
        t0 = out["trajectories"][0]
        assert len(t0["times"]) == len(t0["z_o"]) == 41
        assert t0["q_p"][0] == 1.0 and t0["p_p"][0] == 0.0

    def test_store_paths_false_omits_trajectories(self, client):
        body = dict(DESIGN_BODY)
        body["sim"] = {"dt": 0.05, "t_final": 2.0, "seed": 7}
        body["store_paths"] = False
        out = client.post("/simulate", json=body).json()
        assert "trajectories" not in out

    def test_step_guard_maps_to_422(self, client):
        body = dict(DESIGN_BODY)
        body["sim"] = {"dt": 0.5, "t_final": 2.0, "seed": 0}
        r = client.post("/simulate", json=body)
        assert r.status_code == 422
        assert "step-size guard" in r.json()["detail"]

    def test_same_seed_same_estimates(self, client):
        body = dict(DESIGN_BODY)
        body["sim"] = {"dt": 0.05, "t_final": 5.0, "seed": 42, "n_trajectories": 2,
                      "burn_in": 1.0}
        a = client.post("/simulate", json=body).json()
        b = client.post("/simulate", json=body).json()
        assert a["stats"] == b["stats"]


class TestSynthesizeEndpoint:
    def test_reference_synthesis(self, client):
        body = {"epsilon": [1.0, 0.0], "phi": 0.0,
                "kappa1": 4.0, "kappa2": 4.0, "kappa3": 4.0}
        r = client.post("/synthesize", json=body)
        assert r.status_code == 200
        out = r.json()
        assert out["params"]["theta"] == pytest.approx(2.0 * math.atan(4.0))
        assert np.allclose(out["K"], [0.25, 0.0])
        assert out["realizability_passed"] is True

    def test_infeasible_theta_maps_to_409(self, client):
        body = {"epsilon": [1.0, 0.0], "phi": 0.0,
                "kappa1": 4.0, "kappa2": 4.0, "kappa3": 4.0, "theta": 1.0}
        r = client.post("/synthesize", json=body)
        assert r.status_code == 409
        detail = r.json()["detail"]
        assert "rank-one" in detail["message"]
        assert detail["residual"] > 0.0

    def test_zero_epsilon_rejected_by_schema(self, client):
        body = {"epsilon": [0.0, 0.0], "phi": 0.0,
                "kappa1": 1.0, "kappa2": 1.0, "kappa3": 1.0}
        assert client.post("/synthesize", json=body).status_code == 422


class TestVerifyEndpoint:
    def test_all_checks_pass(self, client):
        r = client.post("/verify", json=DESIGN_BODY)
        assert r.status_code == 200
        out = r.json()
        assert out["passed"] is True
        names = {c["name"] for c in out["checks"]}
        assert {"realizability", "allpass", "unit_gain_constraint",
                "cauchy_schwarz_equality", "K_optimality", "steady_state_mean",
                "steady_state_covariance", "zp_invariance"} <= names
        assert all(c["passed"] for c in out["checks"])
        assert out["tradeoff"]["monotone"] is True

    def test_perturbed_drift_fails_realizability(self, client):
        body = dict(DESIGN_BODY)
        body["A_perturbation"] = [[0.1, 0.0], [0.0, 0.0]]
        out = client.post("/verify", json=body).json()
        assert out["passed"] is False
        realizability = next(c for c in out["checks"] if c["name"] == "realizability")
        assert not realizability["passed"]
        assert realizability["metric"] == pytest.approx(0.1)


class TestCurveEndpoint:
    def test_default_grid(self, client):
        r = client.post("/curve", json={})
        assert r.status_code == 200
        out = r.json()
        assert len(out["theta"]) == len(out["f"]) == 1000
        assert out["strictly_decreasing"] is True

    def test_known_value(self, client):
        out = client.post("/curve", json={"theta_min": math.pi / 2,
                                          "theta_max": math.pi, "n_points": 2}).json()
        assert out["f"][0] == pytest.approx(1.0, abs=1e-12)
        assert out["f"][1] == pytest.approx(0.0, abs=1e-12)

    def test_bounds_validated(self, client):
        assert client.post("/curve", json={"theta_min": -1.0}).status_code == 422
        assert client.post("/curve", json={"theta_max": 7.0}).status_code == 422
