import math

import numpy as np
import pytest

import steinpairs as sp


def test_version():
    assert sp.__version__


def test_haar_sampler_orthogonality():
    rng = sp.RngStream(1)
    m = sp.sample_orthogonal(8, rng)
    assert np.max(np.abs(m @ m.T - np.eye(8))) < 1e-12
    u = sp.sample_unitary(6, rng)
    assert np.max(np.abs(u @ u.conj().T - np.eye(6))) < 1e-12


def test_moment_oracle_values():
    assert sp.moment_oracle("O:u(1,1)u(1,1)@n=6") == pytest.approx(1 / 6)
    assert sp.moment_oracle("O:u(1,1)u(1,1)u(1,1)u(1,1)@n=6") == pytest.approx(3 / 48)
    assert sp.moment_oracle("U:h(1,1)h(2,2)h*(1,1)h*(2,2)@n=6") == pytest.approx(1 / 35)
    est = sp.mc_moment_estimate("O:u(1,1)u(1,1)@n=4", 5000, seed=3, threads=2)
    assert abs(est["estimate"] - 0.25) <= 4 * est["se"]
    assert len(sp.haar_battery_queries()) == 30


def test_matrix_core():
    a = np.array([[1.0, 2.0], [3.0, 4.0]])
    b = np.array([[0.0, 1.0], [1.0, 0.0]])
    assert sp.hs_inner(a, b) == pytest.approx(5.0)
    assert sp.op_norm(np.diag([3.0, 1.0])) == pytest.approx(3.0)
    q, r = sp.qr_decompose(a)
    assert np.max(np.abs(q @ r - a)) < 1e-10
    fam, d = sp.gram_schmidt_hs([a, b], math.sqrt(2.0))
    assert sp.hs_inner(fam[0], fam[1]) == pytest.approx(0.0, abs=1e-12)
    assert d.shape == (2, 2)


def test_pair_audit():
    model = sp.make_iid_sum_pair("gaussian", k=2, n=20)
    audit = sp.audit_pair(model, 20000, 0.0, seed=5, threads=2)
    slope = np.array(audit["slope_matrix"])
    assert np.max(np.abs(slope + np.eye(2))) < 0.1
    assert audit["model"] == "iid_sum"

    mats = sp.random_orthonormal_family(2, 20, seed=8)
    proj = sp.make_orthogonal_projection_pair(mats)
    audit2 = sp.audit_pair(proj, 5000, 1e-3, seed=9, threads=2)
    assert np.max(np.abs(np.array(audit2["slope_matrix"]) + np.eye(2))) < 0.05


def test_bounds():
    assert sp.bound_uthm(2, 20)["value"] == pytest.approx(0.3)
    rep = sp.bound_mix(2, 50, 50.0 * np.eye(2), 50.0)
    assert rep["value"] == pytest.approx(math.sqrt(2) * 2 / 49)
    assert rep["inputs"]["c_op_norm"]["provenance"] == "analytic"


def test_stein_solver():
    sol = sp.make_stein_solution("linear", 2, nodes=32, samples=5000, seed=11)
    residuals = sp.stein_residual(sol, [np.array([0.3, -0.8])])
    assert abs(residuals[0]) < 0.05
    h, grad, hess = sp.stein_evaluate(sol, np.array([1.0, 0.0]))
    assert np.max(np.abs(hess)) < 1e-10
    est, se = sp.characterizing_check("quadratic", 2, 20000, seed=12)
    assert abs(est) <= 4 * se


def test_transport():
    a = np.array([[1.0, 2.0]])
    b = np.array([[4.0, 6.0]])
    assert sp.w1_exact(a, b) == pytest.approx(5.0)
    rng = sp.RngStream(13)
    x = np.array([[rng.normal() for _ in range(2)] for _ in range(64)])
    y = np.array([[rng.normal() for _ in range(2)] for _ in range(64)])
    assert sp.w1_sliced_lb(x, y, 16, seed=14) <= sp.w1_exact(x, y) + 1e-12
    mean, se = sp.gaussian_self_distance(2, 128, 3, seed=15)
    assert mean > 0


def test_run_experiment():
    report, ok = sp.run_experiment("experiment=bound\ntheorem=uthm\nk=2\nn=20")
    assert ok
    assert report["results"]["bound"]["value"] == pytest.approx(0.3)
    assert report["config"]["seed"] == "20240101"
