"""First-order ARMA/VARMA estimation, forecasting, and the MSE harness.

Estimator checks are seeded simulate-and-refit runs; forecast and residual
checks compare against the defining recursions computed with explicit loops.
"""

import numpy as np
import pytest

from comove.varma import (
    ArmaModel,
    VarmaModel,
    evaluate_mse,
    fit_arma11,
    fit_varma11,
    forecast,
    mse_comparison,
    residuals,
    simulate_varma,
)


# ---------------------------------------------------------------- models


def test_arma_model_validation():
    with pytest.raises(ValueError, match="not stationary"):
        ArmaModel(mu=0.0, phi=1.0, theta=0.2, sigma2=1.0, n_obs=10)
    with pytest.raises(ValueError, match="not invertible"):
        ArmaModel(mu=0.0, phi=0.2, theta=-1.0, sigma2=1.0, n_obs=10)
    with pytest.raises(ValueError, match="sigma2 must be positive"):
        ArmaModel(mu=0.0, phi=0.2, theta=0.2, sigma2=0.0, n_obs=10)


def test_varma_model_validation():
    eye = np.eye(2)
    zero = np.zeros((2, 2))
    with pytest.raises(ValueError, match="must be \\(2, 2\\)"):
        VarmaModel(mu=np.zeros(2), phi=np.zeros((3, 2)), theta=zero, sigma=eye, n_obs=9)
    with pytest.raises(ValueError, match="phi has an eigenvalue"):
        VarmaModel(mu=np.zeros(2), phi=1.1 * eye, theta=zero, sigma=eye, n_obs=9)
    with pytest.raises(ValueError, match="theta has an eigenvalue"):
        VarmaModel(mu=np.zeros(2), phi=zero, theta=1.0 * eye, sigma=eye, n_obs=9)
    with pytest.raises(ValueError, match="must be symmetric"):
        VarmaModel(
            mu=np.zeros(2),
            phi=zero,
            theta=zero,
            sigma=np.array([[1.0, 0.5], [0.2, 1.0]]),
            n_obs=9,
        )
    with pytest.raises(ValueError, match="positive semidefinite"):
        VarmaModel(mu=np.zeros(2), phi=zero, theta=zero, sigma=-eye, n_obs=9)


def test_models_default_to_no_warnings():
    m = ArmaModel(mu=0.0, phi=0.5, theta=0.1, sigma2=1.0, n_obs=10)
    assert m.warnings == ()


# ---------------------------------------------------------------- simulate


def test_simulate_is_deterministic():
    m = ArmaModel(mu=0.0, phi=0.6, theta=0.2, sigma2=1.0, n_obs=0)
    a = simulate_varma(m, 200, seed=5)
    b = simulate_varma(m, 200, seed=5)
    np.testing.assert_array_equal(a, b)
    c = simulate_varma(m, 200, seed=6)
    assert np.abs(a - c).max() > 0.0


def test_simulate_shapes():
    m1 = ArmaModel(mu=0.0, phi=0.5, theta=0.0, sigma2=1.0, n_obs=0)
    assert simulate_varma(m1, 100, seed=0).shape == (100, 1)
    m2 = VarmaModel(
        mu=np.zeros(3),
        phi=0.4 * np.eye(3),
        theta=np.zeros((3, 3)),
        sigma=np.eye(3),
        n_obs=0,
    )
    assert simulate_varma(m2, 50, seed=0).shape == (50, 3)


def test_simulate_respects_mean():
    m = ArmaModel(mu=10.0, phi=0.3, theta=0.0, sigma2=0.25, n_obs=0)
    z = simulate_varma(m, 20_000, seed=1)
    assert float(z.mean()) == pytest.approx(10.0, abs=0.05)


def test_simulate_error_contracts():
    m = ArmaModel(mu=0.0, phi=0.5, theta=0.0, sigma2=1.0, n_obs=0)
    with pytest.raises(ValueError, match="n must be positive"):
        simulate_varma(m, 0, seed=0)
    with pytest.raises(ValueError, match="burn_in must be nonnegative"):
        simulate_varma(m, 10, seed=0, burn_in=-1)


# ---------------------------------------------------------------- fitting


def test_arma_fit_recovers_parameters():
    true = ArmaModel(mu=0.0, phi=0.8, theta=0.3, sigma2=1.0, n_obs=0)
    z = simulate_varma(true, 4096, seed=11).ravel()
    fit = fit_arma11(z)
    assert fit.phi == pytest.approx(0.8, abs=0.05)
    assert fit.theta == pytest.approx(0.3, abs=0.05)
    assert fit.sigma2 == pytest.approx(1.0, abs=0.1)
    assert fit.n_obs == 4096
    assert fit.warnings == ()


def test_arma_fit_two_stage_only():
    true = ArmaModel(mu=0.0, phi=0.8, theta=0.3, sigma2=1.0, n_obs=0)
    z = simulate_varma(true, 4096, seed=11).ravel()
    fit = fit_arma11(z, css=False)
    assert fit.phi == pytest.approx(0.8, abs=0.05)
    assert fit.theta == pytest.approx(0.3, abs=0.05)


def test_arma_fit_handles_nonzero_mean():
    true = ArmaModel(mu=50.0, phi=0.6, theta=0.2, sigma2=1.0, n_obs=0)
    z = simulate_varma(true, 4096, seed=12).ravel()
    fit = fit_arma11(z)
    assert fit.mu == pytest.approx(50.0, abs=0.5)
    assert fit.phi == pytest.approx(0.6, abs=0.05)


def test_arma_fit_collapses_on_white_noise():
    z = np.random.default_rng(5).normal(size=4096)
    fit = fit_arma11(z)
    assert fit.phi == 0.0 and fit.theta == 0.0
    assert len(fit.warnings) == 1
    assert "white noise" in fit.warnings[0]
    assert fit.sigma2 == pytest.approx(1.0, abs=0.05)


def test_arma_fit_keeps_genuine_structure():
    true = ArmaModel(mu=0.0, phi=0.8, theta=0.3, sigma2=1.0, n_obs=0)
    z = simulate_varma(true, 4096, seed=13).ravel()
    fit = fit_arma11(z)
    assert fit.phi != 0.0
    assert fit.warnings == ()


@pytest.mark.parametrize(
    "x,msg",
    [
        (np.zeros((60, 2)), "one-dimensional"),
        (np.zeros(30), "at least 50"),
        (np.full(60, 3.0), "constant series"),
    ],
)
def test_arma_fit_error_contracts(x, msg):
    with pytest.raises(ValueError, match=msg):
        fit_arma11(x)


def test_arma_fit_rejects_nan():
    x = np.random.default_rng(0).normal(size=60)
    x[10] = np.nan
    with pytest.raises(ValueError, match="non-finite"):
        fit_arma11(x)


def test_varma_fit_recovers_diagonal_system():
    true = VarmaModel(
        mu=np.zeros(2),
        phi=np.diag([0.7, 0.4]),
        theta=np.diag([0.2, 0.1]),
        sigma=np.eye(2),
        n_obs=0,
    )
    data = simulate_varma(true, 10_000, seed=21)
    fit = fit_varma11(data)
    assert np.abs(fit.phi - true.phi).max() < 0.05
    assert np.abs(fit.theta - true.theta).max() < 0.05
    assert np.abs(fit.sigma - np.eye(2)).max() < 0.1
    assert fit.n_obs == 10_000


def test_varma_fit_recovers_coupling():
    phi = np.array([[0.5, 0.25], [0.25, 0.5]])
    true = VarmaModel(
        mu=np.zeros(2), phi=phi, theta=np.zeros((2, 2)), sigma=np.eye(2), n_obs=0
    )
    data = simulate_varma(true, 10_000, seed=22)
    fit = fit_varma11(data)
    assert np.abs(fit.phi - phi).max() < 0.05
    # the fitted model must itself be usable downstream
    assert max(abs(np.linalg.eigvals(fit.phi))) < 1.0
    assert max(abs(np.linalg.eigvals(fit.theta))) < 1.0


def test_varma_fit_error_contracts():
    with pytest.raises(ValueError, match="\\(n, p\\) matrix"):
        fit_varma11(np.zeros(100))
    with pytest.raises(ValueError, match="between 2 and 8"):
        fit_varma11(np.zeros((100, 1)))
    with pytest.raises(ValueError, match="at least 50"):
        fit_varma11(np.zeros((30, 2)))
    rng = np.random.default_rng(3)
    data = rng.normal(size=(100, 2))
    data[:, 1] = 7.0
    with pytest.raises(ValueError, match="constant"):
        fit_varma11(data)


# ---------------------------------------------------------------- residuals


def test_arma_residuals_satisfy_recursion():
    m = ArmaModel(mu=1.0, phi=0.6, theta=0.25, sigma2=1.0, n_obs=0)
    z = simulate_varma(m, 300, seed=30).ravel()
    e = residuals(m, z)
    assert e.shape == (300,)
    want = np.zeros(300)
    want[0] = 0.0
    zc = z - m.mu
    for t in range(1, 300):
        want[t] = zc[t] - m.phi * zc[t - 1] - m.theta * want[t - 1]
    np.testing.assert_allclose(e[1:], want[1:], atol=1e-10)


def test_varma_residuals_satisfy_recursion():
    m = VarmaModel(
        mu=np.array([1.0, -2.0]),
        phi=np.array([[0.5, 0.2], [0.1, 0.4]]),
        theta=np.array([[0.2, 0.0], [0.0, 0.1]]),
        sigma=np.eye(2),
        n_obs=0,
    )
    z = simulate_varma(m, 200, seed=31)
    e = residuals(m, z)
    assert e.shape == (200, 2)
    zc = z - m.mu
    want = np.zeros_like(zc)
    for t in range(1, 200):
        want[t] = zc[t] - m.phi @ zc[t - 1] - m.theta @ want[t - 1]
    np.testing.assert_allclose(e[1:], want[1:], atol=1e-10)


def test_residuals_recover_innovations():
    m = ArmaModel(mu=0.0, phi=0.7, theta=0.2, sigma2=1.0, n_obs=0)
    z = simulate_varma(m, 5000, seed=32).ravel()
    e = residuals(m, z)
    # after the startup transient the filtered residuals are the shocks
    assert float(np.var(e[100:])) == pytest.approx(1.0, abs=0.05)


def test_residuals_shape_contracts():
    arma = ArmaModel(mu=0.0, phi=0.5, theta=0.1, sigma2=1.0, n_obs=0)
    with pytest.raises(ValueError, match="one-dimensional"):
        residuals(arma, np.zeros((50, 2)))
    varma = VarmaModel(
        mu=np.zeros(2),
        phi=0.3 * np.eye(2),
        theta=np.zeros((2, 2)),
        sigma=np.eye(2),
        n_obs=0,
    )
    with pytest.raises(ValueError, match="must be \\(n, 2\\)"):
        residuals(varma, np.zeros((50, 3)))


# ---------------------------------------------------------------- forecast


def test_arma_forecast_closed_form():
    m = ArmaModel(mu=0.0, phi=0.5, theta=0.2, sigma2=1.0, n_obs=100)
    fc = forecast(m, y_last=2.0, e_last=1.0, horizon=2)
    assert fc.horizon == 2
    # one step: phi*y + theta*e; two steps: phi * (one step)
    np.testing.assert_allclose(fc.points.ravel(), [1.2, 0.6], atol=1e-12)
    # psi_1 = phi + theta = 0.7, so var_2 = 1 + 0.49
    np.testing.assert_allclose(fc.cov.ravel(), [1.0, 1.49], atol=1e-12)
    np.testing.assert_allclose(
        fc.lower.ravel(), fc.points.ravel() - 1.96 * np.sqrt([1.0, 1.49]), atol=1e-12
    )
    np.testing.assert_allclose(
        fc.upper.ravel(), fc.points.ravel() + 1.96 * np.sqrt([1.0, 1.49]), atol=1e-12
    )


def test_arma_forecast_reverts_to_mean():
    m = ArmaModel(mu=5.0, phi=0.5, theta=0.0, sigma2=1.0, n_obs=100)
    fc = forecast(m, y_last=7.0, e_last=0.0, horizon=3)
    np.testing.assert_allclose(fc.points.ravel(), [6.0, 5.5, 5.25], atol=1e-12)


def test_var_forecast_closed_form():
    phi = 0.5 * np.eye(2)
    m = VarmaModel(
        mu=np.zeros(2), phi=phi, theta=np.zeros((2, 2)), sigma=np.eye(2), n_obs=100
    )
    fc = forecast(m, y_last=np.array([2.0, -1.0]), e_last=None, horizon=2)
    np.testing.assert_allclose(fc.points, [[1.0, -0.5], [0.5, -0.25]], atol=1e-12)
    np.testing.assert_allclose(fc.cov[0], np.eye(2), atol=1e-12)
    np.testing.assert_allclose(fc.cov[1], np.eye(2) + phi @ phi.T, atol=1e-12)


def test_varma_forecast_variance_accumulates_psi_weights():
    m = VarmaModel(
        mu=np.zeros(2),
        phi=np.array([[0.5, 0.2], [0.0, 0.4]]),
        theta=np.array([[0.1, 0.0], [0.05, 0.2]]),
        sigma=np.array([[1.0, 0.3], [0.3, 2.0]]),
        n_obs=100,
    )
    h = 4
    fc = forecast(m, np.zeros(2), np.zeros(2), horizon=h)
    # psi_0 = I, psi_k = phi^(k-1) (phi + theta) for a first-order model
    psi = [np.eye(2)]
    for k in range(1, h):
        psi.append(np.linalg.matrix_power(m.phi, k - 1) @ (m.phi + m.theta))
    acc = np.zeros((2, 2))
    for k in range(h):
        acc = acc + psi[k] @ m.sigma @ psi[k].T
        np.testing.assert_allclose(fc.cov[k], acc, atol=1e-10)


def test_forecast_requires_e_last_with_ma_part():
    m = ArmaModel(mu=0.0, phi=0.5, theta=0.2, sigma2=1.0, n_obs=100)
    with pytest.raises(ValueError, match="moving-average part"):
        forecast(m, y_last=1.0, e_last=None, horizon=2)


def test_forecast_error_contracts():
    m = VarmaModel(
        mu=np.zeros(2),
        phi=0.3 * np.eye(2),
        theta=np.zeros((2, 2)),
        sigma=np.eye(2),
        n_obs=100,
    )
    with pytest.raises(ValueError, match="horizon must be at least 1"):
        forecast(m, np.zeros(2), None, horizon=0)
    with pytest.raises(ValueError, match="y_last must have shape"):
        forecast(m, np.zeros(3), None, horizon=2)
    with pytest.raises(ValueError, match="e_last must have shape"):
        forecast(m, np.zeros(2), np.zeros(3), horizon=2)


def test_one_step_forecast_errors_are_filtered_residuals():
    # forecasting one step from each time point and filtering residuals
    # through the realized path are the same computation
    m = VarmaModel(
        mu=np.zeros(2),
        phi=np.array([[0.6, 0.3], [0.3, 0.6]]),
        theta=np.zeros((2, 2)),
        sigma=np.eye(2),
        n_obs=256,
    )
    path = simulate_varma(m, 286, seed=40)
    res = residuals(m, path)
    e = np.zeros(2)
    for t in range(256, 286):
        fc = forecast(m, path[t - 1], e, horizon=1)
        np.testing.assert_allclose(path[t] - fc.points[0], res[t], atol=1e-10)


# ---------------------------------------------------------------- scoring


def test_evaluate_mse_hand_values():
    m = ArmaModel(mu=0.0, phi=0.5, theta=0.2, sigma2=1.0, n_obs=100)
    fc = forecast(m, y_last=2.0, e_last=1.0, horizon=2)
    ev = evaluate_mse(fc, np.array([1.0, 1.0]))
    np.testing.assert_allclose(ev.squared_errors.ravel(), [0.04, 0.16], atol=1e-12)
    # running mean over horizons 1..H
    np.testing.assert_allclose(ev.cum_mse.ravel(), [0.1], atol=1e-12)
    np.testing.assert_allclose(ev.lower, fc.lower, atol=0)
    np.testing.assert_allclose(ev.upper, fc.upper, atol=0)


def test_evaluate_mse_ignores_extra_rows():
    m = ArmaModel(mu=0.0, phi=0.5, theta=0.2, sigma2=1.0, n_obs=100)
    fc = forecast(m, y_last=2.0, e_last=1.0, horizon=2)
    a = evaluate_mse(fc, np.array([1.0, 1.0]))
    b = evaluate_mse(fc, np.array([1.0, 1.0, 99.0, -99.0]))
    np.testing.assert_allclose(a.squared_errors, b.squared_errors, atol=0)


def test_evaluate_mse_error_contracts():
    m = ArmaModel(mu=0.0, phi=0.5, theta=0.2, sigma2=1.0, n_obs=100)
    fc = forecast(m, y_last=2.0, e_last=1.0, horizon=3)
    with pytest.raises(ValueError, match="realized rows"):
        evaluate_mse(fc, np.array([1.0, 1.0]))
    mv = VarmaModel(
        mu=np.zeros(2),
        phi=0.3 * np.eye(2),
        theta=np.zeros((2, 2)),
        sigma=np.eye(2),
        n_obs=100,
    )
    fcv = forecast(mv, np.zeros(2), None, horizon=2)
    with pytest.raises(ValueError, match="series"):
        evaluate_mse(fcv, np.zeros((2, 3)))


def test_mse_comparison_winners():
    rows = mse_comparison(
        ("a", "b", "c"),
        np.array([1.0, 2.0, 1.5]),
        np.array([1.0, 1.5, 2.0]),
    )
    assert [r.winner for r in rows] == ["tie", "VARMA", "ARMA"]
    assert rows[1].name == "b"
    assert rows[1].arma_mse == 2.0 and rows[1].varma_mse == 1.5


def test_mse_comparison_tie_tolerance():
    rows = mse_comparison(("a",), np.array([1.0]), np.array([1.0 + 1e-13]))
    assert rows[0].winner == "tie"


def test_mse_comparison_length_mismatch():
    with pytest.raises(ValueError, match="matching lengths"):
        mse_comparison(("a",), np.array([1.0, 2.0]), np.array([1.0]))
