import numpy as np
import pytest

import fosrclust as fc


def test_basis_rows_sum_to_one():
    theta = fc.bspline_design(np.linspace(0, 1, 15), 8)
    assert theta.shape == (15, 8)
    np.testing.assert_allclose(theta.sum(axis=1), 1.0, atol=1e-14)


def test_penalty_is_symmetric_positive_definite():
    r = fc.pspline_penalty(8, 0.001)
    np.testing.assert_allclose(r, r.T)
    assert np.all(np.linalg.eigvalsh(r) > 0)


def test_simulate_fit_and_score():
    spec = fc.SimulationSpec()
    spec.design_id = 1
    spec.num_subjects = 40
    spec.seed = 3
    sim = fc.make_design(spec)
    assert sim["Y"].shape == (40, 15)
    assert list(sim["labels_true"][:7]) == [0] * 7

    prior = fc.PriorConfig()
    prior.variant = fc.Variant.FOSR_DPPM
    chain = fc.run_chain(sim["Y"], sim["W"], sim["X"], sim["grid"], prior, 400, 200, 9)
    assert chain.stored == 200
    assert chain.labels.shape == (200, 15)
    beta = chain.posterior_mean_beta()
    assert beta.shape == (15, 15)
    assert np.isfinite(fc.pointwise_mse(beta, sim["beta_true"]))
    pz = fc.percent_zero(chain.labels)
    assert np.all((pz >= 0) & (pz <= 1))
    cc = fc.coclustering_matrix(chain.labels)
    np.testing.assert_allclose(np.diag(cc), 1.0)
    assert fc.dendrogram(cc).shape == (14, 4)

    again = fc.run_chain(sim["Y"], sim["W"], sim["X"], sim["grid"], prior, 400, 200, 9)
    np.testing.assert_array_equal(chain.beta_draws, again.beta_draws)


def test_partition_metrics():
    assert fc.rand_index([1, 1, 2, 2], [1, 2, 1, 2]) == pytest.approx(1 / 3)
    assert fc.adjusted_rand_index([1, 1, 2], [5, 5, 0]) == 1.0
    lo, hi = fc.quantile(list(range(1, 1001)), 0.025), fc.quantile(list(range(1, 1001)), 0.975)
    assert (lo, hi) == pytest.approx((25.5, 975.5))


def test_marginal_loglik_matches_dense_gaussian():
    rng = np.random.default_rng(0)
    n, t, m = 5, 6, 4
    grid = np.linspace(0, 1, t)
    y, w, x = rng.normal(size=(n, t)), np.ones((n, 1)), rng.normal(size=(n, 2))
    a = rng.normal(size=(m, 1))
    lam, tau = np.array([0.7]), 1.3
    value = fc.marginal_loglik(y, w, x, grid, a, [1, 1], lam, tau, num_basis=m, eta=0.01)

    theta = fc.bspline_design(grid, m)
    r = fc.pspline_penalty(m, 0.01)
    e = (y.T - theta @ a @ w.T).T.reshape(-1)
    design = np.kron(x.sum(axis=1, keepdims=True), theta)
    cov = np.eye(n * t) / tau + design @ np.linalg.inv(r) @ design.T / lam[0]
    sign, logdet = np.linalg.slogdet(cov)
    ref = -0.5 * (n * t * np.log(2 * np.pi) + logdet + e @ np.linalg.solve(cov, e))
    assert value == pytest.approx(ref, rel=1e-10)


def test_cli_round_trip(tmp_path):
    code, out, err = fc.run_cli(["simulate", "--n", "12", "--seed", "2", "--out", str(tmp_path / "d")])
    assert code == 0, err
    assert "Y.csv" in out
    code, _, err = fc.run_cli(["simulate", "--design", "9", "--out", str(tmp_path / "e")])
    assert code != 0 and "design" in err


def test_errors_are_python_exceptions():
    prior = fc.PriorConfig()
    with pytest.raises(Exception):
        fc.run_chain(np.zeros((3, 4)), np.ones((2, 1)), np.zeros((3, 1)), np.linspace(0, 1, 4), prior, 10, 5, 1)
