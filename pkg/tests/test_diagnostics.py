import numpy as np
import pytest

from adaptive_sgld.core import ConfigurationError, make_rng
from adaptive_sgld.diagnostics import (
    accuracy_curve,
    cov_error,
    density_contour_from_samples,
    energy_contour,
    mode_coverage,
    mse_scaling,
    posterior_mean,
    silverman_bandwidth,
)
from adaptive_sgld.mlp import MLP, accuracy
from adaptive_sgld.models import FIVE_MODES, CorrelatedGaussian, MixtureGaussian5
from adaptive_sgld.samplers import SGLD

SIGMA = np.array([[1.0, 0.9], [0.9, 1.0]])


def iid_gaussian(n, seed):
    return make_rng(seed).multivariate_normal(np.zeros(2), SIGMA, size=n)


def test_cov_error_iid_oracle_at_one_million():
    curve = cov_error(iid_gaussian(1_000_000, 0), SIGMA, [1_000_000])
    assert curve.errors[0] < 0.005


def test_cov_error_constant_trace():
    curve = cov_error(np.ones((50, 2)), SIGMA, [10, 50])
    np.testing.assert_allclose(curve.errors, 0.95, rtol=1e-14)


def test_cov_error_uses_full_prefix():
    X = iid_gaussian(1000, 1)
    curve = cov_error(X, SIGMA, [100, 1000])
    S = np.cov(X[:100].T, bias=True)
    assert curve.errors[0] == pytest.approx(np.mean(np.abs(S - SIGMA)), rel=1e-10)


def test_cov_error_skips_degenerate_checkpoints():
    curve = cov_error(iid_gaussian(10, 2), SIGMA, [1, 2, 5, 50])
    np.testing.assert_array_equal(curve.checkpoints, [2, 5])


def test_cov_error_rejects_unsorted_checkpoints():
    with pytest.raises(ConfigurationError):
        cov_error(iid_gaussian(100, 0), SIGMA, [50, 10])


def test_cov_error_iid_rate_is_inverse_sqrt():
    Ls = np.array([1_000, 10_000, 100_000, 1_000_000])
    errs = np.mean([cov_error(iid_gaussian(1_000_000, s), SIGMA, Ls).errors for s in range(20)], axis=0)
    slope = np.polyfit(np.log(Ls), np.log(errs), 1)[0]
    assert -0.65 <= slope <= -0.35


def test_diagnostics_are_pure():
    X = iid_gaussian(500, 3)
    a = cov_error(X, SIGMA, [100, 500]).errors
    b = cov_error(X, SIGMA, [100, 500]).errors
    np.testing.assert_array_equal(a, b)


def test_posterior_mean_basics(rng):
    x = np.array([[1.5, -2.0]])
    np.testing.assert_array_equal(posterior_mean(x), [1.5, -2.0])
    X = rng.normal(size=(100, 2))
    np.testing.assert_allclose(posterior_mean(X[rng.permutation(100)]), posterior_mean(X), rtol=1e-14)
    with pytest.raises(ValueError):
        posterior_mean(np.empty((0, 2)))


def test_contour_point_mass_minimum():
    X = np.tile([1.0, -2.0], (200, 1))
    g = density_contour_from_samples(X, bandwidth=0.3)
    i, j = np.unravel_index(np.argmin(g.values), g.values.shape)
    assert g.xs[j] == pytest.approx(1.0) and g.ys[i] == pytest.approx(-2.0)
    assert np.all(np.isfinite(g.values))


def test_contour_validation():
    with pytest.raises(ConfigurationError):
        density_contour_from_samples(np.zeros((50, 2)), bandwidth=0.3)
    with pytest.raises(ConfigurationError):
        density_contour_from_samples(np.random.default_rng(0).normal(size=(200, 2)), bandwidth=0.0)


def test_contour_matches_known_gaussian_density():
    X = make_rng(4).standard_normal((200_000, 2))
    bw = 0.2
    # the grid must cover the sample support; compare on the central region
    g = density_contour_from_samples(X, (-6, 6), (-6, 6), 121, bandwidth=bw)
    inner = np.abs(g.xs) <= 1.5
    gx, gy = np.meshgrid(g.xs[inner], g.ys[inner])
    # smoothing N(0, I) by the kernel gives N(0, (1 + bw^2) I)
    s2 = 1 + bw**2
    truth = (gx**2 + gy**2) / (2 * s2) + np.log(2 * np.pi * s2)
    np.testing.assert_allclose(g.values[np.ix_(inner, inner)], truth, atol=0.05)


def test_contour_correlates_with_mixture_energy():
    model = MixtureGaussian5()
    truth = energy_contour(model.energy_grid).values
    rs, inner = [], []
    for seed in range(1, 6):
        est = density_contour_from_samples(model.sample(100_000, make_rng(seed))).values
        rs.append(np.corrcoef(est.ravel(), truth.ravel())[0, 1])
        mask = truth < truth.min() + 10
        inner.append(np.corrcoef(est[mask], truth[mask])[0, 1])
    assert np.mean(rs) > 0.95
    assert min(inner) > 0.99


def test_contour_csv(tmp_path):
    g = density_contour_from_samples(make_rng(0).standard_normal((500, 2)), resolution=11)
    g.to_csv(tmp_path / "c.csv")
    lines = (tmp_path / "c.csv").read_text().splitlines()
    assert lines[0] == "x,y,value" and len(lines) == 1 + 121


def test_silverman_bandwidth_formula():
    X = make_rng(1).standard_normal((10_000, 2)) * [1.0, 3.0]
    bw = silverman_bandwidth(X)
    np.testing.assert_allclose(bw, X.std(axis=0, ddof=1) * 10_000 ** (-1 / 6), rtol=1e-12)


def test_mode_coverage_of_direct_samples():
    model = MixtureGaussian5()
    cover = mode_coverage(model.sample(100_000, make_rng(3)), FIVE_MODES)
    np.testing.assert_allclose(cover, 0.2 * (1 - np.exp(-1)), atol=0.006)


def test_accuracy_curve_last_point_equals_accuracy():
    net = MLP([3, 4, 2])
    rng = np.random.default_rng(0)
    S = rng.normal(size=(10, net.dim))
    X, y = rng.normal(size=(30, 3)), rng.integers(0, 2, 30)
    curve = accuracy_curve(net, S, X, y, [1, 5, 10])
    assert curve[-1] == accuracy(net, S, X, y)
    assert curve[0] == accuracy(net, S[:1], X, y)


def test_mse_scaling_quadrupling_halves_error():
    table = mse_scaling(CorrelatedGaussian(), SGLD(learning_rate=0.1), [250, 1000], range(100, 150))
    assert table[0, 1] / table[1, 1] >= 2.0


@pytest.mark.slow
def test_mse_floor_shrinks_with_step_size():
    # SGLD leaves the mean of a Gaussian unbiased, so the floor is probed with theta_1^2
    # (exact mean 1, stationary bias O(eps)); long chains keep the variance term small
    model = CorrelatedGaussian(cov=np.eye(2), noise_scale=0.0)
    stat = lambda th: th[0] ** 2  # noqa: E731
    big = mse_scaling(model, SGLD(learning_rate=0.1), [500_000], [1, 2], true_mean=[1.0], statistic=stat)
    small = mse_scaling(model, SGLD(learning_rate=0.05), [500_000], [1, 2], true_mean=[1.0], statistic=stat)
    ratio = big[0, 1] / small[0, 1]
    assert 2.5 < ratio < 6.5
