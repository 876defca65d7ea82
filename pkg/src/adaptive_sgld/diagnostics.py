"""Trace diagnostics: covariance error curves, density contours, mode coverage, MSE scaling."""

import csv
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .chain import run_chain
from .core import ConfigurationError, check_random_state


def _samples(trace):
    samples = getattr(trace, "samples", trace)
    return np.asarray(samples, dtype=float)


@dataclass
class CovErrorCurve:
    checkpoints: np.ndarray
    errors: np.ndarray

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["checkpoint", "cov_error"])
            for L, e in zip(self.checkpoints, self.errors):
                w.writerow([int(L), repr(float(e))])


def cov_error(trace, target_cov, checkpoints):
    """Mean absolute entrywise error of the running sample covariance.

    At each checkpoint ``L`` the covariance of the first ``L`` samples
    (``1/L`` normalization) is compared with ``target_cov``.  Checkpoints
    with ``L < 2`` or beyond the trace length are skipped.
    """
    X = _samples(trace)
    target = np.asarray(target_cov, dtype=float)
    if X.ndim != 2 or target.shape != (X.shape[1], X.shape[1]):
        raise ConfigurationError("trace and target covariance dimensions disagree")
    cps = np.asarray(list(checkpoints), dtype=np.int64)
    if np.any(np.diff(cps) <= 0):
        raise ConfigurationError("checkpoints must be strictly increasing")
    cps = cps[(cps >= 2) & (cps <= len(X))]
    # cumulative first and second moments give every prefix in one pass
    s1 = np.cumsum(X, axis=0)
    s2 = np.cumsum(X[:, :, None] * X[:, None, :], axis=0)
    errors = []
    for L in cps:
        mean = s1[L - 1] / L
        S = s2[L - 1] / L - np.outer(mean, mean)
        errors.append(np.mean(np.abs(S - target)))
    return CovErrorCurve(cps, np.array(errors))


def posterior_mean(trace):
    X = _samples(trace)
    if X.size == 0 or len(X) == 0:
        raise ValueError("cannot average an empty trace")
    return X.mean(axis=0)


@dataclass
class ContourGrid:
    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray  # values[i, j] at (xs[j], ys[i])

    @property
    def resolution(self):
        return self.values.shape

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "y", "value"])
            for i, y in enumerate(self.ys):
                for j, x in enumerate(self.xs):
                    w.writerow([repr(float(x)), repr(float(y)), repr(float(self.values[i, j]))])


def silverman_bandwidth(samples):
    """Per-axis Silverman rule-of-thumb bandwidth for a 2-d sample."""
    X = _samples(samples)
    n, d = X.shape
    sd = X.std(axis=0, ddof=1)
    return sd * (4.0 / ((d + 2) * n)) ** (1.0 / (d + 4))


def density_contour_from_samples(samples, xlim=(-6, 6), ylim=(-6, 6), resolution=121, bandwidth=None):
    """Gaussian-kernel density estimate on a grid, returned as ``-log density``.

    Samples are first binned on the grid (a binned KDE), then the Gaussian
    kernel (``bandwidth`` scalar or per-axis, Silverman's rule when omitted)
    is applied separably in log space.  Working in log space keeps cells far
    from every sample finite instead of underflowing to zero density.
    Samples outside the grid are not binned but still count in the
    normalization.
    """
    X = _samples(samples)
    if X.ndim != 2 or X.shape[1] != 2:
        raise ConfigurationError("density contours need 2-d samples")
    if len(X) < 100:
        raise ConfigurationError("need at least 100 samples for a density estimate")
    bw = silverman_bandwidth(X) if bandwidth is None else np.broadcast_to(np.asarray(bandwidth, dtype=float), (2,))
    if np.any(bw <= 0) or not np.all(np.isfinite(bw)):
        raise ConfigurationError("bandwidth must be positive")
    xs = np.linspace(xlim[0], xlim[1], resolution)
    ys = np.linspace(ylim[0], ylim[1], resolution)
    dx, dy = xs[1] - xs[0], ys[1] - ys[0]
    edges_x = np.concatenate([xs - dx / 2, [xs[-1] + dx / 2]])
    edges_y = np.concatenate([ys - dy / 2, [ys[-1] + dy / 2]])
    counts, _, _ = np.histogram2d(X[:, 1], X[:, 0], bins=[edges_y, edges_x])
    with np.errstate(divide="ignore"):
        log_c = np.log(counts)  # [y_bin, x_bin]
    kx = -0.5 * ((xs[:, None] - xs[None, :]) / bw[0]) ** 2  # [x_eval, x_bin]
    ky = -0.5 * ((ys[:, None] - ys[None, :]) / bw[1]) ** 2
    # sum over x bins, then over y bins
    stage = logsumexp(log_c[:, None, :] + kx[None, :, :], axis=2)  # [y_bin, x_eval]
    log_dens = logsumexp(stage[None, :, :] + ky[:, :, None], axis=1)  # [y_eval, x_eval]
    log_dens -= np.log(len(X) * 2 * np.pi * bw[0] * bw[1])
    return ContourGrid(xs, ys, -log_dens)


def energy_contour(energy_grid_fn, xlim=(-6, 6), ylim=(-6, 6), resolution=121):
    """True energy on a grid from a model's ``energy_grid(xs, ys)``."""
    xs = np.linspace(xlim[0], xlim[1], resolution)
    ys = np.linspace(ylim[0], ylim[1], resolution)
    return ContourGrid(xs, ys, np.asarray(energy_grid_fn(xs, ys), dtype=float))


def mode_coverage(samples, modes, radius=1.0):
    """Fraction of samples within ``radius`` of each mode."""
    X = _samples(samples)
    M = np.asarray(modes, dtype=float)
    if len(X) == 0:
        raise ValueError("no samples")
    dist = np.linalg.norm(X[:, None, :] - M[None, :, :], axis=2)
    return np.mean(dist <= radius, axis=0)


def accuracy_curve(net, trace, X, labels, checkpoints):
    """Running Bayesian-averaged accuracy using the first ``k`` retained samples."""
    from .mlp import predict_proba_average

    S = _samples(trace)
    out = []
    total = np.zeros((len(X), net.n_classes))
    done = 0
    for k in checkpoints:
        k = min(int(k), len(S))
        for theta in S[done:k]:
            total += net.forward(theta, X)
        done = max(done, k)
        if done:
            out.append(100.0 * np.mean(np.argmax(total, axis=1) == np.asarray(labels)))
    return np.array(out)


def mse_scaling(model, sampler, lengths, seeds, true_mean=None, statistic=None, theta0=None):
    """Replication MSE of the ergodic average of ``statistic`` over seeds.

    Each seed runs one chain of ``max(lengths)`` iterations with no burn-in;
    the ergodic average over the first ``L`` iterations is compared with the
    known posterior expectation.  Returns ``(L, mse)`` rows.
    """
    lengths = sorted(int(L) for L in lengths)
    if lengths[0] < 1:
        raise ConfigurationError("chain lengths must be positive")
    if true_mean is None:
        true_mean = model.mean
    phi = (lambda th: th) if statistic is None else statistic
    true_mean = np.asarray(true_mean, dtype=float)
    sq = np.zeros(len(lengths))
    for seed in seeds:
        rng = check_random_state(seed)
        tr = run_chain(model, sampler, lengths[-1], 0, 1, rng, theta0=theta0, record_energy=False)
        if tr.diverged:
            raise FloatingPointError(f"chain diverged for seed {seed}")
        vals = np.asarray([phi(th) for th in tr.samples], dtype=float).reshape(len(tr.samples), -1)
        csum = np.cumsum(vals, axis=0)
        for k, L in enumerate(lengths):
            err = csum[L - 1] / L - true_mean.reshape(-1)
            sq[k] += err @ err
    return np.column_stack([lengths, sq / len(seeds)])
