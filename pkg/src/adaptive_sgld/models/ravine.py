import csv

import numpy as np

from ..core import ConfigurationError
from .base import EnergyModel

TRUE_THETA = (20.0, 10.0)


def ravine_predict(theta, x):
    """Regression function ``(x-1)² + 2 sin(θ1 x) + θ1/30 + cos(θ2 x - 1) - θ2/20``."""
    t1, t2 = theta[0], theta[1]
    x = np.asarray(x, dtype=float)
    return (x - 1.0) ** 2 + 2.0 * np.sin(t1 * x) + t1 / 30.0 + np.cos(t2 * x - 1.0) - t2 / 20.0


def ravine_jacobian(theta, x):
    """Partial derivatives of ``ravine_predict`` w.r.t. (θ1, θ2), shape ``(len(x), 2)``."""
    t1, t2 = theta[0], theta[1]
    x = np.asarray(x, dtype=float)
    d1 = 2.0 * x * np.cos(t1 * x) + 1.0 / 30.0
    d2 = -x * np.sin(t2 * x - 1.0) - 1.0 / 20.0
    return np.stack([d1, d2], axis=-1)


def make_ravine_dataset(n, theta_true=TRUE_THETA, seed=0, noise=True):
    """``x ~ Unif[-2, 4]``, ``y = f(x) + N(0, 1)`` (no noise when ``noise=False``)."""
    if n < 1:
        raise ConfigurationError("dataset size must be at least 1")
    rng = np.random.default_rng(seed)
    x = rng.uniform(-2.0, 4.0, size=n)
    y = ravine_predict(theta_true, x)
    if noise:
        y = y + rng.standard_normal(n)
    return x, y


def save_ravine_csv(path, x, y):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y"])
        for xi, yi in zip(x, y):
            writer.writerow([repr(float(xi)), repr(float(yi))])


def load_ravine_csv(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if [h.strip() for h in header] != ["x", "y"]:
            raise ValueError(f"{path}: expected header 'x,y', got {header}")
        rows = [(float(a), float(b)) for a, b in reader]
    data = np.array(rows, dtype=float).reshape(-1, 2)
    return data[:, 0], data[:, 1]


class RavineRegression(EnergyModel):
    """Posterior of the two-parameter ravine regression with unit noise and ``N(0, prior_var)`` prior.

    ``U(θ) = Σ (y_i - f_θ(x_i))² / 2 + ‖θ‖² / (2 prior_var)``.  The minibatch
    gradient scales the likelihood part by ``N/n`` and leaves the prior alone.
    """

    dim = 2

    def __init__(self, x, y, batch_size=100, prior_var=1.0):
        self.x = np.asarray(x, dtype=float)
        self.y = np.asarray(y, dtype=float)
        if self.x.shape != self.y.shape or self.x.ndim != 1:
            raise ValueError("x and y must be 1-d arrays of equal length")
        self.n_data = self.x.size
        if not 1 <= batch_size <= self.n_data:
            raise ConfigurationError(f"batch size must lie in [1, {self.n_data}], got {batch_size}")
        self.batch_size = int(batch_size)
        self.prior_var = float(prior_var)

    @classmethod
    def simulate(cls, n=10_000, theta_true=TRUE_THETA, seed=0, **kwargs):
        x, y = make_ravine_dataset(n, theta_true, seed)
        return cls(x, y, **kwargs)

    def _lik_grad(self, theta, x, y):
        resid = y - ravine_predict(theta, x)
        return -resid @ ravine_jacobian(theta, x)

    def energy(self, theta):
        theta = np.asarray(theta, dtype=float)
        resid = self.y - ravine_predict(theta, self.x)
        return 0.5 * resid @ resid + 0.5 * theta @ theta / self.prior_var

    def grad(self, theta):
        theta = np.asarray(theta, dtype=float)
        return self._lik_grad(theta, self.x, self.y) + theta / self.prior_var

    def batch_grad(self, theta, idx):
        theta = np.asarray(theta, dtype=float)
        if len(idx) == 0:
            raise ConfigurationError("empty minibatch")
        scale = self.n_data / len(idx)
        return scale * self._lik_grad(theta, self.x[idx], self.y[idx]) + theta / self.prior_var

    def stoch_grad(self, theta, rng):
        idx = rng.choice(self.n_data, self.batch_size, replace=False)
        return self.batch_grad(theta, idx)

    def regularized_grad(self, theta, rng, weight_decay):
        idx = rng.choice(self.n_data, self.batch_size, replace=False)
        theta = np.asarray(theta, dtype=float)
        return self._lik_grad(theta, self.x[idx], self.y[idx]) / len(idx) + weight_decay * theta

    def energy_grid(self, t1s, t2s):
        out = np.empty((len(t2s), len(t1s)))
        for j, t2 in enumerate(t2s):
            for i, t1 in enumerate(t1s):
                out[j, i] = self.energy((t1, t2))
        return out


def ravine_stoch_grad(model, theta, rng):
    return model.stoch_grad(theta, rng)
