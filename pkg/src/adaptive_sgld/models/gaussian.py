import numpy as np

from ..core import ConfigurationError
from .base import EnergyModel, injected_noise_grad

DEFAULT_COV = ((1.0, 0.9), (0.9, 1.0))


class CorrelatedGaussian(EnergyModel):
    """Zero-mean Gaussian target with noisy gradients ``Σ⁻¹θ + e``, ``e ~ N(0, noise_scale² I)``."""

    def __init__(self, cov=DEFAULT_COV, noise_scale=1.0):
        self.cov = np.array(cov, dtype=float)
        if self.cov.ndim != 2 or self.cov.shape[0] != self.cov.shape[1]:
            raise ConfigurationError("covariance must be a square matrix")
        if not np.allclose(self.cov, self.cov.T):
            raise ConfigurationError("covariance must be symmetric")
        try:
            chol = np.linalg.cholesky(self.cov)
        except np.linalg.LinAlgError:
            raise ConfigurationError("covariance must be positive definite") from None
        self.precision = np.linalg.inv(self.cov)
        self.dim = self.cov.shape[0]
        self.noise_scale = noise_scale
        self._log_norm = np.sum(np.log(np.diag(chol))) + 0.5 * self.dim * np.log(2 * np.pi)

    @property
    def mean(self):
        return np.zeros(self.dim)

    def energy(self, theta):
        theta = np.asarray(theta, dtype=float)
        return 0.5 * theta @ self.precision @ theta + self._log_norm

    def grad(self, theta):
        return self.precision @ np.asarray(theta, dtype=float)

    def stoch_grad(self, theta, rng):
        return injected_noise_grad(self, theta, rng, self.noise_scale)

    def initial_point(self, rng):
        return np.zeros(self.dim)


def gaussian_grad(theta, cov=DEFAULT_COV):
    return np.linalg.solve(np.asarray(cov, dtype=float), np.asarray(theta, dtype=float))
