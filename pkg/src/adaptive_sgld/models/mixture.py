import numpy as np
from scipy.special import logsumexp

from .base import EnergyModel, injected_noise_grad

FIVE_MODES = np.array([[-3.0, -3.0], [-3.0, 0.0], [0.0, 0.0], [3.0, 0.0], [3.0, 3.0]])


class MixtureGaussian5(EnergyModel):
    """Equal-weight mixture ``Σ_i (1/(10π)) exp(-‖θ - μ_i‖²)`` of isotropic Gaussians.

    Each component has variance 1/2 per coordinate.  The constant is kept
    exactly as in the formula, so ``exp(-U)`` integrates to 1/2 rather than 1;
    this shifts the energy by ``log 2`` and leaves the gradient unchanged.
    """

    dim = 2

    def __init__(self, means=FIVE_MODES, noise_scale=1.0):
        self.means = np.array(means, dtype=float)
        self.noise_scale = noise_scale
        self._log_norm = np.log(2 * len(self.means) * np.pi)

    def _log_terms(self, theta):
        diff = np.asarray(theta, dtype=float) - self.means
        return -np.sum(diff * diff, axis=-1), diff

    def energy(self, theta):
        log_terms, _ = self._log_terms(theta)
        return self._log_norm - logsumexp(log_terms)

    def grad(self, theta):
        log_terms, diff = self._log_terms(theta)
        w = np.exp(log_terms - logsumexp(log_terms))
        return 2.0 * w @ diff

    def energy_grad(self, theta):
        log_terms, diff = self._log_terms(theta)
        lse = logsumexp(log_terms)
        w = np.exp(log_terms - lse)
        return self._log_norm - lse, 2.0 * w @ diff

    def energy_grid(self, xs, ys):
        """Energy on the mesh ``ys × xs`` (rows index y)."""
        gx, gy = np.meshgrid(xs, ys)
        pts = np.stack([gx.ravel(), gy.ravel()], axis=1)
        sq = ((pts[:, None, :] - self.means[None]) ** 2).sum(-1)
        return (self._log_norm - logsumexp(-sq, axis=1)).reshape(gy.shape)

    def stoch_grad(self, theta, rng):
        return injected_noise_grad(self, theta, rng, self.noise_scale)

    def sample(self, size, rng):
        """Exact draws: pick a component uniformly, then add ``N(0, I/2)``."""
        comp = rng.integers(len(self.means), size=size)
        return self.means[comp] + np.sqrt(0.5) * rng.standard_normal((size, 2))

    def initial_point(self, rng):
        return np.zeros(2)


def mixture_energy_grad(theta, means=FIVE_MODES):
    return MixtureGaussian5(means).energy_grad(theta)
