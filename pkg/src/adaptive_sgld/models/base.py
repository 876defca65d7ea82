import numpy as np

from ..core import ConfigurationError


class EnergyModel:
    """Interface for targets ``pi(theta) ∝ exp(-U(theta))``.

    Subclasses provide ``dim``, ``energy``, ``grad`` and ``stoch_grad``.
    Data-backed models also set ``n_data`` and ``batch_size`` so a chain
    driver can convert iterations into epochs.
    """

    dim = None
    n_data = None
    batch_size = None

    def energy(self, theta):
        raise NotImplementedError

    def grad(self, theta):
        raise NotImplementedError

    def stoch_grad(self, theta, rng):
        raise NotImplementedError

    def regularized_grad(self, theta, rng, weight_decay):
        """Gradient of the per-example loss plus ``weight_decay * theta`` (optimizer baselines)."""
        raise ConfigurationError(f"{type(self).__name__} has no regularized objective")

    @property
    def iterations_per_epoch(self):
        if self.n_data is None or self.batch_size is None:
            return 1
        return -(-self.n_data // self.batch_size)

    def initial_point(self, rng):
        return rng.standard_normal(self.dim)


def injected_noise_grad(model, theta, rng, scale=1.0):
    """Exact gradient plus a fresh ``N(0, scale**2 I)`` perturbation."""
    return model.grad(theta) + scale * rng.standard_normal(model.dim)


def finite_difference_grad(energy, theta, h=1e-6):
    """Central differences of a scalar function, one coordinate at a time."""
    theta = np.asarray(theta, dtype=float)
    out = np.empty_like(theta)
    for i in range(theta.size):
        e = np.zeros_like(theta)
        e[i] = h
        out[i] = (energy(theta + e) - energy(theta - e)) / (2 * h)
    return out
