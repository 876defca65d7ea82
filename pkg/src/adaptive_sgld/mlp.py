"""Fully connected ReLU classifier with hand-written backprop and weight priors."""

from dataclasses import dataclass

import numpy as np
from scipy.special import log_softmax

from .core import ConfigurationError
from .models.base import EnergyModel


class MLP:
    """Layer-size bookkeeping plus forward/backward passes on a flat parameter vector.

    Parameters are stored layer by layer as ``W_l`` (``fan_in × fan_out``,
    row-major) followed by ``b_l``.
    """

    def __init__(self, layer_sizes):
        sizes = tuple(int(s) for s in layer_sizes)
        if len(sizes) < 2 or min(sizes) < 1:
            raise ConfigurationError(f"invalid layer sizes {layer_sizes!r}")
        self.layer_sizes = sizes
        self._slices = []
        offset = 0
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            w = slice(offset, offset + fan_in * fan_out)
            offset += fan_in * fan_out
            b = slice(offset, offset + fan_out)
            offset += fan_out
            self._slices.append((w, b, fan_in, fan_out))
        self.dim = offset

    def __repr__(self):
        return f"MLP({'-'.join(map(str, self.layer_sizes))})"

    @property
    def n_classes(self):
        return self.layer_sizes[-1]

    def unflatten(self, theta):
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.dim,):
            raise ConfigurationError(f"expected {self.dim} parameters, got shape {theta.shape}")
        return [(theta[w].reshape(fi, fo), theta[b]) for w, b, fi, fo in self._slices]

    def flatten(self, layers):
        return np.concatenate([np.concatenate([W.ravel(), b.ravel()]) for W, b in layers])

    def weight_mask(self):
        """Boolean mask selecting connection weights (not biases)."""
        mask = np.zeros(self.dim, dtype=bool)
        for w, _, _, _ in self._slices:
            mask[w] = True
        return mask

    def init_params(self, rng):
        """He-uniform weights ``U(±sqrt(6 / fan_in))``, zero biases."""
        theta = np.zeros(self.dim)
        for w, _, fan_in, fan_out in self._slices:
            bound = np.sqrt(6.0 / fan_in)
            theta[w] = rng.uniform(-bound, bound, size=fan_in * fan_out)
        return theta

    def _check_features(self, X):
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.layer_sizes[0]:
            raise ConfigurationError(
                f"expected features of shape (n, {self.layer_sizes[0]}), got {X.shape}"
            )
        return X

    def logits(self, theta, X):
        h = self._check_features(X)
        layers = self.unflatten(theta)
        for W, b in layers[:-1]:
            h = np.maximum(h @ W + b, 0.0)
        W, b = layers[-1]
        return h @ W + b

    def log_proba(self, theta, X):
        return log_softmax(self.logits(theta, X), axis=1)

    def forward(self, theta, X):
        return np.exp(self.log_proba(theta, X))

    def nll_and_grad(self, theta, X, y):
        """Summed negative log-likelihood of labels ``y`` and its gradient."""
        X = self._check_features(X)
        layers = self.unflatten(theta)
        acts = [X]
        pre = []
        h = X
        # non-finite values are caught below and reported as one error
        with np.errstate(invalid="ignore", over="ignore"):
            for W, b in layers[:-1]:
                z = h @ W + b
                pre.append(z)
                h = np.maximum(z, 0.0)
                acts.append(h)
            W, b = layers[-1]
            logp = log_softmax(h @ W + b, axis=1)
        if not np.all(np.isfinite(logp)):
            raise FloatingPointError("non-finite activations in forward pass")
        rows = np.arange(len(y))
        nll = -logp[rows, y].sum()

        delta = np.exp(logp)
        delta[rows, y] -= 1.0
        grads = []
        for layer in range(len(layers) - 1, -1, -1):
            W, _ = layers[layer]
            grads.append((acts[layer].T @ delta, delta.sum(axis=0)))
            if layer:
                delta = (delta @ W.T) * (pre[layer - 1] > 0)
        grads.reverse()
        return nll, self.flatten(grads)


@dataclass(frozen=True)
class GaussianPrior:
    """Independent ``N(0, variance)`` on every parameter."""

    variance: float = 1.0

    def __post_init__(self):
        if self.variance <= 0:
            raise ConfigurationError("prior variance must be positive")

    def neg_log_density(self, theta):
        theta = np.asarray(theta, dtype=float)
        return 0.5 * theta @ theta / self.variance + 0.5 * theta.size * np.log(2 * np.pi * self.variance)

    def grad(self, theta):
        return np.asarray(theta, dtype=float) / self.variance


@dataclass(frozen=True)
class MixturePrior:
    """Spike-and-slab ``λ N(0, σ1²) + (1-λ) N(0, σ0²)`` on every parameter."""

    weight: float = 1e-7
    slab_var: float = 0.02
    spike_var: float = 1e-5

    def __post_init__(self):
        if not 0 < self.weight <= 1:
            raise ConfigurationError(f"mixture weight must lie in (0, 1], got {self.weight}")
        if self.spike_var <= 0 or self.slab_var <= 0:
            raise ConfigurationError("component variances must be positive")
        if self.spike_var >= self.slab_var:
            raise ConfigurationError("spike variance must be smaller than slab variance")

    def _log_components(self, theta):
        theta = np.asarray(theta, dtype=float)
        with np.errstate(divide="ignore"):
            log_spike_w = np.log1p(-self.weight)
        log_slab = np.log(self.weight) - 0.5 * np.log(2 * np.pi * self.slab_var) - theta**2 / (2 * self.slab_var)
        log_spike = log_spike_w - 0.5 * np.log(2 * np.pi * self.spike_var) - theta**2 / (2 * self.spike_var)
        return log_slab, log_spike

    def slab_responsibility(self, theta):
        log_slab, log_spike = self._log_components(theta)
        # logistic of the log-odds; exact 1 when the spike weight is zero
        with np.errstate(invalid="ignore"):
            r = np.exp(log_slab - np.logaddexp(log_slab, log_spike))
        return r

    def neg_log_density(self, theta):
        log_slab, log_spike = self._log_components(theta)
        return -np.sum(np.logaddexp(log_slab, log_spike))

    def grad(self, theta):
        theta = np.asarray(theta, dtype=float)
        r = self.slab_responsibility(theta)
        return theta * (r / self.slab_var + (1.0 - r) / self.spike_var)


def mixture_prior_loggrad(theta, prior):
    """``-d/dθ log π(θ)`` of the spike-and-slab prior, elementwise."""
    return prior.grad(theta)


def sparsity_threshold(prior):
    """Magnitude above which the slab component dominates the spike."""
    lam, s1sq, s0sq = prior.weight, prior.slab_var, prior.spike_var
    if s0sq >= s1sq:
        raise ConfigurationError("spike variance must be smaller than slab variance")
    log_odds = np.log((1.0 - lam) / lam * np.sqrt(s1sq / s0sq))
    return float(np.sqrt(log_odds * 2.0 * s0sq * s1sq / (s1sq - s0sq)))


def sparsity_ratio(theta, prior):
    """Percentage of entries with ``|θ_k| >= sparsity_threshold(prior)``."""
    theta = np.asarray(theta, dtype=float)
    if theta.size == 0:
        return 0.0
    return 100.0 * np.count_nonzero(np.abs(theta) >= sparsity_threshold(prior)) / theta.size


class MLPEnergy(EnergyModel):
    """Posterior energy ``-Σ log p(y_i | x_i, θ) - log π(θ)`` of an :class:`MLP` classifier."""

    def __init__(self, net, X, y, prior=None, batch_size=50):
        self.net = net
        self.X = net._check_features(X)
        self.y = np.asarray(y, dtype=np.intp)
        if self.y.shape != (self.X.shape[0],):
            raise ConfigurationError("labels must be a 1-d array matching the feature rows")
        if self.y.min() < 0 or self.y.max() >= net.n_classes:
            raise ConfigurationError(f"labels must lie in [0, {net.n_classes})")
        self.prior = GaussianPrior() if prior is None else prior
        self.n_data = self.X.shape[0]
        if not 1 <= batch_size <= self.n_data:
            raise ConfigurationError(f"batch size must lie in [1, {self.n_data}]")
        self.batch_size = int(batch_size)
        self.dim = net.dim

    def with_prior(self, prior):
        return MLPEnergy(self.net, self.X, self.y, prior, self.batch_size)

    def energy(self, theta):
        nll, _ = self.net.nll_and_grad(theta, self.X, self.y)
        return nll + self.prior.neg_log_density(theta)

    def grad(self, theta):
        _, g = self.net.nll_and_grad(theta, self.X, self.y)
        return g + self.prior.grad(theta)

    def batch_grad(self, theta, idx):
        if len(idx) == 0:
            raise ConfigurationError("empty minibatch")
        _, g = self.net.nll_and_grad(theta, self.X[idx], self.y[idx])
        return (self.n_data / len(idx)) * g + self.prior.grad(theta)

    def stoch_grad(self, theta, rng):
        return self.batch_grad(theta, rng.choice(self.n_data, self.batch_size, replace=False))

    def regularized_grad(self, theta, rng, weight_decay):
        idx = rng.choice(self.n_data, self.batch_size, replace=False)
        _, g = self.net.nll_and_grad(theta, self.X[idx], self.y[idx])
        return g / len(idx) + weight_decay * np.asarray(theta, dtype=float)

    def initial_point(self, rng):
        return self.net.init_params(rng)


def mlp_stoch_grad(model, theta, idx):
    return model.batch_grad(theta, idx)


def predict_proba_average(net, thetas, X):
    """Class probabilities averaged over a stack of parameter vectors."""
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    if thetas.shape[0] == 0:
        raise ValueError("no parameter samples to average")
    total = np.zeros((np.asarray(X).shape[0], net.n_classes))
    for theta in thetas:
        total += net.forward(theta, X)
    return total / thetas.shape[0]


def accuracy(net, thetas, X, labels):
    """Percentage of correct argmax predictions from sample-averaged probabilities."""
    proba = predict_proba_average(net, thetas, X)
    return 100.0 * np.mean(np.argmax(proba, axis=1) == np.asarray(labels))
