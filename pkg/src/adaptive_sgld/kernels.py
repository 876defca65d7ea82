"""One-step transition kernels.

Every kernel takes the current state and a stochastic gradient evaluated at
``state.theta`` and returns a new state.  The adaptive kernels (MSGLD, ASGLD)
move ``theta`` with the moment estimates accumulated from *earlier*
gradients and only then fold the new gradient into ``m`` / ``V``.
No bias correction is applied to the sampler moments; only the Adam
optimizer baseline uses it.
"""

from dataclasses import dataclass

import numpy as np

from .core import ConfigurationError, gaussian_step_noise


class DivergenceError(FloatingPointError):
    """A chain produced a non-finite gradient or parameter vector."""

    def __init__(self, message, iteration=None, theta=None):
        super().__init__(message)
        self.iteration = iteration
        self.theta = None if theta is None else np.array(theta, copy=True)


def _zeros_like(theta):
    return np.zeros_like(np.asarray(theta, dtype=float))


@dataclass
class SgldState:
    theta: np.ndarray
    t: int = 0


@dataclass
class MsgldState:
    theta: np.ndarray
    m: np.ndarray = None
    t: int = 0

    def __post_init__(self):
        if self.m is None:
            self.m = _zeros_like(self.theta)


@dataclass
class AsgldState:
    theta: np.ndarray
    m: np.ndarray = None
    V: np.ndarray = None
    t: int = 0

    def __post_init__(self):
        if self.m is None:
            self.m = _zeros_like(self.theta)
        if self.V is None:
            self.V = _zeros_like(self.theta)


@dataclass
class PsgldState:
    theta: np.ndarray
    V: np.ndarray = None
    t: int = 0

    def __post_init__(self):
        if self.V is None:
            self.V = _zeros_like(self.theta)


@dataclass
class SghmcState:
    theta: np.ndarray
    v: np.ndarray = None
    t: int = 0

    def __post_init__(self):
        if self.v is None:
            self.v = _zeros_like(self.theta)


@dataclass
class AdamState:
    theta: np.ndarray
    m: np.ndarray = None
    V: np.ndarray = None
    t: int = 0

    def __post_init__(self):
        if self.m is None:
            self.m = _zeros_like(self.theta)
        if self.V is None:
            self.V = _zeros_like(self.theta)


@dataclass
class SgdState:
    theta: np.ndarray
    t: int = 0


def _checked(g, state):
    g = np.asarray(g, dtype=float)
    if g.shape != state.theta.shape:
        raise ConfigurationError(f"gradient shape {g.shape} does not match parameters {state.theta.shape}")
    if not np.all(np.isfinite(g)):
        raise DivergenceError(f"non-finite gradient at iteration {state.t}", state.t, state.theta)
    return g


def validate_asgld(beta1, beta2, lam):
    if not 0 < beta1 < 1 or not 0 < beta2 < 1:
        raise ConfigurationError("ASGLD smoothing factors must lie in (0, 1)")
    if beta1**2 >= beta2:
        raise ConfigurationError(f"ASGLD requires beta1**2 < beta2, got beta1={beta1}, beta2={beta2}")
    if lam <= 0:
        raise ConfigurationError(f"ASGLD stabilizer must be positive, got {lam}")


def asgld_bias_bound(beta1, beta2):
    """Sup-norm bound on ``m / sqrt(V + λ)`` implied by Cauchy-Schwarz when ``β1² < β2``."""
    if beta1**2 >= beta2:
        raise ConfigurationError("bound requires beta1**2 < beta2")
    return float(np.sqrt((1 - beta1) ** 2 / (1 - beta2) / (1 - beta1**2 / beta2)))


def sgld_step(state, g, eps, tau, rng):
    g = _checked(g, state)
    noise = gaussian_step_noise(g.size, eps, tau, rng)
    return SgldState(state.theta - eps * g + noise, state.t + 1)


def msgld_step(state, g, eps, tau, a, beta1, rng):
    if not 0 < beta1 <= 1:
        raise ConfigurationError(f"MSGLD smoothing factor must lie in (0, 1], got {beta1}")
    g = _checked(g, state)
    noise = gaussian_step_noise(g.size, eps, tau, rng)
    theta = state.theta - eps * (g + a * state.m) + noise
    m = beta1 * state.m + (1 - beta1) * g
    return MsgldState(theta, m, state.t + 1)


def asgld_step(state, g, eps, tau, a, beta1, beta2, lam, rng):
    validate_asgld(beta1, beta2, lam)
    g = _checked(g, state)
    noise = gaussian_step_noise(g.size, eps, tau, rng)
    theta = state.theta - eps * (g + a * state.m / np.sqrt(state.V + lam)) + noise
    m = beta1 * state.m + (1 - beta1) * g
    V = beta2 * state.V + (1 - beta2) * g * g
    return AsgldState(theta, m, V, state.t + 1)


def psgld_step(state, g, eps, tau, beta, lam, rng):
    if not 0 < beta < 1:
        raise ConfigurationError(f"pSGLD smoothing factor must lie in (0, 1), got {beta}")
    if lam <= 0:
        raise ConfigurationError(f"pSGLD stabilizer must be positive, got {lam}")
    g = _checked(g, state)
    V = beta * state.V + (1 - beta) * g * g
    G = 1.0 / (lam + np.sqrt(V))
    noise = np.sqrt(G) * gaussian_step_noise(g.size, eps, tau, rng)
    return PsgldState(state.theta - eps * G * g + noise, V, state.t + 1)


def sghmc_step(state, g, eps, tau, beta1, rng):
    if not 0 <= beta1 < 1:
        raise ConfigurationError(f"SGHMC momentum must lie in [0, 1), got {beta1}")
    g = _checked(g, state)
    noise = np.sqrt(1 - beta1) * gaussian_step_noise(g.size, eps, tau, rng)
    v = beta1 * state.v - eps * g + noise
    return SghmcState(state.theta + v, v, state.t + 1)


def sgd_step(state, g, eps):
    g = _checked(g, state)
    return SgdState(state.theta - eps * g, state.t + 1)


def adam_step(state, g, eps, beta1, beta2, lam):
    g = _checked(g, state)
    t = state.t + 1
    m = beta1 * state.m + (1 - beta1) * g
    V = beta2 * state.V + (1 - beta2) * g * g
    m_hat = m / (1 - beta1**t)
    V_hat = V / (1 - beta2**t)
    return AdamState(state.theta - eps * m_hat / (np.sqrt(V_hat) + lam), m, V, t)
