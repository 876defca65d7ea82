"""Shared numeric primitives: learning-rate schedules, step noise and seeded RNG streams."""

from dataclasses import dataclass

import numpy as np


class ConfigurationError(ValueError):
    """Raised when hyperparameters or experiment settings are invalid."""


def step_decay_rate(eps0, gamma, L, k):
    """Learning rate ``eps0 * gamma ** floor(k / L)`` for epoch index ``k``."""
    if eps0 <= 0:
        raise ConfigurationError(f"initial learning rate must be positive, got {eps0}")
    if L < 1:
        raise ConfigurationError(f"decay period must be >= 1 epoch, got {L}")
    if not 0 < gamma <= 1:
        raise ConfigurationError(f"decay factor must lie in (0, 1], got {gamma}")
    if k < 0:
        raise ConfigurationError(f"epoch index must be non-negative, got {k}")
    return eps0 * gamma ** (k // L)


@dataclass(frozen=True)
class Schedule:
    """Per-epoch learning rate.

    ``kind="constant"`` always returns ``eps0``; ``kind="step-decay"``
    halves (or multiplies by ``gamma``) every ``step_epochs`` epochs.
    """

    eps0: float
    kind: str = "constant"
    gamma: float = 1.0
    step_epochs: int = 1

    def __post_init__(self):
        if self.kind not in ("constant", "step-decay"):
            raise ConfigurationError(f"unknown schedule kind {self.kind!r}")
        # validates eps0 / gamma / step_epochs eagerly
        step_decay_rate(self.eps0, self.gamma, self.step_epochs, 0)

    def __call__(self, epoch):
        if self.kind == "constant":
            return self.eps0
        return step_decay_rate(self.eps0, self.gamma, self.step_epochs, epoch)

    @classmethod
    def constant(cls, eps0):
        return cls(eps0=eps0)

    @classmethod
    def step_decay(cls, eps0, gamma, step_epochs):
        return cls(eps0=eps0, kind="step-decay", gamma=gamma, step_epochs=step_epochs)


def make_rng(seed, stream_id=0):
    """Independent, reproducible generator for one chain.

    Streams are derived with ``SeedSequence(seed, spawn_key=(stream_id,))``,
    so distinct ``stream_id`` values under one seed never overlap.
    """
    if seed is None:
        raise ConfigurationError("an explicit seed is required for reproducible chains")
    seq = np.random.SeedSequence(int(seed), spawn_key=(int(stream_id),))
    return np.random.Generator(np.random.PCG64(seq))


def check_random_state(random_state, stream_id=0):
    if isinstance(random_state, np.random.Generator):
        return random_state
    if random_state is None:
        return np.random.default_rng()
    return make_rng(random_state, stream_id)


def gaussian_step_noise(d, eps, tau, rng):
    """Draw a ``d``-vector from ``N(0, 2 * eps * tau * I)``.

    Zero temperature returns zeros without consuming random numbers.
    """
    if d < 1:
        raise ConfigurationError("noise dimension must be at least 1")
    if eps <= 0:
        raise ConfigurationError(f"learning rate must be positive, got {eps}")
    if tau < 0:
        raise ConfigurationError(f"temperature must be non-negative, got {tau}")
    if tau == 0:
        return np.zeros(d)
    return np.sqrt(2.0 * eps * tau) * rng.standard_normal(d)
