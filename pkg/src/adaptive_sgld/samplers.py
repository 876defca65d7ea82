"""Sampler and optimizer estimators.

Each class stores its hyperparameters sklearn-style (``get_params`` /
``set_params`` / ``clone`` work) and exposes:

* ``init_state(theta0)`` and ``step(state, g, eps, rng)``, the one-step kernel;
* ``fit(model)``, which runs a chain and stores ``trace_`` and
  ``posterior_mean_``.
"""

import numpy as np
from sklearn.base import BaseEstimator

from . import kernels
from .chain import run_chain
from .core import ConfigurationError, Schedule, check_random_state


class BaseSampler(BaseEstimator):
    objective = "posterior"

    @property
    def schedule(self):
        if self.lr_step_epochs is None:
            return Schedule.constant(self.learning_rate)
        return Schedule.step_decay(self.learning_rate, self.lr_gamma, self.lr_step_epochs)

    def _validate(self):
        if self.learning_rate <= 0:
            raise ConfigurationError("learning_rate must be positive")
        if getattr(self, "temperature", 0.0) < 0:
            raise ConfigurationError("temperature must be non-negative")
        if self.burn_in >= self.n_iter:
            raise ConfigurationError("burn_in must be smaller than n_iter")
        self.schedule  # noqa: B018 - validates the schedule fields

    def invariant_bound(self):
        return None

    def invariant_value(self, state):
        return 0.0

    def fit(self, model, theta0=None):
        """Run one chain on ``model`` and keep the trace."""
        self._validate()
        rng = check_random_state(self.random_state)
        self.trace_ = run_chain(
            model,
            self,
            self.n_iter,
            self.burn_in,
            self.thinning,
            rng,
            theta0=theta0,
            record_energy=self.record_energy,
            check_invariants=self.check_invariants,
            seed=self.random_state if not isinstance(self.random_state, np.random.Generator) else None,
        )
        if len(self.trace_):
            self.posterior_mean_ = self.trace_.samples.mean(axis=0)
        else:
            self.posterior_mean_ = np.full(model.dim, np.nan)
        self.diverged_ = self.trace_.diverged
        return self


class SGLD(BaseSampler):
    """Stochastic gradient Langevin dynamics."""

    def __init__(
        self,
        learning_rate=1e-4,
        temperature=1.0,
        n_iter=1000,
        burn_in=0,
        thinning=1,
        lr_gamma=1.0,
        lr_step_epochs=None,
        random_state=None,
        record_energy=True,
        check_invariants=False,
    ):
        self.learning_rate = learning_rate
        self.temperature = temperature
        self.n_iter = n_iter
        self.burn_in = burn_in
        self.thinning = thinning
        self.lr_gamma = lr_gamma
        self.lr_step_epochs = lr_step_epochs
        self.random_state = random_state
        self.record_energy = record_energy
        self.check_invariants = check_invariants

    def init_state(self, theta0):
        return kernels.SgldState(np.array(theta0, dtype=float))

    def step(self, state, g, eps, rng):
        return kernels.sgld_step(state, g, eps, self.temperature, rng)


class MSGLD(BaseSampler):
    """SGLD whose drift is biased by ``bias_factor`` times a momentum average of past gradients."""

    def __init__(
        self,
        learning_rate=1e-4,
        temperature=1.0,
        bias_factor=1.0,
        beta1=0.9,
        n_iter=1000,
        burn_in=0,
        thinning=1,
        lr_gamma=1.0,
        lr_step_epochs=None,
        random_state=None,
        record_energy=True,
        check_invariants=False,
    ):
        self.learning_rate = learning_rate
        self.temperature = temperature
        self.bias_factor = bias_factor
        self.beta1 = beta1
        self.n_iter = n_iter
        self.burn_in = burn_in
        self.thinning = thinning
        self.lr_gamma = lr_gamma
        self.lr_step_epochs = lr_step_epochs
        self.random_state = random_state
        self.record_energy = record_energy
        self.check_invariants = check_invariants

    def _validate(self):
        super()._validate()
        if not 0 < self.beta1 <= 1:
            raise ConfigurationError("MSGLD beta1 must lie in (0, 1]")

    def init_state(self, theta0):
        return kernels.MsgldState(np.array(theta0, dtype=float))

    def step(self, state, g, eps, rng):
        return kernels.msgld_step(state, g, eps, self.temperature, self.bias_factor, self.beta1, rng)


class ASGLD(BaseSampler):
    """SGLD biased by an Adam-style rescaled momentum ``m / sqrt(V + lam)``.

    Requires ``beta1**2 < beta2``; under that condition every coordinate of
    the rescaled momentum is bounded by :func:`kernels.asgld_bias_bound`,
    which ``check_invariants=True`` asserts after every step.
    """

    def __init__(
        self,
        learning_rate=1e-4,
        temperature=1.0,
        bias_factor=1.0,
        beta1=0.9,
        beta2=0.999,
        lam=1e-8,
        n_iter=1000,
        burn_in=0,
        thinning=1,
        lr_gamma=1.0,
        lr_step_epochs=None,
        random_state=None,
        record_energy=True,
        check_invariants=False,
    ):
        self.learning_rate = learning_rate
        self.temperature = temperature
        self.bias_factor = bias_factor
        self.beta1 = beta1
        self.beta2 = beta2
        self.lam = lam
        self.n_iter = n_iter
        self.burn_in = burn_in
        self.thinning = thinning
        self.lr_gamma = lr_gamma
        self.lr_step_epochs = lr_step_epochs
        self.random_state = random_state
        self.record_energy = record_energy
        self.check_invariants = check_invariants

    def _validate(self):
        super()._validate()
        kernels.validate_asgld(self.beta1, self.beta2, self.lam)

    def init_state(self, theta0):
        return kernels.AsgldState(np.array(theta0, dtype=float))

    def step(self, state, g, eps, rng):
        return kernels.asgld_step(
            state, g, eps, self.temperature, self.bias_factor, self.beta1, self.beta2, self.lam, rng
        )

    def invariant_bound(self):
        # absolute slack for round-off in the recursions
        return kernels.asgld_bias_bound(self.beta1, self.beta2) + 1e-9

    def invariant_value(self, state):
        return float(np.max(np.abs(state.m / np.sqrt(state.V + self.lam)), initial=0.0))


class PSGLD(BaseSampler):
    """Preconditioned SGLD with an RMSprop diagonal ``1 / (lam + sqrt(V))``."""

    def __init__(
        self,
        learning_rate=1e-4,
        temperature=1.0,
        beta=0.99,
        lam=1e-5,
        n_iter=1000,
        burn_in=0,
        thinning=1,
        lr_gamma=1.0,
        lr_step_epochs=None,
        random_state=None,
        record_energy=True,
        check_invariants=False,
    ):
        self.learning_rate = learning_rate
        self.temperature = temperature
        self.beta = beta
        self.lam = lam
        self.n_iter = n_iter
        self.burn_in = burn_in
        self.thinning = thinning
        self.lr_gamma = lr_gamma
        self.lr_step_epochs = lr_step_epochs
        self.random_state = random_state
        self.record_energy = record_energy
        self.check_invariants = check_invariants

    def init_state(self, theta0):
        return kernels.PsgldState(np.array(theta0, dtype=float))

    def step(self, state, g, eps, rng):
        return kernels.psgld_step(state, g, eps, self.temperature, self.beta, self.lam, rng)


class SGHMC(BaseSampler):
    """Momentum-SGD-plus-noise discretisation of stochastic gradient HMC."""

    def __init__(
        self,
        learning_rate=1e-5,
        temperature=1.0,
        beta1=0.9,
        n_iter=1000,
        burn_in=0,
        thinning=1,
        lr_gamma=1.0,
        lr_step_epochs=None,
        random_state=None,
        record_energy=True,
        check_invariants=False,
    ):
        self.learning_rate = learning_rate
        self.temperature = temperature
        self.beta1 = beta1
        self.n_iter = n_iter
        self.burn_in = burn_in
        self.thinning = thinning
        self.lr_gamma = lr_gamma
        self.lr_step_epochs = lr_step_epochs
        self.random_state = random_state
        self.record_energy = record_energy
        self.check_invariants = check_invariants

    def init_state(self, theta0):
        return kernels.SghmcState(np.array(theta0, dtype=float))

    def step(self, state, g, eps, rng):
        return kernels.sghmc_step(state, g, eps, self.temperature, self.beta1, rng)


class SGD(BaseSampler):
    """Plain SGD on the per-example loss plus ``weight_decay/2 * ||θ||²``."""

    objective = "regularized"

    def __init__(
        self,
        learning_rate=0.1,
        weight_decay=5e-4,
        n_iter=1000,
        burn_in=0,
        thinning=1,
        lr_gamma=1.0,
        lr_step_epochs=None,
        random_state=None,
        record_energy=True,
        check_invariants=False,
    ):
        self.learning_rate = learning_rate
        self.weight_decay = weight_decay
        self.n_iter = n_iter
        self.burn_in = burn_in
        self.thinning = thinning
        self.lr_gamma = lr_gamma
        self.lr_step_epochs = lr_step_epochs
        self.random_state = random_state
        self.record_energy = record_energy
        self.check_invariants = check_invariants

    def init_state(self, theta0):
        return kernels.SgdState(np.array(theta0, dtype=float))

    def step(self, state, g, eps, rng):
        return kernels.sgd_step(state, g, eps)


class Adam(BaseSampler):
    """Bias-corrected Adam on the same regularized objective as :class:`SGD`."""

    objective = "regularized"

    def __init__(
        self,
        learning_rate=1e-3,
        beta1=0.9,
        beta2=0.999,
        lam=1e-8,
        weight_decay=0.0,
        n_iter=1000,
        burn_in=0,
        thinning=1,
        lr_gamma=1.0,
        lr_step_epochs=None,
        random_state=None,
        record_energy=True,
        check_invariants=False,
    ):
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.lam = lam
        self.weight_decay = weight_decay
        self.n_iter = n_iter
        self.burn_in = burn_in
        self.thinning = thinning
        self.lr_gamma = lr_gamma
        self.lr_step_epochs = lr_step_epochs
        self.random_state = random_state
        self.record_energy = record_energy
        self.check_invariants = check_invariants

    def init_state(self, theta0):
        return kernels.AdamState(np.array(theta0, dtype=float))

    def step(self, state, g, eps, rng):
        return kernels.adam_step(state, g, eps, self.beta1, self.beta2, self.lam)


SAMPLERS = {
    "sgld": SGLD,
    "msgld": MSGLD,
    "asgld": ASGLD,
    "psgld": PSGLD,
    "sghmc": SGHMC,
    "sgd": SGD,
    "adam": Adam,
}


def make_sampler(kind, **params):
    try:
        cls = SAMPLERS[kind]
    except KeyError:
        raise ConfigurationError(f"unknown sampler {kind!r}; choose from {sorted(SAMPLERS)}") from None
    try:
        return cls(**params)
    except TypeError as exc:
        raise ConfigurationError(f"bad parameters for {kind}: {exc}") from None
