"""scikit-learn classifier wrapping an MLP posterior sampler."""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, clone
from sklearn.preprocessing import LabelEncoder
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .chain import concatenate_traces, run_chain
from .core import ConfigurationError, check_random_state
from .mlp import MLP, GaussianPrior, MixturePrior, MLPEnergy, predict_proba_average, sparsity_ratio
from .samplers import SGLD


class BayesianMLPClassifier(ClassifierMixin, BaseEstimator):
    """ReLU network classifier whose predictions average over posterior samples.

    Parameters
    ----------
    hidden_layer_sizes : tuple of int
    sampler : sampler estimator, default SGLD
        Supplies the kernel, learning-rate schedule and burn-in/thinning.
        Its ``n_iter`` is ignored when ``epochs`` is set.
    epochs : int or None
        Chain length in passes over the training data.
    batch_size : int
    prior : GaussianPrior or MixturePrior, default N(0, 1)
    prior_switch : (epoch, prior) or None
        Replace the prior at the given epoch, keeping the sampler state.
    random_state : int or None
    """

    def __init__(
        self,
        hidden_layer_sizes=(30, 30),
        sampler=None,
        epochs=None,
        batch_size=50,
        prior=None,
        prior_switch=None,
        random_state=None,
    ):
        self.hidden_layer_sizes = hidden_layer_sizes
        self.sampler = sampler
        self.epochs = epochs
        self.batch_size = batch_size
        self.prior = prior
        self.prior_switch = prior_switch
        self.random_state = random_state

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        self.label_encoder_ = LabelEncoder().fit(y)
        self.classes_ = self.label_encoder_.classes_
        yk = self.label_encoder_.transform(y)
        self.n_features_in_ = X.shape[1]
        self.net_ = MLP([X.shape[1], *self.hidden_layer_sizes, len(self.classes_)])
        prior = GaussianPrior() if self.prior is None else self.prior
        model = MLPEnergy(self.net_, X, yk, prior, batch_size=min(self.batch_size, len(X)))

        sampler = clone(self.sampler) if self.sampler is not None else SGLD()
        if self.epochs is not None:
            sampler.set_params(n_iter=self.epochs * model.iterations_per_epoch)
        sampler._validate()
        rng = check_random_state(self.random_state)
        n_iter, burn, thin = sampler.n_iter, sampler.burn_in, sampler.thinning
        kw = dict(check_invariants=sampler.check_invariants, record_energy=False)
        if self.prior_switch is None:
            trace = run_chain(model, sampler, n_iter, burn, thin, rng, **kw)
        else:
            epoch, new_prior = self.prior_switch
            if not isinstance(new_prior, (GaussianPrior, MixturePrior)):
                raise ConfigurationError("prior_switch must be (epoch, prior)")
            at = int(epoch) * model.iterations_per_epoch
            first = run_chain(model, sampler, n_iter, burn, thin, rng, stop_at=at, **kw)
            if first.diverged:
                trace = first
            else:
                second = run_chain(model.with_prior(new_prior), sampler, n_iter, burn, thin, rng,
                                   state=first.final_state, start_iteration=at, **kw)
                trace = concatenate_traces(first, second)
        if trace.diverged:
            raise FloatingPointError(f"sampler diverged at iteration {trace.divergence_iteration}")
        if len(trace) == 0:
            raise ConfigurationError("no samples retained; check burn_in and thinning")
        self.sampler_ = sampler
        self.trace_ = trace
        self.samples_ = trace.samples
        return self

    def predict_proba(self, X):
        check_is_fitted(self, "samples_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return predict_proba_average(self.net_, self.samples_, X)

    def predict(self, X):
        return self.classes_[np.argmax(self.predict_proba(X), axis=1)]

    def sparsity(self, prior=None):
        """Percentage of connection weights in the last sample above the slab/spike threshold."""
        check_is_fitted(self, "samples_")
        if prior is None:
            prior = self.prior_switch[1] if self.prior_switch is not None else self.prior
        if not isinstance(prior, MixturePrior):
            prior = MixturePrior()
        return sparsity_ratio(self.samples_[-1][self.net_.weight_mask()], prior)
