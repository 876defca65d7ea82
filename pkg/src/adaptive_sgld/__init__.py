"""Stochastic gradient Langevin samplers with adaptive drift (MSGLD, ASGLD) and baselines."""

__version__ = "0.1.0"

from .chain import Trace, concatenate_traces, run_chain
from .config import ExperimentConfig, list_presets, load_config, load_preset
from .core import ConfigurationError, Schedule, make_rng, step_decay_rate
from .diagnostics import (
    ContourGrid,
    CovErrorCurve,
    cov_error,
    density_contour_from_samples,
    mode_coverage,
    mse_scaling,
    posterior_mean,
)
from .kernels import DivergenceError, asgld_bias_bound
from .mlp import MLP, GaussianPrior, MixturePrior, MLPEnergy, accuracy, sparsity_ratio, sparsity_threshold
from .models import CorrelatedGaussian, MixtureGaussian5, RavineRegression
from .samplers import ASGLD, MSGLD, PSGLD, SGD, SGHMC, SGLD, Adam, make_sampler
from .estimators import BayesianMLPClassifier

__all__ = [
    "ASGLD", "MSGLD", "PSGLD", "SGD", "SGHMC", "SGLD", "Adam", "make_sampler",
    "BayesianMLPClassifier",
    "CorrelatedGaussian", "MixtureGaussian5", "RavineRegression",
    "MLP", "MLPEnergy", "GaussianPrior", "MixturePrior", "accuracy", "sparsity_ratio", "sparsity_threshold",
    "Trace", "run_chain", "concatenate_traces",
    "Schedule", "step_decay_rate", "make_rng", "ConfigurationError", "DivergenceError", "asgld_bias_bound",
    "cov_error", "CovErrorCurve", "density_contour_from_samples", "ContourGrid", "mode_coverage",
    "mse_scaling", "posterior_mean",
    "ExperimentConfig", "list_presets", "load_config", "load_preset",
]
