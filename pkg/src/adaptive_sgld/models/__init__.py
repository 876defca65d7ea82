from .base import EnergyModel, finite_difference_grad, injected_noise_grad
from .gaussian import CorrelatedGaussian, gaussian_grad
from .mixture import FIVE_MODES, MixtureGaussian5, mixture_energy_grad
from .ravine import (
    TRUE_THETA,
    RavineRegression,
    load_ravine_csv,
    make_ravine_dataset,
    ravine_jacobian,
    ravine_predict,
    ravine_stoch_grad,
    save_ravine_csv,
)

__all__ = [
    "EnergyModel",
    "CorrelatedGaussian",
    "MixtureGaussian5",
    "RavineRegression",
    "FIVE_MODES",
    "TRUE_THETA",
    "finite_difference_grad",
    "gaussian_grad",
    "injected_noise_grad",
    "load_ravine_csv",
    "make_ravine_dataset",
    "mixture_energy_grad",
    "ravine_jacobian",
    "ravine_predict",
    "ravine_stoch_grad",
    "save_ravine_csv",
]
