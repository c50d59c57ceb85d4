"""Energy-based model with an exactly summed partition function."""
from .checkpoint import load_checkpoint, save_checkpoint
from .network import NetArchitecture, init_params
from .objective import (
    energies_all, grad_nll, grad_population, log_partition, model_distribution, nll_loss,
    population_loss,
)
from .optim import Adam, EarlyStopping, ReduceOnPlateau
from .train import TrainConfig, TrainHistory, TrainingDiverged, train

__all__ = [
    "Adam", "EarlyStopping", "NetArchitecture", "ReduceOnPlateau", "TrainConfig", "TrainHistory",
    "TrainingDiverged", "energies_all", "grad_nll", "grad_population", "init_params",
    "load_checkpoint", "log_partition", "model_distribution", "nll_loss", "population_loss",
    "save_checkpoint", "train",
]
