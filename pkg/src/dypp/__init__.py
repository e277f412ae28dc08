"""Simulator of the dynamic privacy pricing game between an FL curator and data owners."""
from .engine import GameConfig, init_population, run_iteration, run_simulation
from .game_model import ActionGrids, DOProfile, EconParams, LossModelParams
from .kernels import DEFAULT_BACKEND

__version__ = "0.1.0"

__all__ = ["ActionGrids", "DOProfile", "EconParams", "LossModelParams", "GameConfig", "init_population",
           "run_iteration", "run_simulation", "DEFAULT_BACKEND", "__version__"]
