"""Target generative models: convolutional VAE and toy style-based generator."""

from .checkpoint import load_checkpoint, peek_checkpoint, save_checkpoint
from .stylegen import StyleGenConfig, StyleGenerator
from .train import TrainConfig, TrainResult, mean_reconstruction_rmsd, train_vae
from .vae import VAE, LatentDistribution, VAEConfig

__all__ = [
    "VAE",
    "VAEConfig",
    "LatentDistribution",
    "StyleGenerator",
    "StyleGenConfig",
    "TrainConfig",
    "TrainResult",
    "train_vae",
    "mean_reconstruction_rmsd",
    "save_checkpoint",
    "load_checkpoint",
    "peek_checkpoint",
]
