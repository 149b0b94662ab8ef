"""typeone: Type I adversarial attacks on small generative models.

A Type I attack changes a generator's input drastically while the generated
or reconstructed output stays essentially unchanged. The package trains the
target models (a convolutional VAE and a toy style-based generator), runs
gradient-based attacks in image, latent, and style space, and aggregates the
resulting distance tables and figure grids.
"""

from . import attack, data, metrics, models
from .attack import AttackConfig, AttackResult
from .exceptions import (
    CheckpointError,
    ConfigError,
    DataError,
    DegenerateReferenceError,
    InvalidInputError,
    NumericalError,
    TrainingError,
    TypeOneError,
)

__version__ = "0.1.0"

__all__ = [
    "attack",
    "data",
    "metrics",
    "models",
    "AttackConfig",
    "AttackResult",
    "TypeOneError",
    "InvalidInputError",
    "ConfigError",
    "TrainingError",
    "NumericalError",
    "CheckpointError",
    "DataError",
    "DegenerateReferenceError",
    "__version__",
]
