"""Type I attack engine: losses, adaptive weight schedule, iterative loops."""

from .campaign import run_style_campaign, run_vae_campaign, sample_style_origins
from .config import MODES, NORMS, SCHEDULERS, AttackConfig
from .loops import (
    AttackResult,
    TrajectoryPoint,
    attack_image_space,
    attack_latent_space,
    attack_style_space,
    check_success,
)
from .losses import (
    hinge,
    loss_image_space,
    loss_latent_space,
    loss_style_space,
    norm_distance,
    norm_distance_with_grad,
)
from .scheduler import (
    BETA_INIT_FLOOR,
    SchedulerState,
    init_beta,
    maybe_init_beta,
    update_lambda,
)

__all__ = [
    "AttackConfig",
    "AttackResult",
    "TrajectoryPoint",
    "SchedulerState",
    "MODES",
    "NORMS",
    "SCHEDULERS",
    "BETA_INIT_FLOOR",
    "attack_image_space",
    "attack_latent_space",
    "attack_style_space",
    "check_success",
    "loss_image_space",
    "loss_latent_space",
    "loss_style_space",
    "norm_distance",
    "norm_distance_with_grad",
    "hinge",
    "init_beta",
    "maybe_init_beta",
    "update_lambda",
    "run_vae_campaign",
    "run_style_campaign",
    "sample_style_origins",
]
