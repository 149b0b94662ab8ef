"""Batch attack drivers: many originals, one shared immutable model."""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from ..exceptions import ConfigError
from .config import AttackConfig
from .loops import attack_image_space, attack_latent_space, attack_style_space

_VAE_LOOPS = {"image_space": attack_image_space, "latent_space": attack_latent_space}


def run_vae_campaign(model, images, config: AttackConfig, progress=None):
    """Attack each image independently; per-sample seeds derive from the base seed."""
    cfg = config.resolved()
    if cfg.mode not in _VAE_LOOPS:
        raise ConfigError(f"mode {cfg.mode!r} does not attack a VAE")
    loop = _VAE_LOOPS[cfg.mode]
    results = []
    for i, x_ori in enumerate(images):
        results.append(loop(x_ori, model, replace(cfg, seed=cfg.seed + i)))
        if progress:
            progress(i, results[-1])
    return results


def sample_style_origins(gen, n, seed=0):
    """n style matrices from seeded standard-normal latents through the mapping."""
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n, gen.config.z_dim))
    return gen.map_style(z)


def run_style_campaign(gen, w_origins, config: AttackConfig, progress=None):
    cfg = config.resolved()
    if cfg.mode != "style_space":
        raise ConfigError(f"mode {cfg.mode!r} does not attack a style generator")
    results = []
    for i, w_ori in enumerate(w_origins):
        results.append(attack_style_space(w_ori, gen, replace(cfg, seed=cfg.seed + i)))
        if progress:
            progress(i, results[-1])
    return results
