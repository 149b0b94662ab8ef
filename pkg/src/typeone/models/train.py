"""VAE training: Adam on summed Bernoulli cross-entropy (gradients taken at
the decoder logits, which stays well-conditioned where sigmoid outputs
saturate) plus a weighted KL term. The reparameterization noise and batch
shuffling come from one seeded generator, so a rerun with the same config
reproduces the same weights."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..exceptions import InvalidInputError, TrainingError
from . import nn
from .checkpoint import save_checkpoint
from .vae import VAE, VAEConfig


@dataclass
class TrainConfig:
    latent_dim: int = 16
    channels: int = 16
    epochs: int = 12
    batch_size: int = 128
    lr: float = 2e-3
    kl_weight: float = 1.0
    seed: int = 0
    checkpoint_path: str | None = None


@dataclass
class TrainResult:
    model: VAE
    final_test_rmsd: float
    epoch_losses: list = field(default_factory=list)


def _splits(dataset):
    train = getattr(dataset, "train", None)
    test = getattr(dataset, "test", None)
    if train is None and isinstance(dataset, (tuple, list)) and len(dataset) == 2:
        train, test = dataset
    if train is None:
        train, test = dataset, None
    train = np.asarray(train, dtype=np.float64)
    test = train if test is None or len(test) == 0 else np.asarray(test, dtype=np.float64)
    return train, test


def mean_reconstruction_rmsd(model, images, batch_size=256):
    """Mean per-image RMSD between x and d(e(x)) over an image batch."""
    total = 0.0
    for start in range(0, len(images), batch_size):
        chunk = images[start:start + batch_size]
        recon = model.reconstruct(chunk)
        per_image = np.sqrt(((recon - chunk) ** 2).mean(axis=(1, 2, 3)))
        total += per_image.sum()
    return total / len(images)


def train_vae(dataset, config: TrainConfig) -> TrainResult:
    """Train a VAE on `dataset` (object with .train/.test arrays, or a
    (train, test) pair). Returns the model plus the final test RMSD; raises
    TrainingError with the epoch index if the loss goes non-finite."""
    train, test = _splits(dataset)
    if train.size == 0:
        raise InvalidInputError("training dataset is empty")
    if train.ndim != 4:
        raise InvalidInputError(f"expected (N,C,H,W) images, got shape {train.shape}")
    if train.min() < 0.0 or train.max() > 1.0:
        raise InvalidInputError("images must be normalized to [0, 1]")

    rng = np.random.default_rng(config.seed)
    model = VAE(VAEConfig(
        input_shape=train.shape[1:],
        latent_dim=config.latent_dim,
        channels=config.channels,
        seed=config.seed,
    ))
    params = model.state_dict()
    opt = nn.Adam(params, lr=config.lr)
    dz = config.latent_dim
    n = len(train)
    bs = min(config.batch_size, n)
    # decoder minus its final sigmoid: training backprops from the logits
    trunk = nn.Sequential(model.decoder.layers[:-1])

    epoch_losses = []
    for epoch in range(config.epochs):
        order = rng.permutation(n)
        epoch_loss = 0.0
        for start in range(0, n, bs):
            x = train[order[start:start + bs]]
            b = len(x)

            enc_out, enc_caches = model.encoder.forward(x)
            mean, logvar = enc_out[:, :dz], enc_out[:, dz:]
            noise = rng.standard_normal(mean.shape)
            std = np.exp(0.5 * logvar)
            z = mean + std * noise
            logits, dec_caches = trunk.forward(z)
            recon = nn.sigmoid(logits)

            # BCE(sigmoid(l), x) = max(l,0) - l*x + log(1 + exp(-|l|))
            recon_loss = (np.maximum(logits, 0.0) - logits * x + np.log1p(np.exp(-np.abs(logits)))).sum() / b
            kl = -0.5 * (1.0 + logvar - mean**2 - np.exp(logvar)).sum() / b
            loss = recon_loss + config.kl_weight * kl
            if not np.isfinite(loss):
                raise TrainingError(f"non-finite loss at epoch {epoch}", epoch=epoch)
            epoch_loss += loss * b

            dlogits = (recon - x) / b
            dz_grad, dec_grads = trunk.backward(dec_caches, dlogits)
            dmean = dz_grad + config.kl_weight * mean / b
            dlogvar = dz_grad * noise * 0.5 * std + config.kl_weight * 0.5 * (np.exp(logvar) - 1.0) / b
            denc = np.concatenate([dmean, dlogvar], axis=1)
            _, enc_grads = model.encoder.backward(enc_caches, denc)

            grads = {f"decoder.{k}": v for k, v in dec_grads.items()}
            grads.update({f"encoder.{k}": v for k, v in enc_grads.items()})
            opt.step(grads)
        epoch_losses.append(epoch_loss / n)

    final = mean_reconstruction_rmsd(model, test)
    if config.checkpoint_path:
        save_checkpoint(model, config.checkpoint_path)
    return TrainResult(model=model, final_test_rmsd=float(final), epoch_losses=epoch_losses)
