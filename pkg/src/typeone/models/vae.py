"""Convolutional VAE target model.

The attack path is fully deterministic: `reconstruct` decodes the posterior
mean (no sampling), so gradients with respect to the input are well defined
and reproducible. Sampling happens only inside training.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..exceptions import InvalidInputError
from . import nn


@dataclass(frozen=True)
class VAEConfig:
    input_shape: tuple  # (C, H, W); H and W divisible by 4
    latent_dim: int
    channels: int = 16
    seed: int = 0

    def __post_init__(self):
        c, h, w = self.input_shape
        if h % 4 or w % 4:
            raise InvalidInputError(f"input H/W must be divisible by 4, got {h}x{w}")
        if self.latent_dim < 1:
            raise InvalidInputError("latent_dim must be >= 1")


@dataclass
class LatentDistribution:
    """Gaussian posterior parameters produced by the encoder."""

    mean: np.ndarray
    log_variance: np.ndarray

    def __post_init__(self):
        if self.mean.shape != self.log_variance.shape:
            raise InvalidInputError(
                f"mean/log_variance shape mismatch: {self.mean.shape} vs {self.log_variance.shape}"
            )


class VAE:
    """Encoder e(.) mapping images to latent-distribution parameters plus
    decoder d(.) mapping latent vectors back to [0,1] images."""

    kind = "vae"

    def __init__(self, config: VAEConfig):
        self.config = config
        c, h, w = config.input_shape
        ch = config.channels
        dz = config.latent_dim
        rng = np.random.default_rng(config.seed)
        hq, wq = h // 4, w // 4
        self.encoder = nn.Sequential([
            nn.Conv2d(c, ch, 3, rng, stride=2),        # (ch, H/2, W/2)
            nn.ReLU(),
            nn.Conv2d(ch, 2 * ch, 3, rng, stride=2),   # (2ch, H/4, W/4)
            nn.ReLU(),
            nn.Flatten(),
            nn.Dense(2 * ch * hq * wq, 2 * dz, rng, gain=1.0),  # mean ++ logvar
        ])
        self.decoder = nn.Sequential([
            nn.Dense(dz, 2 * ch * hq * wq, rng),
            nn.ReLU(),
            nn.Reshape((2 * ch, hq, wq)),
            nn.Upsample2x(),
            nn.Conv2d(2 * ch, ch, 3, rng),             # (ch, H/2, W/2)
            nn.ReLU(),
            nn.Upsample2x(),
            nn.Conv2d(ch, c, 3, rng, gain=1.0),        # (c, H, W)
            nn.Sigmoid(),
        ])

    # ---- shape plumbing -------------------------------------------------

    @property
    def input_shape(self):
        return self.config.input_shape

    @property
    def latent_dim(self):
        return self.config.latent_dim

    def _batch_images(self, x):
        x = np.asarray(x, dtype=np.float64)
        if x.shape == self.input_shape:
            return x[None], True
        if x.ndim == 4 and x.shape[1:] == self.input_shape:
            return x, False
        raise InvalidInputError(
            f"image shape {x.shape} does not match model input {self.input_shape}"
        )

    def _batch_latents(self, z):
        z = np.asarray(z, dtype=np.float64)
        dz = self.config.latent_dim
        if z.shape == (dz,):
            return z[None], True
        if z.ndim == 2 and z.shape[1] == dz:
            return z, False
        raise InvalidInputError(f"latent shape {z.shape} does not match D_z={dz}")

    # ---- forward paths ---------------------------------------------------

    def encode(self, x) -> LatentDistribution:
        xb, single = self._batch_images(x)
        out, _ = self.encoder.forward(xb)
        dz = self.config.latent_dim
        mean, logvar = out[:, :dz], out[:, dz:]
        if single:
            mean, logvar = mean[0], logvar[0]
        return LatentDistribution(mean=mean, log_variance=logvar)

    def encode_mean(self, x):
        return self.encode(x).mean

    def decode(self, z):
        zb, single = self._batch_latents(z)
        img, _ = self.decoder.forward(zb)
        return img[0] if single else img

    def reconstruct(self, x):
        """Decode of the posterior mean: the deterministic d(e(x)) path."""
        return self.decode(self.encode_mean(x))

    # ---- vector-Jacobian products for the attack engine -------------------

    def encode_mean_vjp(self, x):
        xb, single = self._batch_images(x)
        out, caches = self.encoder.forward(xb)
        dz = self.config.latent_dim
        mean = out[:, :dz]

        def vjp(dmean):
            dmb = dmean[None] if single else dmean
            dout = np.concatenate([dmb, np.zeros_like(dmb)], axis=1)
            dx, _ = self.encoder.backward(caches, dout, with_param_grads=False)
            return dx[0] if single else dx

        return (mean[0] if single else mean), vjp

    def decode_vjp(self, z):
        zb, single = self._batch_latents(z)
        img, caches = self.decoder.forward(zb)

        def vjp(dimg):
            dib = dimg[None] if single else dimg
            dz_, _ = self.decoder.backward(caches, dib, with_param_grads=False)
            return dz_[0] if single else dz_

        return (img[0] if single else img), vjp

    def reconstruct_vjp(self, x):
        mean, enc_vjp = self.encode_mean_vjp(x)
        recon, dec_vjp = self.decode_vjp(mean)

        def vjp(drecon):
            return enc_vjp(dec_vjp(drecon))

        return recon, vjp

    # ---- weights -----------------------------------------------------------

    def state_dict(self):
        out = {}
        for prefix, net in (("encoder", self.encoder), ("decoder", self.decoder)):
            for name, arr in net.params().items():
                out[f"{prefix}.{name}"] = arr
        return out

    def load_state_dict(self, arrays):
        own = self.state_dict()
        if set(own) != set(arrays):
            missing = set(own) ^ set(arrays)
            raise InvalidInputError(f"weight name mismatch: {sorted(missing)}")
        for name, arr in own.items():
            new = np.asarray(arrays[name], dtype=np.float64)
            if new.shape != arr.shape:
                raise InvalidInputError(f"weight {name}: shape {new.shape} != {arr.shape}")
            arr[...] = new
