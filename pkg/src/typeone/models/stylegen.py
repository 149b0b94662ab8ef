"""Toy style-based generator: mapping MLP plus a synthesis network that grows
a learned 4x4 constant to the target resolution, modulating every layer with
adaptive instance normalization driven by one style row per layer.

There are no stochastic noise inputs, so the image is a deterministic
function of the style matrix and gradients with respect to it are exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..exceptions import InvalidInputError
from . import nn

_IN_EPS = 1e-5  # instance-norm variance floor


def _adain_forward(h, scale, bias):
    # h (N,C,H,W); scale/bias (N,C)
    mu = h.mean(axis=(2, 3), keepdims=True)
    var = h.var(axis=(2, 3), keepdims=True)
    inv = 1.0 / np.sqrt(var + _IN_EPS)
    hn = (h - mu) * inv
    y = scale[:, :, None, None] * hn + bias[:, :, None, None]
    return y, (hn, inv, scale)


def _adain_backward(cache, dy):
    hn, inv, scale = cache
    dbias = dy.sum(axis=(2, 3))
    dscale = (dy * hn).sum(axis=(2, 3))
    dhn = dy * scale[:, :, None, None]
    # instance-norm backward: remove the components along 1 and hn
    dh = inv * (
        dhn
        - dhn.mean(axis=(2, 3), keepdims=True)
        - hn * (dhn * hn).mean(axis=(2, 3), keepdims=True)
    )
    return dh, dscale, dbias


@dataclass(frozen=True)
class StyleGenConfig:
    img_size: int = 32           # power-of-two multiple of 4
    out_channels: int = 3
    z_dim: int = 32
    style_dim: int = 48
    stage_channels: tuple = (24, 16, 12, 8)  # one entry per resolution 4,8,...,img_size
    layers_per_stage: int = 2
    seed: int = 0

    def __post_init__(self):
        stages = len(self.stage_channels)
        if self.img_size != 4 * 2 ** (stages - 1):
            raise InvalidInputError(
                f"img_size {self.img_size} needs {stages} stages starting at 4x4"
            )

    @property
    def num_style_layers(self):
        return len(self.stage_channels) * self.layers_per_stage


class StyleGenerator:
    """Mapping network f: Z -> W and synthesis network Gs: W^L -> image."""

    kind = "style_generator"

    def __init__(self, config: StyleGenConfig):
        self.config = config
        rng = np.random.default_rng(config.seed)
        dw = config.style_dim
        self.mapping = nn.Sequential([
            nn.Dense(config.z_dim, 64, rng),
            nn.LeakyReLU(),
            nn.Dense(64, 64, rng),
            nn.LeakyReLU(),
            nn.Dense(64, dw, rng, gain=1.0),
        ])
        c0 = config.stage_channels[0]
        self.const = rng.normal(0.0, 1.0, size=(c0, 4, 4))
        # layer plan: (upsample_before, in_ch, out_ch) per style layer
        self.layer_plan = []
        for s, cs in enumerate(config.stage_channels):
            for i in range(config.layers_per_stage):
                if s > 0 and i == 0:
                    self.layer_plan.append((True, config.stage_channels[s - 1], cs))
                else:
                    self.layer_plan.append((False, cs, cs))
        self.affines = []
        self.convs = []
        for up, cin, cout in self.layer_plan:
            self.affines.append(nn.Dense(dw, 2 * cin, rng, gain=0.5))
            self.convs.append(nn.Conv2d(cin, cout, 3, rng))
        self.act = nn.LeakyReLU()
        self.upsample = nn.Upsample2x()
        self.to_rgb = nn.Conv2d(config.stage_channels[-1], config.out_channels, 1, rng, gain=1.0)
        self.out_act = nn.Sigmoid()

    @property
    def num_style_layers(self):
        return self.config.num_style_layers

    @property
    def style_dim(self):
        return self.config.style_dim

    @property
    def output_shape(self):
        return (self.config.out_channels, self.config.img_size, self.config.img_size)

    # ---- shape plumbing --------------------------------------------------

    def _batch_z(self, z):
        z = np.asarray(z, dtype=np.float64)
        if z.shape == (self.config.z_dim,):
            return z[None], True
        if z.ndim == 2 and z.shape[1] == self.config.z_dim:
            return z, False
        raise InvalidInputError(f"latent shape {z.shape} does not match z_dim={self.config.z_dim}")

    def _batch_w(self, w):
        w = np.asarray(w, dtype=np.float64)
        expected = (self.num_style_layers, self.config.style_dim)
        if w.shape == expected:
            return w[None], True
        if w.ndim == 3 and w.shape[1:] == expected:
            return w, False
        raise InvalidInputError(f"style shape {w.shape} does not match {expected}")

    # ---- forward paths -----------------------------------------------------

    def map_style(self, z):
        """f(z), broadcast to one identical style row per synthesis layer."""
        zb, single = self._batch_z(z)
        w_row, _ = self.mapping.forward(zb)  # (N, D_w)
        w = np.repeat(w_row[:, None, :], self.num_style_layers, axis=1)
        return w[0] if single else w

    def synthesize(self, w):
        wb, single = self._batch_w(w)
        img, _ = self._synth_forward(wb)
        return img[0] if single else img

    def generate(self, z):
        """Full G = Gs(f(z)) path."""
        return self.synthesize(self.map_style(z))

    def _synth_forward(self, wb):
        # wb (N, L, D_w); returns image batch and caches for the backward pass
        N = wb.shape[0]
        h = np.broadcast_to(self.const, (N,) + self.const.shape).copy()
        caches = []
        for idx, (up, cin, cout) in enumerate(self.layer_plan):
            up_cache = None
            if up:
                h, up_cache = self.upsample.forward(h)
            aff_out, aff_cache = self.affines[idx].forward(wb[:, idx, :])
            scale = 1.0 + aff_out[:, :cin]
            bias = aff_out[:, cin:]
            h, adain_cache = _adain_forward(h, scale, bias)
            h, conv_cache = self.convs[idx].forward(h)
            h, act_cache = self.act.forward(h)
            caches.append((up_cache, aff_cache, adain_cache, conv_cache, act_cache))
        h, rgb_cache = self.to_rgb.forward(h)
        img, out_cache = self.out_act.forward(h)
        return img, (caches, rgb_cache, out_cache)

    def synthesize_vjp(self, w):
        """Image plus a pullback mapping d(image) -> d(style matrix)."""
        wb, single = self._batch_w(w)
        img, (caches, rgb_cache, out_cache) = self._synth_forward(wb)

        def vjp(dimg):
            dib = dimg[None] if single else dimg
            dh, _ = self.out_act.backward(out_cache, dib)
            dh, _ = self.to_rgb.backward(rgb_cache, dh, with_param_grads=False)
            dw = np.zeros_like(wb)
            for idx in range(len(self.layer_plan) - 1, -1, -1):
                up, cin, cout = self.layer_plan[idx]
                up_cache, aff_cache, adain_cache, conv_cache, act_cache = caches[idx]
                dh, _ = self.act.backward(act_cache, dh)
                dh, _ = self.convs[idx].backward(conv_cache, dh, with_param_grads=False)
                dh, dscale, dbias = _adain_backward(adain_cache, dh)
                daff = np.concatenate([dscale, dbias], axis=1)
                dw_row, _ = self.affines[idx].backward(aff_cache, daff, with_param_grads=False)
                dw[:, idx, :] = dw_row
                if up:
                    dh, _ = self.upsample.backward(up_cache, dh)
            return dw[0] if single else dw

        return (img[0] if single else img), vjp

    # ---- weights -------------------------------------------------------------

    def state_dict(self):
        out = {"const": self.const}
        for name, arr in self.mapping.params().items():
            out[f"mapping.{name}"] = arr
        for idx in range(len(self.layer_plan)):
            for name, arr in self.affines[idx].params().items():
                out[f"affine{idx}.{name}"] = arr
            for name, arr in self.convs[idx].params().items():
                out[f"conv{idx}.{name}"] = arr
        for name, arr in self.to_rgb.params().items():
            out[f"to_rgb.{name}"] = arr
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
