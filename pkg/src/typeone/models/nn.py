"""Minimal layer stack (dense / conv / upsample / activations) in float64 numpy.

Every layer exposes `forward(x) -> (y, cache)` and
`backward(cache, dy, with_param_grads) -> (dx, grads)`. Layers hold their
weights but never mutate state during forward, so a built model can be shared
across threads; caches are per-call. Backward passes are exact, which the
finite-difference tests rely on.
"""

from __future__ import annotations

import numpy as np


def he_normal(rng, shape, fan_in, gain=np.sqrt(2.0)):
    return rng.normal(0.0, gain / np.sqrt(fan_in), size=shape)


def sigmoid(x):
    # stable in both tails
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


class Layer:
    def params(self):
        """name -> live weight array (updated in place by optimizers)."""
        return {}

    def forward(self, x):
        raise NotImplementedError

    def backward(self, cache, dy, with_param_grads=True):
        raise NotImplementedError


class Dense(Layer):
    def __init__(self, in_dim, out_dim, rng, gain=np.sqrt(2.0)):
        self.W = he_normal(rng, (in_dim, out_dim), in_dim, gain)
        self.b = np.zeros(out_dim)

    def params(self):
        return {"W": self.W, "b": self.b}

    def forward(self, x):
        return x @ self.W + self.b, x

    def backward(self, cache, dy, with_param_grads=True):
        x = cache
        dx = dy @ self.W.T
        grads = {}
        if with_param_grads:
            grads = {"W": x.T @ dy, "b": dy.sum(axis=0)}
        return dx, grads


def im2col(x, k, stride, pad):
    # x (N,C,H,W) -> cols (N, C*k*k, OH*OW)
    N, C, H, W = x.shape
    OH = (H + 2 * pad - k) // stride + 1
    OW = (W + 2 * pad - k) // stride + 1
    xp = np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad)))
    cols = np.empty((N, C, k, k, OH, OW))
    for i in range(k):
        i_end = i + stride * OH
        for j in range(k):
            j_end = j + stride * OW
            cols[:, :, i, j] = xp[:, :, i:i_end:stride, j:j_end:stride]
    return cols.reshape(N, C * k * k, OH * OW), (OH, OW)


def col2im(cols, x_shape, k, stride, pad, out_hw):
    # adjoint of im2col: scatter-add column entries back onto the padded image
    N, C, H, W = x_shape
    OH, OW = out_hw
    cols = cols.reshape(N, C, k, k, OH, OW)
    xp = np.zeros((N, C, H + 2 * pad, W + 2 * pad))
    for i in range(k):
        i_end = i + stride * OH
        for j in range(k):
            j_end = j + stride * OW
            xp[:, :, i:i_end:stride, j:j_end:stride] += cols[:, :, i, j]
    if pad:
        return xp[:, :, pad:-pad, pad:-pad]
    return xp


class Conv2d(Layer):
    def __init__(self, in_ch, out_ch, kernel, rng, stride=1, pad=None, gain=np.sqrt(2.0)):
        if pad is None:
            pad = kernel // 2
        self.stride = stride
        self.pad = pad
        self.kernel = kernel
        fan_in = in_ch * kernel * kernel
        self.W = he_normal(rng, (out_ch, in_ch, kernel, kernel), fan_in, gain)
        self.b = np.zeros(out_ch)

    def params(self):
        return {"W": self.W, "b": self.b}

    def forward(self, x):
        N = x.shape[0]
        cols, out_hw = im2col(x, self.kernel, self.stride, self.pad)
        Wm = self.W.reshape(self.W.shape[0], -1)  # (OC, C*k*k)
        y = np.matmul(Wm, cols)                   # (N, OC, OH*OW), batched GEMM
        y += self.b[None, :, None]
        y = y.reshape(N, self.W.shape[0], *out_hw)
        return y, (x.shape, cols, out_hw)

    def backward(self, cache, dy, with_param_grads=True):
        x_shape, cols, out_hw = cache
        N, OC = dy.shape[0], dy.shape[1]
        dym = dy.reshape(N, OC, -1)
        Wm = self.W.reshape(OC, -1)
        grads = {}
        if with_param_grads:
            F = Wm.shape[1]
            dy2 = dym.transpose(1, 0, 2).reshape(OC, -1)      # (OC, N*L)
            cols2 = cols.transpose(1, 0, 2).reshape(F, -1)    # (F, N*L)
            grads = {"W": (dy2 @ cols2.T).reshape(self.W.shape), "b": dym.sum(axis=(0, 2))}
        dcols = np.matmul(Wm.T, dym)                          # (N, F, OH*OW)
        dx = col2im(dcols, x_shape, self.kernel, self.stride, self.pad, out_hw)
        return dx, grads


class ReLU(Layer):
    def forward(self, x):
        mask = x > 0
        return x * mask, mask

    def backward(self, cache, dy, with_param_grads=True):
        return dy * cache, {}


class LeakyReLU(Layer):
    def __init__(self, slope=0.2):
        self.slope = slope

    def forward(self, x):
        mask = x > 0
        return np.where(mask, x, self.slope * x), mask

    def backward(self, cache, dy, with_param_grads=True):
        return np.where(cache, dy, self.slope * dy), {}


class Sigmoid(Layer):
    def forward(self, x):
        y = sigmoid(x)
        return y, y

    def backward(self, cache, dy, with_param_grads=True):
        y = cache
        return dy * y * (1.0 - y), {}


class Upsample2x(Layer):
    """Nearest-neighbour spatial doubling."""

    def forward(self, x):
        return x.repeat(2, axis=2).repeat(2, axis=3), x.shape

    def backward(self, cache, dy, with_param_grads=True):
        N, C, H, W = cache
        dx = dy.reshape(N, C, H, 2, W, 2).sum(axis=(3, 5))
        return dx, {}


class Flatten(Layer):
    def forward(self, x):
        return x.reshape(x.shape[0], -1), x.shape

    def backward(self, cache, dy, with_param_grads=True):
        return dy.reshape(cache), {}


class Reshape(Layer):
    def __init__(self, shape):
        self.shape = shape  # per-sample shape, batch dim excluded

    def forward(self, x):
        return x.reshape(x.shape[0], *self.shape), x.shape

    def backward(self, cache, dy, with_param_grads=True):
        return dy.reshape(cache), {}


class Sequential(Layer):
    def __init__(self, layers):
        self.layers = list(layers)

    def params(self):
        out = {}
        for i, layer in enumerate(self.layers):
            for name, arr in layer.params().items():
                out[f"{i}.{name}"] = arr
        return out

    def forward(self, x):
        caches = []
        for layer in self.layers:
            x, cache = layer.forward(x)
            caches.append(cache)
        return x, caches

    def backward(self, caches, dy, with_param_grads=True):
        grads = {}
        for i in range(len(self.layers) - 1, -1, -1):
            dy, g = self.layers[i].backward(caches[i], dy, with_param_grads)
            for name, arr in g.items():
                grads[f"{i}.{name}"] = arr
        return dy, grads


class Adam:
    """Standard Adam over a {name: array} parameter dict; updates in place."""

    def __init__(self, params, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self.params = params
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}

    def step(self, grads):
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        corr1 = 1.0 - b1**self.t
        corr2 = 1.0 - b2**self.t
        for k, p in self.params.items():
            g = grads[k]
            self.m[k] = b1 * self.m[k] + (1 - b1) * g
            self.v[k] = b2 * self.v[k] + (1 - b2) * g * g
            p -= self.lr * (self.m[k] / corr1) / (np.sqrt(self.v[k] / corr2) + self.eps)
