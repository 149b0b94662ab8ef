"""The three attack objectives.

All distances inside the losses are per-element normalized: l1 is the mean
absolute difference, l2 the root-mean-square difference. The image-space
objective rewards moving the input away from the original (its second term
enters with a negative sign under minimization); the latent- and style-space
objectives do the same through a hinge that is active only while the
adversarial variable sits closer than epsilon to its origin.
"""

from __future__ import annotations

import numpy as np

from ..exceptions import InvalidInputError

_L2_FLOOR = 1e-12  # below this the l2 distance gradient is taken as 0


def norm_distance(a, b, norm="l2") -> float:
    """Per-element-normalized distance: mean |a-b| (l1) or RMS a-b (l2)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise InvalidInputError(f"shape mismatch: {a.shape} vs {b.shape}")
    diff = a - b
    if norm == "l1":
        return float(np.mean(np.abs(diff)))
    if norm == "l2":
        return float(np.sqrt(np.mean(diff**2)))
    raise InvalidInputError(f"unknown norm {norm!r}")


def norm_distance_with_grad(a, b, norm="l2"):
    """Distance plus its gradient with respect to `a` (subgradient 0 at ties)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise InvalidInputError(f"shape mismatch: {a.shape} vs {b.shape}")
    diff = a - b
    n = diff.size
    if norm == "l1":
        return float(np.mean(np.abs(diff))), np.sign(diff) / n
    if norm == "l2":
        value = float(np.sqrt(np.mean(diff**2)))
        if value < _L2_FLOOR:
            return value, np.zeros_like(diff)
        return value, diff / (n * value)
    raise InvalidInputError(f"unknown norm {norm!r}")


def hinge(threshold, distance) -> float:
    """relu(threshold - distance): active only inside the threshold ball."""
    return max(threshold - distance, 0.0)


# ---- image space -----------------------------------------------------------


def image_space_parts(x, x_ori, model, norm="l2"):
    """Lambda-independent pieces of the image-space objective at x.

    Returns (output_loss, input_distance, g_out, g_in, recon) where the full
    gradient is g_out - lam * g_in.
    """
    recon, vjp = model.reconstruct_vjp(x)
    out_val, dout = norm_distance_with_grad(recon, x_ori, norm)
    in_val, din = norm_distance_with_grad(x, x_ori, norm)
    return out_val, in_val, vjp(dout), din, recon


def loss_image_space(x, x_ori, model, lam, norm="l2") -> float:
    """dist(d(e(x)), x_ori) - lam * dist(x, x_ori).

    The first term holds the reconstruction near the original; the second
    pays the optimizer for destroying the input.
    """
    recon = model.reconstruct(x)
    return norm_distance(recon, x_ori, norm) - lam * norm_distance(x, x_ori, norm)


# ---- latent space ------------------------------------------------------------


def latent_space_parts(z, z0, recon_ori, model, epsilon, norm="l2"):
    """Lambda-independent pieces of the latent-space objective at z.

    Returns (output_loss, hinge_value, g_out, g_hinge, x_adv, recon_adv);
    full gradient is g_out + lam * g_hinge. `z0` is the encoded original,
    `recon_ori` its reconstruction.
    """
    x_adv, dec_vjp = model.decode_vjp(z)
    recon_adv, rec_vjp = model.reconstruct_vjp(x_adv)
    out_val, dout = norm_distance_with_grad(recon_adv, recon_ori, norm)
    zdist, dz = norm_distance_with_grad(z, z0, norm)
    h = hinge(epsilon, zdist)
    g_hinge = -dz if zdist < epsilon else np.zeros_like(dz)
    return out_val, h, dec_vjp(rec_vjp(dout)), g_hinge, x_adv, recon_adv


def loss_latent_space(z, x_ori, model, lam, epsilon, norm="l2") -> float:
    """dist(d(e(d(z))), d(e(x_ori))) + lam * relu(epsilon - dist(z, e(x_ori))).

    d(z) is the adversarial image; the hinge keeps z from simply staying at
    the encoding of the original.
    """
    z0 = model.encode_mean(x_ori)
    recon_ori = model.decode(z0)
    recon_adv = model.reconstruct(model.decode(z))
    out_val = norm_distance(recon_adv, recon_ori, norm)
    return out_val + lam * hinge(epsilon, norm_distance(z, z0, norm))


# ---- style space ----------------------------------------------------------------


def style_space_parts(w, w_ori, img_ori, gen, epsilon):
    """Lambda-independent pieces of the style-space objective at w (l1 only).

    Returns (output_loss, hinge_value, g_out, g_hinge, img); full gradient
    is g_out + lam * g_hinge. `img_ori` is the generation of w_ori.
    """
    img, vjp = gen.synthesize_vjp(w)
    out_val, dout = norm_distance_with_grad(img, img_ori, "l1")
    wdist, dw = norm_distance_with_grad(w, w_ori, "l1")
    h = hinge(epsilon, wdist)
    g_hinge = -dw if wdist < epsilon else np.zeros_like(dw)
    return out_val, h, vjp(dout), g_hinge, img


def loss_style_space(w, w_ori, gen, lam, epsilon) -> float:
    """(1/n1) sum|Gs(w) - Gs(w_ori)| + lam * relu(epsilon - (1/n2) sum|w - w_ori|).

    l1 throughout: per-pixel restraint on the generated image, per-entry
    measure of how far the style matrix has moved.
    """
    w = np.asarray(w, dtype=np.float64)
    w_ori = np.asarray(w_ori, dtype=np.float64)
    if w.shape != w_ori.shape:
        raise InvalidInputError(f"shape mismatch: {w.shape} vs {w_ori.shape}")
    img = gen.synthesize(w)
    img_ori = gen.synthesize(w_ori)
    out_val = norm_distance(img, img_ori, "l1")
    return out_val + lam * hinge(epsilon, norm_distance(w, w_ori, "l1"))
