"""Deterministic synthetic digit corpora at MNIST/SVHN scale.

No dataset download happens anywhere in this package, so tests and demos
build their corpora locally: font-rendered digits with seeded jitter, either
grayscale on black (MNIST-shaped) or colored glyphs on colored backgrounds
(SVHN-shaped). Writers emit the two on-disk layouts the loader understands:
a directory of PNGs with an index file, and packed MNIST-style idx archives.
"""

from __future__ import annotations

import gzip
import struct
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw, ImageFilter, ImageFont

from ..exceptions import DataError


def _render_glyph(digit, height, width, rng):
    # oversample 4x, draw, jitter, rotate, then downscale for soft edges
    big_h, big_w = 4 * height, 4 * width
    canvas = Image.new("L", (big_w, big_h), 0)
    draw = ImageDraw.Draw(canvas)
    font = ImageFont.load_default(size=int(big_h * 0.62))
    text = str(digit)
    left, top, right, bottom = draw.textbbox((0, 0), text, font=font)
    x = (big_w - (right - left)) / 2 - left + rng.uniform(-0.1, 0.1) * big_w
    y = (big_h - (bottom - top)) / 2 - top + rng.uniform(-0.1, 0.1) * big_h
    draw.text((x, y), text, fill=255, font=font)
    canvas = canvas.rotate(rng.uniform(-12.0, 12.0), resample=Image.BILINEAR)
    canvas = canvas.resize((width, height), resample=Image.BILINEAR)
    return np.asarray(canvas, dtype=np.float64) / 255.0  # (H, W) in [0,1]


def make_digit_corpus(n, image_shape=(1, 28, 28), seed=0):
    """n jittered digit images of the given (C,H,W) shape, values in [0,1].

    C=1 gives white-on-black glyphs; C=3 colors both glyph and background.
    """
    c, h, w = image_shape
    rng = np.random.default_rng(seed)
    out = np.empty((n, c, h, w))
    for i in range(n):
        glyph = _render_glyph(rng.integers(0, 10), h, w, rng)
        if c == 1:
            out[i, 0] = glyph
        else:
            bg = rng.uniform(0.05, 0.95, size=3)
            fg = np.clip(bg + rng.choice((-1.0, 1.0)) * rng.uniform(0.35, 0.6, size=3), 0.0, 1.0)
            img = bg[:, None, None] * (1.0 - glyph) + fg[:, None, None] * glyph
            pil = Image.fromarray((img.transpose(1, 2, 0) * 255).round().astype(np.uint8))
            pil = pil.filter(ImageFilter.GaussianBlur(0.6))
            out[i] = np.asarray(pil, dtype=np.float64).transpose(2, 0, 1) / 255.0
    return out


def _to_uint8(images):
    return (np.clip(images, 0.0, 1.0) * 255).round().astype(np.uint8)


def write_image_dataset(images, root):
    """Write (N,C,H,W) images as PNGs plus an index file of relative paths."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    names = []
    for i, img in enumerate(_to_uint8(images)):
        name = f"img_{i:05d}.png"
        if img.shape[0] == 1:
            Image.fromarray(img[0], mode="L").save(root / name)
        else:
            Image.fromarray(img.transpose(1, 2, 0), mode="RGB").save(root / name)
        names.append(name)
    (root / "index.txt").write_text("\n".join(names) + "\n")
    return root


def _write_idx(images_u8, path, gz=True):
    n, h, w = images_u8.shape
    header = struct.pack(">IIII", 2051, n, h, w)
    payload = header + images_u8.tobytes()
    opener = gzip.open if gz else open
    with opener(path, "wb") as fh:
        fh.write(payload)


def write_idx_dataset(train_images, test_images, root):
    """Write grayscale (N,1,H,W) splits as packed MNIST-format idx archives."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    for images, stem in ((train_images, "train-images-idx3-ubyte"), (test_images, "t10k-images-idx3-ubyte")):
        arr = _to_uint8(images)
        if arr.shape[1] != 1:
            raise DataError("idx archives hold single-channel images only")
        _write_idx(arr[:, 0], root / f"{stem}.gz")
    return root
