"""Figure grids: original / adversarial / their reconstructions, side by side,
annotated with the root-mean-square distances of each pair."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw, ImageFont

from ..exceptions import DataError, InvalidInputError
from ..metrics import rmsd

_MARGIN = 6
_HEADER = 16
_FOOTER = 14


def _panel(img, scale):
    arr = (np.clip(np.asarray(img, dtype=np.float64), 0.0, 1.0) * 255).round().astype(np.uint8)
    if arr.shape[0] == 1:
        pil = Image.fromarray(arr[0], mode="L").convert("RGB")
    else:
        pil = Image.fromarray(arr.transpose(1, 2, 0), mode="RGB")
    return pil.resize((pil.width * scale, pil.height * scale), resample=Image.NEAREST)


def _compose(panels, labels, pair_texts, path, scale):
    tiles = [_panel(p, scale) for p in panels]
    tw, th = tiles[0].size
    width = _MARGIN + len(tiles) * (tw + _MARGIN)
    height = _HEADER + th + _FOOTER
    canvas = Image.new("RGB", (width, height), "white")
    draw = ImageDraw.Draw(canvas)
    font = ImageFont.load_default()
    for i, tile in enumerate(tiles):
        x = _MARGIN + i * (tw + _MARGIN)
        canvas.paste(tile, (x, _HEADER))
        draw.text((x + tw // 2 - 3, _HEADER + th + 2), labels[i], fill="black", font=font)
    # one annotation centered over each pair of panels
    for pair_index, text in enumerate(pair_texts):
        x0 = _MARGIN + 2 * pair_index * (tw + _MARGIN)
        span = 2 * tw + _MARGIN
        tlen = draw.textlength(text, font=font)
        draw.text((x0 + (span - tlen) / 2, 2), text, fill="black", font=font)
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        canvas.save(path)
    except (OSError, ValueError) as exc:
        raise DataError(f"cannot write grid image {path}: {exc}") from exc
    return path


def render_quad_grid(x_ori, x_adv, recon_ori, recon_adv, path, scale=4):
    """Four-panel figure: a. original, b. adversarial example,
    c. reconstruction of the original, d. reconstruction of the adversarial
    example; RMSD annotations above the input pair and the output pair."""
    panels = [np.asarray(p, dtype=np.float64) for p in (x_ori, x_adv, recon_ori, recon_adv)]
    shapes = {p.shape for p in panels}
    if len(shapes) != 1:
        raise InvalidInputError(f"grid panels must share one shape, got {sorted(shapes)}")
    if panels[0].ndim != 3:
        raise InvalidInputError(f"grid panels must be single (C,H,W) images, got {panels[0].shape}")
    input_d = rmsd(panels[0], panels[1])
    output_d = rmsd(panels[2], panels[3])
    return _compose(
        panels,
        labels=("a", "b", "c", "d"),
        pair_texts=(f"input RMSD {input_d:.3f}", f"output RMSD {output_d:.3f}"),
        path=path,
        scale=scale,
    )


def render_pair_grid(img_ori, img_adv, path, annotation=None, scale=4):
    """Two-panel figure (original generation vs adversarial generation) with
    an optional annotation, e.g. the style deviation percentage."""
    panels = [np.asarray(p, dtype=np.float64) for p in (img_ori, img_adv)]
    if panels[0].shape != panels[1].shape:
        raise InvalidInputError(f"pair shapes differ: {panels[0].shape} vs {panels[1].shape}")
    if annotation is None:
        annotation = f"output RMSD {rmsd(panels[0], panels[1]):.3f}"
    return _compose(panels, labels=("a", "b"), pair_texts=(annotation,), path=path, scale=scale)
