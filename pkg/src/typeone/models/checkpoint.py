"""Single-file versioned checkpoints: a JSON metadata header (format tag,
version, model kind, architecture hyperparameters) plus named weight arrays,
packed with numpy's zip container. Weights stay float64 so a load/save round
trip is bit-exact."""

from __future__ import annotations

import json
import zipfile
from dataclasses import asdict

import numpy as np

from ..exceptions import CheckpointError
from .stylegen import StyleGenConfig, StyleGenerator
from .vae import VAE, VAEConfig

CHECKPOINT_FORMAT = "typeone-checkpoint"
CHECKPOINT_VERSION = 1

_KINDS = {"vae", "style_generator"}


def save_checkpoint(model, path):
    """Write model weights and architecture metadata to a single .npz file."""
    if model.kind not in _KINDS:
        raise CheckpointError(f"unknown model kind {model.kind!r}")
    meta = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "kind": model.kind,
        "config": asdict(model.config),
    }
    try:
        with open(path, "wb") as fh:
            np.savez(fh, __meta__=np.array(json.dumps(meta)), **model.state_dict())
    except OSError as exc:
        raise CheckpointError(f"cannot write checkpoint {path}: {exc}") from exc


def _read_meta(data, path):
    if "__meta__" not in data.files:
        raise CheckpointError(f"{path}: not a typeone checkpoint (missing metadata)")
    try:
        meta = json.loads(str(data["__meta__"]))
    except (ValueError, TypeError) as exc:
        raise CheckpointError(f"{path}: unreadable metadata") from exc
    if meta.get("format") != CHECKPOINT_FORMAT:
        raise CheckpointError(f"{path}: unknown checkpoint format {meta.get('format')!r}")
    if meta.get("version") != CHECKPOINT_VERSION:
        raise CheckpointError(
            f"{path}: checkpoint version {meta.get('version')!r} "
            f"does not match supported version {CHECKPOINT_VERSION}"
        )
    if meta.get("kind") not in _KINDS:
        raise CheckpointError(f"{path}: unknown model kind {meta.get('kind')!r}")
    return meta


def _open(path):
    try:
        return np.load(path, allow_pickle=False)
    except FileNotFoundError as exc:
        raise CheckpointError(f"checkpoint not found: {path}") from exc
    except (OSError, ValueError, zipfile.BadZipFile) as exc:
        raise CheckpointError(f"corrupt checkpoint {path}: {exc}") from exc


def peek_checkpoint(path):
    """Return (kind, config dict) without instantiating the model."""
    with _open(path) as data:
        meta = _read_meta(data, path)
    return meta["kind"], meta["config"]


def load_checkpoint(path):
    """Rebuild the model named in the header and load its weights."""
    with _open(path) as data:
        meta = _read_meta(data, path)
        cfg = meta["config"]
        try:
            if meta["kind"] == "vae":
                model = VAE(VAEConfig(
                    input_shape=tuple(cfg["input_shape"]),
                    latent_dim=cfg["latent_dim"],
                    channels=cfg["channels"],
                    seed=cfg["seed"],
                ))
            else:
                model = StyleGenerator(StyleGenConfig(
                    img_size=cfg["img_size"],
                    out_channels=cfg["out_channels"],
                    z_dim=cfg["z_dim"],
                    style_dim=cfg["style_dim"],
                    stage_channels=tuple(cfg["stage_channels"]),
                    layers_per_stage=cfg["layers_per_stage"],
                    seed=cfg["seed"],
                ))
            weights = {k: data[k] for k in data.files if k != "__meta__"}
        except (KeyError, zipfile.BadZipFile, ValueError) as exc:
            raise CheckpointError(f"corrupt checkpoint {path}: {exc}") from exc
    model.load_state_dict(weights)
    return model
