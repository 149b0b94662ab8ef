"""Dataset ingestion.

A source directory is read in one of three layouts, probed in order:
packed MNIST-style idx archives (train-images-idx3-ubyte[.gz] /
t10k-images-idx3-ubyte[.gz]), an index.txt of relative image paths, or a
plain directory of PNG/JPEG files. Images come out as float64 (N,C,H,W)
arrays in [0,1]; ordering is a seeded shuffle, so the same seed always yields
the same sequence.
"""

from __future__ import annotations

import gzip
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from ..exceptions import DataError
from .profiles import DatasetProfile

_IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")


@dataclass
class Dataset:
    profile: DatasetProfile
    train: np.ndarray
    test: np.ndarray


def _read_idx(path):
    opener = gzip.open if str(path).endswith(".gz") else open
    try:
        with opener(path, "rb") as fh:
            raw = fh.read()
        magic, n, h, w = struct.unpack(">IIII", raw[:16])
        if magic != 2051:
            raise DataError(f"{path}: bad idx magic {magic}")
        data = np.frombuffer(raw[16:], dtype=np.uint8)
        if data.size != n * h * w:
            raise DataError(f"{path}: truncated idx payload")
        return data.reshape(n, h, w)
    except (OSError, struct.error) as exc:
        raise DataError(f"{path}: unreadable idx archive: {exc}") from exc


def _load_image_file(path, image_shape):
    c, h, w = image_shape
    try:
        with Image.open(path) as img:
            img = img.convert("L" if c == 1 else "RGB")
            arr = np.asarray(img, dtype=np.float64) / 255.0
    except (OSError, UnidentifiedImageError, ValueError) as exc:
        raise DataError(f"{path}: unreadable image: {exc}") from exc
    if arr.shape[:2] != (h, w):
        raise DataError(f"{path}: image is {arr.shape[1]}x{arr.shape[0]}, profile wants {w}x{h}")
    if c == 1:
        return arr[None]
    return arr.transpose(2, 0, 1)


def _find_idx(root, stem):
    for cand in (root / f"{stem}.gz", root / stem):
        if cand.is_file():
            return cand
    return None


def _split_sizes(profile, pool_size):
    test = profile.test_size if profile.test_size is not None else max(1, pool_size // 6)
    train = profile.train_size if profile.train_size is not None else pool_size - test
    if train + test > pool_size:
        raise DataError(
            f"{profile.name}: split sizes {train}+{test} exceed the {pool_size} available images"
        )
    if train < 1 or test < 1:
        raise DataError(f"{profile.name}: empty split (train={train}, test={test})")
    return train, test


def load_dataset(profile: DatasetProfile, seed=0) -> Dataset:
    """Load and split the dataset bound to `profile.source_path`."""
    if not profile.source_path:
        raise DataError(f"profile {profile.name!r} has no source path")
    root = Path(profile.source_path)
    if not root.is_dir():
        raise DataError(f"dataset path does not exist: {root}")
    rng = np.random.default_rng(seed)
    c, h, w = profile.image_shape

    train_idx = _find_idx(root, "train-images-idx3-ubyte")
    test_idx = _find_idx(root, "t10k-images-idx3-ubyte")
    if train_idx is not None:
        if c != 1:
            raise DataError(f"{root}: idx archives are single-channel; profile wants {c} channels")
        pools = [_read_idx(train_idx)]
        if test_idx is not None:
            pools.append(_read_idx(test_idx))
        for pool in pools:
            if pool.shape[1:] != (h, w):
                raise DataError(f"{root}: idx images are {pool.shape[1:]}, profile wants {(h, w)}")
        arrays = [p.astype(np.float64)[:, None] / 255.0 for p in pools]
        if len(arrays) == 2:
            train_pool, test_pool = arrays
            train_pool = train_pool[rng.permutation(len(train_pool))]
            test_pool = test_pool[rng.permutation(len(test_pool))]
            n_train = profile.train_size or len(train_pool)
            n_test = profile.test_size or len(test_pool)
            if n_train > len(train_pool) or n_test > len(test_pool):
                raise DataError(f"{root}: split sizes exceed archive contents")
            return Dataset(profile, train_pool[:n_train], test_pool[:n_test])
        pool = arrays[0][rng.permutation(len(arrays[0]))]
        n_train, n_test = _split_sizes(profile, len(pool))
        return Dataset(profile, pool[:n_train], pool[n_train:n_train + n_test])

    index = root / "index.txt"
    if index.is_file():
        names = [line.strip() for line in index.read_text().splitlines() if line.strip()]
        paths = [root / name for name in names]
    else:
        paths = sorted(p for p in root.iterdir() if p.suffix.lower() in _IMAGE_SUFFIXES)
    if not paths:
        raise DataError(f"no images found under {root}")
    images = np.stack([_load_image_file(p, profile.image_shape) for p in paths])
    pool = images[rng.permutation(len(images))]
    n_train, n_test = _split_sizes(profile, len(pool))
    return Dataset(profile, pool[:n_train], pool[n_train:n_train + n_test])
