"""Dataset profiles: shape, default optimization norm, and split sizes.

The default norm follows the per-dataset rule: l2 for MNIST-shaped grayscale
digits, l1 for SVHN/CelebA-shaped color images.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from ..exceptions import ConfigError


@dataclass(frozen=True)
class DatasetProfile:
    name: str
    image_shape: tuple  # (C, H, W)
    default_norm: str   # "l1" or "l2"
    source_path: str | None = None
    train_size: int | None = None  # None: everything left after the test split
    test_size: int | None = None   # None: 1/6 of the pool


_REGISTRY = {
    "mnist": DatasetProfile("mnist", (1, 28, 28), "l2"),
    "svhn": DatasetProfile("svhn", (3, 32, 32), "l1"),
    "celeba": DatasetProfile("celeba", (3, 32, 32), "l1"),
}


def known_profiles():
    return tuple(_REGISTRY)


def get_profile(name, source_path=None, train_size=None, test_size=None) -> DatasetProfile:
    """Look up a named profile, optionally binding a source path and split sizes."""
    if name not in _REGISTRY:
        raise ConfigError(f"unknown dataset profile {name!r}; known: {sorted(_REGISTRY)}")
    profile = _REGISTRY[name]
    return replace(
        profile,
        source_path=source_path if source_path is not None else profile.source_path,
        train_size=train_size if train_size is not None else profile.train_size,
        test_size=test_size if test_size is not None else profile.test_size,
    )
