"""Attack configuration: thresholds, step size, norm, and scheduler knobs."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

from ..exceptions import ConfigError

MODES = ("image_space", "latent_space", "style_space")
NORMS = ("l1", "l2")
SCHEDULERS = ("constant", "adaptive")

# per-mode resolution of knobs left unset; the style attack needs the
# adaptive weight schedule, the VAE attacks run a constant lambda
_MODE_DEFAULTS = {
    "image_space": {"lambda0": 10.0, "epsilon": 1.0, "scheduler": "constant"},
    "latent_space": {"lambda0": 10.0, "epsilon": 0.5, "scheduler": "constant"},
    "style_space": {"lambda0": 1.0, "epsilon": 1.0, "scheduler": "adaptive"},
}

# step size per (mode, norm); the per-element-normalized distances shrink
# gradients by the element count, so usable steps differ per mode and norm
_ETA_DEFAULTS = {
    ("image_space", "l2"): 0.1,
    ("image_space", "l1"): 0.5,
    ("latent_space", "l2"): 0.05,
    ("latent_space", "l1"): 0.05,
    ("style_space", "l1"): 0.01,
    ("style_space", "l2"): 0.01,
}


@dataclass(frozen=True)
class AttackConfig:
    """All optimizer and threshold knobs of one attack run.

    Fields left as None are filled per mode by `resolved()`:
    lambda0, epsilon, eta, scheduler.

    epsilon is the hinge threshold on the latent/style distance. For
    latent_space it is a fraction of the per-element scale of z0 (the
    effective threshold is epsilon * ||z0|| / sqrt(D_z)); for style_space it
    is an absolute mean-l1 style distance. zeta/xi are the success
    thresholds on the reported input/output RMSD.
    """

    mode: str
    lambda0: float | None = None
    alpha: float = 0.05
    epsilon: float | None = None
    zeta: float = 0.2
    xi: float = 0.1
    eta: float | None = None
    max_iters: int = 1000
    norm: str = "l2"
    scheduler: str | None = None
    l_hat_w: float = 0.05
    seed: int = 0
    clamp_lambda: bool = True

    def resolved(self) -> "AttackConfig":
        """Fill per-mode defaults and validate; returns a complete config."""
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.norm not in NORMS:
            raise ConfigError(f"unknown norm {self.norm!r}; expected one of {NORMS}")
        md = _MODE_DEFAULTS[self.mode]
        cfg = replace(
            self,
            lambda0=md["lambda0"] if self.lambda0 is None else self.lambda0,
            epsilon=md["epsilon"] if self.epsilon is None else self.epsilon,
            scheduler=md["scheduler"] if self.scheduler is None else self.scheduler,
            eta=_ETA_DEFAULTS[(self.mode, self.norm)] if self.eta is None else self.eta,
        )
        cfg.validate()
        return cfg

    def validate(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.norm not in NORMS:
            raise ConfigError(f"unknown norm {self.norm!r}")
        if self.scheduler not in SCHEDULERS:
            raise ConfigError(f"unknown scheduler {self.scheduler!r}")
        for name in ("lambda0", "epsilon", "zeta", "xi", "eta"):
            value = getattr(self, name)
            if value is None or value <= 0:
                if name == "eta" and value == 0.0:
                    continue  # eta = 0 is a legal degenerate run (no motion)
                raise ConfigError(f"{name} must be > 0, got {value}")
        if self.alpha < 0:
            raise ConfigError(f"alpha must be >= 0, got {self.alpha}")
        if self.l_hat_w < 0:
            raise ConfigError(f"l_hat_w must be >= 0, got {self.l_hat_w}")
        if self.max_iters < 0:
            raise ConfigError(f"max_iters must be >= 0, got {self.max_iters}")
        if self.scheduler == "adaptive":
            if self.alpha <= 0:
                raise ConfigError("adaptive scheduler requires alpha > 0")
            if self.mode == "image_space":
                raise ConfigError(
                    "adaptive scheduler needs a hinge loss; image_space has none "
                    "(use latent_space/style_space or scheduler='constant')"
                )
        if self.mode == "style_space" and self.scheduler != "adaptive":
            raise ConfigError("style_space attacks require the adaptive scheduler")

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def from_dict(cls, data: dict) -> "AttackConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown attack config keys: {sorted(unknown)}")
        if "mode" not in data:
            raise ConfigError("attack config needs a 'mode'")
        return cls(**data)
