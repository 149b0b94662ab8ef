"""Iterative attack loops for the three modes.

Each loop performs plain gradient descent v <- v - eta * dL/dv from the
prescribed start (x0 = x_ori, z0 = e(x_ori), w0 = w_ori), evaluates the
success criterion every iteration, and stops at the first success or at
max_iters. Image-space iterates are projected back into [0,1] after every
step. Success always compares root-mean-square distances against the
zeta/xi thresholds; in style space the input-side condition is the hinge
deadzone (mean-l1 style distance >= epsilon), so epsilon plays the zeta
role there.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..exceptions import ConfigError, DegenerateReferenceError, InvalidInputError, NumericalError
from ..metrics import deviation, dimension_change_rates, rmsd
from .config import AttackConfig
from .losses import (
    image_space_parts,
    latent_space_parts,
    norm_distance,
    style_space_parts,
)
from .scheduler import SchedulerState, maybe_init_beta, update_lambda

# magnitude of the seeded symmetry-breaking step that opens a style attack,
# as a fraction of the hinge threshold (at w0 = w_ori both l1 terms sit at
# their kinks and the raw gradient is exactly zero)
STYLE_NUDGE_SCALE = 0.01

# trajectories keep every iteration up to this index, then every 10th
_TRAJ_DENSE_LIMIT = 200


def check_success(input_distance, output_distance, zeta, xi) -> bool:
    """Attack succeeded: input moved at least zeta, output stayed within xi."""
    if zeta <= 0 or xi <= 0:
        raise InvalidInputError("success thresholds must be > 0")
    if input_distance < 0 or output_distance < 0:
        raise InvalidInputError("distances must be >= 0")
    return bool(input_distance >= zeta and output_distance <= xi)


@dataclass
class TrajectoryPoint:
    iteration: int
    input_distance: float
    output_distance: float
    lam: float
    output_loss: float
    hinge_loss: float | None = None
    deviation: float | None = None


@dataclass
class AttackResult:
    mode: str
    adversarial_variable: np.ndarray
    adversarial_image: np.ndarray
    input_distance: float
    output_distance: float
    success: bool
    iterations_used: int
    lambda_final: float
    trajectory: list = field(default_factory=list)
    dev: float | None = None
    dimension_change_rates: np.ndarray | None = None


class _Trajectory:
    """Bounded-memory trajectory sampling."""

    def __init__(self):
        self.points = []

    def record(self, point: TrajectoryPoint, force=False):
        k = point.iteration
        if not (force or k <= _TRAJ_DENSE_LIMIT or k % 10 == 0):
            return
        if self.points and self.points[-1].iteration == k:
            self.points[-1] = point
        else:
            self.points.append(point)


def _require_finite(loss, grad, iteration):
    if not np.isfinite(loss) or not np.all(np.isfinite(grad)):
        raise NumericalError(f"non-finite attack loss at iteration {iteration}", iteration=iteration)


def _resolve(config: AttackConfig, mode):
    cfg = config.resolved()
    if cfg.mode != mode:
        raise ConfigError(f"config mode {cfg.mode!r} does not match {mode!r} attack")
    return cfg


def attack_image_space(x_ori, model, config: AttackConfig) -> AttackResult:
    """Push x away from x_ori in pixel space while d(e(x)) tracks x_ori."""
    cfg = _resolve(config, "image_space")
    x_ori = np.asarray(x_ori, dtype=np.float64)
    recon_ori = model.reconstruct(x_ori)  # validates the shape as a side effect

    x = x_ori.copy()
    state = SchedulerState(lam=cfg.lambda0)
    out_val, in_val, g_out, g_in, recon = image_space_parts(x, x_ori, model, cfg.norm)
    in_d, out_d = 0.0, 0.0
    traj = _Trajectory()
    traj.record(TrajectoryPoint(0, in_d, out_d, state.lam, out_val), force=True)
    success = check_success(in_d, out_d, cfg.zeta, cfg.xi)

    k = 0
    while not success and k < cfg.max_iters:
        k += 1
        grad = g_out - state.lam * g_in
        _require_finite(out_val, grad, k)
        x = np.clip(x - cfg.eta * grad, 0.0, 1.0)

        out_val, in_val, g_out, g_in, recon = image_space_parts(x, x_ori, model, cfg.norm)
        _require_finite(out_val - state.lam * in_val, g_out, k)
        in_d = rmsd(x, x_ori)
        out_d = rmsd(recon, recon_ori)
        state = update_lambda(state, out_val, 0.0, cfg)
        success = check_success(in_d, out_d, cfg.zeta, cfg.xi)
        traj.record(TrajectoryPoint(k, in_d, out_d, state.lam, out_val), force=success or k == cfg.max_iters)

    return AttackResult(
        mode=cfg.mode,
        adversarial_variable=x,
        adversarial_image=x,
        input_distance=in_d,
        output_distance=out_d,
        success=success,
        iterations_used=k,
        lambda_final=state.lam,
        trajectory=traj.points,
    )


def attack_latent_space(x_ori, model, config: AttackConfig) -> AttackResult:
    """Move z away from e(x_ori) under the hinge while d(z) reconstructs alike.

    The configured epsilon is a fraction of the per-element scale of z0; the
    absolute hinge threshold used here is epsilon * ||z0|| / sqrt(D_z).
    """
    cfg = _resolve(config, "latent_space")
    x_ori = np.asarray(x_ori, dtype=np.float64)
    recon_ori = model.reconstruct(x_ori)
    z0 = model.encode_mean(x_ori)
    eps_abs = cfg.epsilon * max(norm_distance(z0, np.zeros_like(z0), cfg.norm), 1e-12)

    z = z0.copy()
    state = SchedulerState(lam=cfg.lambda0)
    out_val, h, g_out, g_hinge, x_adv, recon_adv = latent_space_parts(
        z, z0, recon_ori, model, eps_abs, cfg.norm)
    in_d = rmsd(x_adv, x_ori)
    out_d = rmsd(recon_adv, recon_ori)
    traj = _Trajectory()
    traj.record(TrajectoryPoint(0, in_d, out_d, state.lam, out_val, h), force=True)
    success = check_success(in_d, out_d, cfg.zeta, cfg.xi)

    k = 0
    while not success and k < cfg.max_iters:
        k += 1
        grad = g_out + state.lam * g_hinge
        _require_finite(out_val + state.lam * h, grad, k)
        z = z - cfg.eta * grad

        out_val, h, g_out, g_hinge, x_adv, recon_adv = latent_space_parts(
            z, z0, recon_ori, model, eps_abs, cfg.norm)
        _require_finite(out_val + state.lam * h, g_out, k)
        in_d = rmsd(x_adv, x_ori)
        out_d = rmsd(recon_adv, recon_ori)
        if cfg.scheduler == "adaptive":
            state = maybe_init_beta(state, out_val, h)
        if cfg.scheduler == "constant" or state.beta is not None:
            state = update_lambda(state, out_val, h, cfg)
        success = check_success(in_d, out_d, cfg.zeta, cfg.xi)
        traj.record(TrajectoryPoint(k, in_d, out_d, state.lam, out_val, h), force=success or k == cfg.max_iters)

    return AttackResult(
        mode=cfg.mode,
        adversarial_variable=z,
        adversarial_image=x_adv,
        input_distance=in_d,
        output_distance=out_d,
        success=success,
        iterations_used=k,
        lambda_final=state.lam,
        trajectory=traj.points,
    )


def _safe_deviation(w, w_ori):
    try:
        return deviation(w, w_ori)
    except DegenerateReferenceError:
        return None


def attack_style_space(w_ori, gen, config: AttackConfig) -> AttackResult:
    """Drive the style matrix past the hinge threshold while Gs(w) stays put.

    lambda follows the adaptive schedule; beta initializes at the first
    iteration with nonzero output loss. The first update is a seeded
    +-(STYLE_NUDGE_SCALE * epsilon) perturbation because at w0 = w_ori every
    l1 term sits at its kink and the gradient vanishes identically.
    """
    cfg = _resolve(config, "style_space")
    w_ori = np.asarray(w_ori, dtype=np.float64)
    img_ori = gen.synthesize(w_ori)
    rng = np.random.default_rng(cfg.seed)

    w = w_ori.copy()
    state = SchedulerState(lam=cfg.lambda0)
    out_val, h, g_out, g_hinge, img = style_space_parts(w, w_ori, img_ori, gen, cfg.epsilon)
    in_d = norm_distance(w, w_ori, "l1")  # style-space distance plays the zeta role
    out_d = rmsd(img, img_ori)
    traj = _Trajectory()
    traj.record(TrajectoryPoint(0, in_d, out_d, state.lam, out_val, h, 0.0), force=True)
    success = check_success(in_d, out_d, cfg.epsilon, cfg.xi)

    k = 0
    while not success and k < cfg.max_iters:
        k += 1
        if k == 1:
            w = w + STYLE_NUDGE_SCALE * cfg.epsilon * rng.choice((-1.0, 1.0), size=w.shape)
        else:
            grad = g_out + state.lam * g_hinge
            _require_finite(out_val + state.lam * h, grad, k)
            w = w - cfg.eta * grad

        out_val, h, g_out, g_hinge, img = style_space_parts(w, w_ori, img_ori, gen, cfg.epsilon)
        _require_finite(out_val + state.lam * h, g_out, k)
        in_d = norm_distance(w, w_ori, "l1")
        out_d = rmsd(img, img_ori)
        state = maybe_init_beta(state, out_val, h)
        if state.beta is not None:
            state = update_lambda(state, out_val, h, cfg)
        success = check_success(in_d, out_d, cfg.epsilon, cfg.xi)
        traj.record(
            TrajectoryPoint(k, in_d, out_d, state.lam, out_val, h, _safe_deviation(w, w_ori)),
            force=success or k == cfg.max_iters,
        )

    rates = None
    try:
        rates = dimension_change_rates(w, w_ori)
    except DegenerateReferenceError:
        pass
    return AttackResult(
        mode=cfg.mode,
        adversarial_variable=w,
        adversarial_image=img,
        input_distance=in_d,
        output_distance=out_d,
        success=success,
        iterations_used=k,
        lambda_final=state.lam,
        trajectory=traj.points,
        dev=_safe_deviation(w, w_ori),
        dimension_change_rates=rates,
    )
