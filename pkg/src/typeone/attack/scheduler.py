"""Self-adaptive weight schedule for the hinge coefficient lambda.

Each adaptive update moves lambda by alpha * (beta * output_loss - hinge_loss)
and additionally decays it by min(hinge_loss - l_hat_w, 0). beta is fixed for
the whole run once set; it is initialized to hinge/output at the first
iteration where the output loss is meaningfully nonzero (at the very first
step the adversarial variable still equals its origin and the output loss is
exactly zero, so initialization is deferred).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from ..exceptions import ConfigError

BETA_INIT_FLOOR = 1e-8


@dataclass(frozen=True)
class SchedulerState:
    lam: float
    beta: float | None = None  # unset until the deferred initialization fires
    iteration: int = 0


def init_beta(hinge_loss, output_loss, floor=BETA_INIT_FLOOR) -> float:
    """Balance coefficient hinge/output, denominator floored at `floor`."""
    return hinge_loss / max(output_loss, floor)


def maybe_init_beta(state: SchedulerState, output_loss, hinge_loss) -> SchedulerState:
    """Set beta once the output loss becomes nonzero; no-op afterwards."""
    if state.beta is None and output_loss > BETA_INIT_FLOOR:
        return replace(state, beta=init_beta(hinge_loss, output_loss))
    return state


def update_lambda(state: SchedulerState, output_loss, hinge_loss, config) -> SchedulerState:
    """One scheduler tick. Constant scheduler: lambda passes through unchanged."""
    if config.scheduler == "constant":
        return replace(state, iteration=state.iteration + 1)
    if state.beta is None:
        raise ConfigError("adaptive lambda update requires an initialized beta")
    lam = (
        state.lam
        + config.alpha * (state.beta * output_loss - hinge_loss)
        + min(hinge_loss - config.l_hat_w, 0.0)
    )
    if config.clamp_lambda:
        lam = max(lam, 0.0)
    return SchedulerState(lam=lam, beta=state.beta, iteration=state.iteration + 1)
