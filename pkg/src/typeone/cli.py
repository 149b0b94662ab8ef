"""Command-line harness: `typeone train | attack | report`.

Experiments are driven by an optional flat key=value config file plus CLI
flags (flags win). All validation happens before any compute starts; attack
non-success is recorded as data, never as a process failure. Config mistakes
exit with status 2, runtime failures with 1.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .attack import (
    AttackConfig,
    run_style_campaign,
    run_vae_campaign,
    sample_style_origins,
)
from .data import (
    get_profile,
    known_profiles,
    load_dataset,
    render_pair_grid,
    render_quad_grid,
    write_report,
)
from .exceptions import ConfigError, DataError, TypeOneError
from .metrics import aggregate
from .models import TrainConfig, load_checkpoint, peek_checkpoint, train_vae

OUTPUT_ROOT_ENV = "TYPEONE_OUTPUT_ROOT"
DEFAULT_GRID_COUNT = 8

_VAE_MODES = ("image_space", "latent_space")


# ---- config file ------------------------------------------------------------


def parse_config_file(path) -> dict:
    """Flat `key.path = value` lines; values are JSON scalars or bare strings."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    out = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        try:
            out[key] = json.loads(value)
        except ValueError:
            out[key] = value
    return out


class _Settings:
    """Layered lookup: CLI flag (if provided) over config file over default."""

    def __init__(self, args, file_cfg):
        self.args = args
        self.file_cfg = file_cfg

    def get(self, flag, key, default=None):
        value = getattr(self.args, flag, None)
        if value is not None:
            return value
        if key in self.file_cfg:
            return self.file_cfg[key]
        return default


def _resolve_out(settings, descriptor):
    out = settings.get("out", "output_dir")
    if out is not None:
        return Path(out)
    root = os.environ.get(OUTPUT_ROOT_ENV)
    if root:
        return Path(root) / descriptor
    return Path("typeone_runs") / descriptor


def _resolve_profile(settings, require=True):
    name = settings.get("dataset", "dataset.name")
    if name is None:
        if require:
            raise ConfigError(f"no dataset given (--dataset, one of {sorted(known_profiles())})")
        return None
    profile = get_profile(
        name,
        source_path=settings.get("data_root", "dataset.source_path"),
        train_size=settings.get("train_size", "dataset.train_size"),
        test_size=settings.get("test_size", "dataset.test_size"),
    )
    if not profile.source_path:
        raise ConfigError(f"dataset {name!r} has no data root (--data-root)")
    if not Path(profile.source_path).is_dir():
        raise ConfigError(f"dataset path does not exist: {profile.source_path}")
    return profile


# ---- train ---------------------------------------------------------------------


def cmd_train(args):
    file_cfg = parse_config_file(args.config) if args.config else {}
    settings = _Settings(args, file_cfg)
    profile = _resolve_profile(settings)
    seed = int(settings.get("seed", "seed", 0))
    train_cfg = TrainConfig(
        latent_dim=int(settings.get("latent_dim", "train.latent_dim", 64 if profile.image_shape[0] == 3 else 16)),
        channels=int(settings.get("channels", "train.channels", 16 if profile.image_shape[0] == 3 else 12)),
        epochs=int(settings.get("epochs", "train.epochs", 20)),
        batch_size=int(settings.get("batch_size", "train.batch_size", 64)),
        lr=float(settings.get("lr", "train.lr", 3e-3)),
        kl_weight=float(settings.get("kl_weight", "train.kl_weight", 0.5)),
        seed=seed,
    )
    out_dir = _resolve_out(settings, f"train_{profile.name}_seed{seed}")
    out_dir.mkdir(parents=True, exist_ok=True)

    dataset = load_dataset(profile, seed=seed)
    result = train_vae(dataset, train_cfg)
    ckpt_path = out_dir / f"vae_{profile.name}.npz"
    from .models import save_checkpoint

    save_checkpoint(result.model, ckpt_path)
    log = {
        "dataset": profile.name,
        "train_config": train_cfg.__dict__,
        "train_images": int(len(dataset.train)),
        "test_images": int(len(dataset.test)),
        "epoch_losses": [float(l) for l in result.epoch_losses],
        "final_test_rmsd": result.final_test_rmsd,
        "checkpoint": str(ckpt_path),
    }
    (out_dir / "train_log.json").write_text(json.dumps(log, indent=2) + "\n")
    print(f"checkpoint: {ckpt_path}")
    print(f"final test reconstruction RMSD: {result.final_test_rmsd:.6g}")
    return 0


# ---- attack ---------------------------------------------------------------------


def _attack_config(settings, mode, default_norm):
    return AttackConfig(
        mode=mode,
        lambda0=settings.get("lambda0", "attack.lambda0"),
        alpha=float(settings.get("alpha", "attack.alpha", 0.05)),
        epsilon=settings.get("epsilon", "attack.epsilon"),
        zeta=float(settings.get("zeta", "attack.zeta", 0.2)),
        xi=float(settings.get("xi", "attack.xi", 0.1)),
        eta=settings.get("eta", "attack.eta"),
        max_iters=int(settings.get("max_iters", "attack.max_iters", 1000)),
        norm=settings.get("norm", "attack.norm", default_norm),
        scheduler=settings.get("scheduler", "attack.scheduler"),
        l_hat_w=float(settings.get("l_hat_w", "attack.l_hat_w", 0.05)),
        seed=int(settings.get("seed", "seed", 0)),
        clamp_lambda=bool(settings.get("clamp_lambda", "attack.clamp_lambda", True)),
    ).resolved()


def _trajectory_columns(points):
    return {
        "iteration": [p.iteration for p in points],
        "input_distance": [p.input_distance for p in points],
        "output_distance": [p.output_distance for p in points],
        "lambda": [p.lam for p in points],
        "output_loss": [p.output_loss for p in points],
        "hinge_loss": [p.hinge_loss for p in points],
        "deviation": [p.deviation for p in points],
    }


def _write_sample_digest(result, index, samples_dir):
    digest = {
        "index": index,
        "mode": result.mode,
        "input_distance": result.input_distance,
        "output_distance": result.output_distance,
        "dev": result.dev,
        "success": bool(result.success),
        "iterations_used": result.iterations_used,
        "lambda_final": result.lambda_final,
        "dimension_change_rates": (
            None if result.dimension_change_rates is None
            else [float(r) for r in result.dimension_change_rates]
        ),
        "trajectory": _trajectory_columns(result.trajectory),
    }
    path = samples_dir / f"sample_{index:03d}.json"
    path.write_text(json.dumps(digest, indent=2) + "\n")


def cmd_attack(args):
    file_cfg = parse_config_file(args.config) if args.config else {}
    settings = _Settings(args, file_cfg)

    mode = settings.get("mode", "attack.mode")
    if mode is None:
        raise ConfigError("no attack mode given (--mode image_space|latent_space|style_space)")
    ckpt = settings.get("ckpt", "checkpoint")
    if ckpt is None:
        raise ConfigError("no checkpoint given (--ckpt)")
    kind, _ = peek_checkpoint(ckpt)
    if mode in _VAE_MODES and kind != "vae":
        raise ConfigError(f"mode {mode!r} needs a VAE checkpoint, got {kind!r}")
    if mode == "style_space" and kind != "style_generator":
        raise ConfigError(f"mode {mode!r} needs a style-generator checkpoint, got {kind!r}")

    profile = _resolve_profile(settings, require=mode in _VAE_MODES)
    default_norm = profile.default_norm if profile is not None else "l1"
    cfg = _attack_config(settings, mode, default_norm)
    num_samples = int(settings.get("num_samples", "num_samples", 16))
    if num_samples < 1:
        raise ConfigError(f"num_samples must be >= 1, got {num_samples}")
    grid_count = int(settings.get("grids", "grid_count", DEFAULT_GRID_COUNT))
    dataset_name = profile.name if profile is not None else "sampled_w"
    out_dir = _resolve_out(settings, f"attack_{dataset_name}_{mode}_seed{cfg.seed}")

    # validation done; start the work
    model = load_checkpoint(ckpt)
    samples_dir = out_dir / "samples"
    grids_dir = out_dir / "grids"
    samples_dir.mkdir(parents=True, exist_ok=True)
    grids_dir.mkdir(parents=True, exist_ok=True)

    if mode in _VAE_MODES:
        dataset = load_dataset(profile, seed=cfg.seed)
        if num_samples > len(dataset.test):
            raise ConfigError(
                f"requested {num_samples} samples but test split holds {len(dataset.test)}"
            )
        originals = dataset.test[:num_samples]
        results = run_vae_campaign(model, originals, cfg)
        for i, (x_ori, res) in enumerate(zip(originals, results)):
            _write_sample_digest(res, i, samples_dir)
            if i < grid_count:
                render_quad_grid(
                    x_ori,
                    res.adversarial_image,
                    model.reconstruct(x_ori),
                    model.reconstruct(res.adversarial_image),
                    grids_dir / f"grid_{i:03d}.png",
                )
    else:
        origins = sample_style_origins(model, num_samples, seed=cfg.seed)
        results = run_style_campaign(model, origins, cfg)
        for i, (w_ori, res) in enumerate(zip(origins, results)):
            _write_sample_digest(res, i, samples_dir)
            if i < grid_count:
                dev_text = "" if res.dev is None else f"Dev {res.dev:.1f}%  "
                render_pair_grid(
                    model.synthesize(w_ori),
                    res.adversarial_image,
                    grids_dir / f"grid_{i:03d}.png",
                    annotation=f"{dev_text}output RMSD {res.output_distance:.3f}",
                )

    summary = aggregate(results, dataset_name, mode)
    write_report(summary, out_dir / "report.json", "json")
    write_report(summary, out_dir / "report.csv", "csv")
    print(f"results: {out_dir}")
    print(
        f"{dataset_name} {mode}: n={summary.num_samples} "
        f"Dis_input={summary.mean_input_distance:.6g} "
        f"Dis_output={summary.mean_output_distance:.6g} "
        + (f"Dev={summary.mean_dev:.6g}% " if summary.mean_dev is not None else "")
        + f"success_rate={summary.success_rate:.6g}"
    )
    return 0


# ---- report -----------------------------------------------------------------------


def _load_digests(results_dir):
    samples_dir = Path(results_dir) / "samples"
    digests = []
    for path in sorted(samples_dir.glob("sample_*.json")) if samples_dir.is_dir() else []:
        try:
            digests.append(json.loads(path.read_text()))
        except ValueError as exc:
            raise DataError(f"corrupt sample digest {path}: {exc}") from exc
    return digests


def _plot_trajectory(digest, path):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    traj = digest["trajectory"]
    iters = traj["iteration"]
    fig, ax_loss = plt.subplots(figsize=(7, 4))
    ax_loss.plot(iters, traj["output_loss"], color="tab:red", label="output loss")
    ax_loss.set_xlabel("iteration")
    ax_loss.set_ylabel("output loss", color="tab:red")
    ax_var = ax_loss.twinx()
    if any(v is not None for v in traj["deviation"]):
        series = [v if v is not None else float("nan") for v in traj["deviation"]]
        label, color = "feature deviation (%)", "tab:blue"
    else:
        series = traj["input_distance"]
        label, color = "input distance", "tab:blue"
    ax_var.plot(iters, series, color=color, label=label)
    ax_var.set_ylabel(label, color=color)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def _plot_dimensions(digest, path):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rates = digest["dimension_change_rates"]
    fig, ax = plt.subplots(figsize=(7, 3.5))
    ax.bar(range(len(rates)), rates, color="tab:blue")
    ax.set_xlabel("style layer")
    ax.set_ylabel("change rate (%)")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def cmd_report(args):
    results_dir = Path(args.results_dir)
    report_path = results_dir / "report.json"
    if not report_path.is_file():
        raise DataError(f"no report.json under {results_dir}")
    from .data import read_report

    summary = read_report(report_path)
    dev_text = "-" if summary.mean_dev is None else f"{summary.mean_dev:.6g}"
    header = f"{'dataset':<12}{'mode':<14}{'n':>5}  {'Dis_input':>10}  {'Dis_output':>10}  {'Dev':>8}  {'success':>8}"
    row = (
        f"{summary.dataset_name:<12}{summary.mode:<14}{summary.num_samples:>5}  "
        f"{summary.mean_input_distance:>10.6g}  {summary.mean_output_distance:>10.6g}  "
        f"{dev_text:>8}  {summary.success_rate:>8.6g}"
    )
    print(header)
    print(row)

    digests = _load_digests(results_dir)
    out_dir = Path(args.out) if args.out else results_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    with_traj = [d for d in digests if d.get("trajectory", {}).get("iteration")]
    if with_traj:
        print(f"trajectory plot: {_plot_trajectory(with_traj[0], out_dir / 'trajectory.png')}")
    with_rates = [d for d in digests if d.get("dimension_change_rates")]
    if with_rates:
        print(f"dimension plot: {_plot_dimensions(with_rates[0], out_dir / 'dimensions.png')}")
    return 0


# ---- parser ------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="typeone",
        description="Type I attacks on small generative models: train targets, run attacks, render reports.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key=value experiment config file")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--out", default=None, help=f"output directory (default: ${OUTPUT_ROOT_ENV}/<auto>)")

    data_opts = argparse.ArgumentParser(add_help=False)
    data_opts.add_argument("--dataset", choices=sorted(known_profiles()), default=None)
    data_opts.add_argument("--data-root", dest="data_root", default=None, help="dataset source directory")
    data_opts.add_argument("--train-size", dest="train_size", type=int, default=None)
    data_opts.add_argument("--test-size", dest="test_size", type=int, default=None)

    p_train = sub.add_parser("train", parents=[common, data_opts], help="train a VAE target model")
    p_train.add_argument("--epochs", type=int, default=None)
    p_train.add_argument("--batch-size", dest="batch_size", type=int, default=None)
    p_train.add_argument("--lr", type=float, default=None)
    p_train.add_argument("--kl-weight", dest="kl_weight", type=float, default=None)
    p_train.add_argument("--latent-dim", dest="latent_dim", type=int, default=None)
    p_train.add_argument("--channels", type=int, default=None)
    p_train.set_defaults(func=cmd_train)

    p_attack = sub.add_parser("attack", parents=[common, data_opts], help="run an attack campaign")
    p_attack.add_argument("--mode", choices=["image_space", "latent_space", "style_space"], default=None)
    p_attack.add_argument("--ckpt", default=None, help="target model checkpoint")
    p_attack.add_argument("-n", "--num-samples", dest="num_samples", type=int, default=None)
    p_attack.add_argument("--grids", type=int, default=None, help="how many figure grids to render")
    p_attack.add_argument("--lambda0", type=float, default=None)
    p_attack.add_argument("--alpha", type=float, default=None)
    p_attack.add_argument("--eta", type=float, default=None)
    p_attack.add_argument("--epsilon", type=float, default=None)
    p_attack.add_argument("--zeta", type=float, default=None)
    p_attack.add_argument("--xi", type=float, default=None)
    p_attack.add_argument("--max-iters", dest="max_iters", type=int, default=None)
    p_attack.add_argument("--norm", choices=["l1", "l2"], default=None)
    p_attack.add_argument("--scheduler", choices=["constant", "adaptive"], default=None)
    p_attack.add_argument("--l-hat-w", dest="l_hat_w", type=float, default=None)
    p_attack.set_defaults(func=cmd_attack)

    p_report = sub.add_parser("report", help="render tables and plots from attack results")
    p_report.add_argument("results_dir")
    p_report.add_argument("--out", default=None, help="where plots go (default: the results directory)")
    p_report.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except TypeOneError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
