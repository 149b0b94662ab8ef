"""Distance and deviation metrics plus campaign-level aggregation."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import DegenerateReferenceError, InvalidInputError

ZERO_REFERENCE_TOL = 1e-12


def rmsd(a, b) -> float:
    """Root-mean-squared deviation per element between two equally shaped arrays."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise InvalidInputError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.sqrt(np.mean((a - b) ** 2)))


def deviation(w, w_ori) -> float:
    """Percentage deviation of a style matrix from its reference:
    (1/n) * || (w - w_ori) / w_ori ||_2 * 100, elementwise division,
    n the total element count. Uniform doubling of an n-element reference
    therefore gives 100/sqrt(n) percent."""
    w = np.asarray(w, dtype=np.float64)
    w_ori = np.asarray(w_ori, dtype=np.float64)
    if w.shape != w_ori.shape:
        raise InvalidInputError(f"shape mismatch: {w.shape} vs {w_ori.shape}")
    if np.any(np.abs(w_ori) < ZERO_REFERENCE_TOL):
        raise DegenerateReferenceError(
            "reference style vector has (near-)zero entries; relative deviation undefined"
        )
    ratio = (w - w_ori) / w_ori
    return float(np.linalg.norm(ratio.ravel()) / w_ori.size * 100.0)


def dimension_change_rates(w, w_ori) -> np.ndarray:
    """Per-layer-row relative change, in percent: one entry per style row."""
    w = np.asarray(w, dtype=np.float64)
    w_ori = np.asarray(w_ori, dtype=np.float64)
    if w.shape != w_ori.shape:
        raise InvalidInputError(f"shape mismatch: {w.shape} vs {w_ori.shape}")
    if w.ndim != 2:
        raise InvalidInputError(f"expected a (layers, style_dim) matrix, got shape {w.shape}")
    ref_norms = np.linalg.norm(w_ori, axis=1)
    if np.any(ref_norms < ZERO_REFERENCE_TOL):
        raise DegenerateReferenceError("reference style row with zero norm")
    return np.linalg.norm(w - w_ori, axis=1) / ref_norms * 100.0


@dataclass
class CampaignSummary:
    """Aggregate of one attack campaign, shaped like the distance tables."""

    dataset_name: str
    mode: str
    num_samples: int
    mean_input_distance: float
    mean_output_distance: float
    success_rate: float
    mean_dev: float | None = None
    per_sample_records: list = field(default_factory=list)


def result_digest(result, index=None) -> dict:
    """Flat, serializable view of one AttackResult."""
    digest = {
        "index": index,
        "input_distance": float(result.input_distance),
        "output_distance": float(result.output_distance),
        "dev": None if result.dev is None else float(result.dev),
        "success": bool(result.success),
        "iterations_used": int(result.iterations_used),
    }
    return digest


def aggregate(results, dataset_name, mode, successes_only=False) -> CampaignSummary:
    """Arithmetic means over a homogeneous sequence of attack results.

    Failed attacks count toward the means unless `successes_only` is set;
    the success rate is always successes / all samples.
    """
    results = list(results)
    if not results:
        raise InvalidInputError("cannot aggregate an empty result sequence")
    if any(r.mode != mode for r in results):
        raise InvalidInputError("results have mixed attack modes")
    digests = [result_digest(r, i) for i, r in enumerate(results)]
    pool = [r for r in results if r.success] if successes_only else results
    if not pool:
        raise InvalidInputError("successes_only requested but no attack succeeded")
    mean_in = float(np.mean([r.input_distance for r in pool]))
    mean_out = float(np.mean([r.output_distance for r in pool]))
    devs = [r.dev for r in pool if r.dev is not None]
    mean_dev = float(np.mean(devs)) if devs else None
    return CampaignSummary(
        dataset_name=dataset_name,
        mode=mode,
        num_samples=len(results),
        mean_input_distance=mean_in,
        mean_output_distance=mean_out,
        success_rate=sum(r.success for r in results) / len(results),
        mean_dev=mean_dev,
        per_sample_records=digests,
    )
