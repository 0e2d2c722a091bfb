"""Reference losses and evaluation metrics (forward-only, no gradients).

Implements the balanced depth MAE, the IoU shape term, their combination,
and dataset-level aggregation into an evaluation report.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from night import tof
from night.sampleio import SampleRecord


@dataclass(frozen=True)
class LossConfig:
    alpha: float = 1.0 / 7.0
    depth_threshold_m: float = 0.01

    def __post_init__(self):
        if self.alpha <= 0 or self.depth_threshold_m <= 0:
            raise ValueError("alpha and depth threshold must be positive")


def hard_threshold(depth: np.ndarray, eps_m: float) -> np.ndarray:
    """Object mask from a depth map: strictly greater than the threshold."""
    if eps_m <= 0:
        raise ValueError("threshold must be positive")
    return np.asarray(depth) > eps_m


def iou_score(a: np.ndarray, b: np.ndarray) -> float:
    """Intersection over union of two masks; both-empty counts as 1."""
    a = np.asarray(a, dtype=bool)
    b = np.asarray(b, dtype=bool)
    if a.shape != b.shape:
        raise ValueError("mask shapes differ")
    union = np.count_nonzero(a | b)
    if union == 0:
        return 1.0
    return np.count_nonzero(a & b) / union


def balanced_mae(pred_depth, gt_depth, gt_mask, cfg: LossConfig = LossConfig()) -> float:
    """Object/background balanced depth MAE: w * L_obj + L_bgr.

    The object term is up-weighted by w = alpha * |B| / |O| to compensate
    for the dominant background.  With no object pixels the background term
    alone is returned.
    """
    pred_depth = np.asarray(pred_depth, dtype=np.float64)
    gt_depth = np.asarray(gt_depth, dtype=np.float64)
    gt_mask = np.asarray(gt_mask, dtype=bool)
    if pred_depth.shape != gt_depth.shape or gt_depth.shape != gt_mask.shape:
        raise ValueError("shapes differ")
    err = np.abs(pred_depth - gt_depth)
    n_obj = np.count_nonzero(gt_mask)
    n_bgr = gt_mask.size - n_obj
    l_bgr = float(err[~gt_mask].mean()) if n_bgr else 0.0
    if n_obj == 0:
        return l_bgr
    l_obj = float(err[gt_mask].mean())
    w = cfg.alpha * n_bgr / n_obj
    return w * l_obj + l_bgr


def combined_loss(pred_phasor: np.ndarray, record: SampleRecord, cfg: LossConfig = LossConfig()) -> float:
    """(balanced MAE + IoU loss) / 2 of a predicted 20 MHz phasor image."""
    pred_phasor = np.asarray(pred_phasor, dtype=np.complex128)
    if pred_phasor.shape != record.gt_depth.shape:
        raise ValueError("prediction dims do not match the ground truth")
    freq = record.frequencies_hz[0]
    pred_depth = tof.naive_depth(pred_phasor, freq)
    pred_mask = hard_threshold(pred_depth, cfg.depth_threshold_m)
    gt_depth = record.gt_depth.astype(np.float64)
    l_mae = balanced_mae(pred_depth, gt_depth, record.gt_mask, cfg)
    l_iou = 1.0 - iou_score(pred_mask, record.gt_mask)
    return (l_mae + l_iou) / 2.0


def _stats(values) -> dict:
    arr = np.asarray(values, dtype=np.float64)
    return {
        "mean": float(arr.mean()),
        "std": float(arr.std()),
        "min": float(arr.min()),
        "max": float(arr.max()),
    }


def evaluate_sample(pred_phasor: np.ndarray, record: SampleRecord, cfg: LossConfig = LossConfig()) -> dict:
    """Per-sample depth MAE [cm] (all pixels + per region) and IoU."""
    freq = record.frequencies_hz[0]
    pred_depth = tof.naive_depth(np.asarray(pred_phasor, dtype=np.complex128), freq)
    gt_depth = record.gt_depth.astype(np.float64)
    err_cm = np.abs(pred_depth - gt_depth) * 100.0
    mask = record.gt_mask
    pred_mask = hard_threshold(pred_depth, cfg.depth_threshold_m)
    out = {
        "id": record.id,
        "mae_cm": float(err_cm.mean()),
        "iou": iou_score(pred_mask, mask),
    }
    out["mae_cm_object"] = float(err_cm[mask].mean()) if mask.any() else 0.0
    out["mae_cm_background"] = float(err_cm[~mask].mean()) if (~mask).any() else 0.0
    return out


def evaluate_dataset(predictions: dict, records: dict, cfg: LossConfig = LossConfig()) -> dict:
    """Aggregate per-sample metrics into a report.

    ``predictions`` maps sample id -> predicted phasor image; ``records``
    maps id -> SampleRecord.  Every record must have a prediction.
    """
    missing = sorted(set(records) - set(predictions))
    if missing:
        raise KeyError(f"missing predictions for samples: {missing}")
    per_sample = [
        evaluate_sample(predictions[sid], records[sid], cfg) for sid in sorted(records)
    ]
    return {
        "per_sample": per_sample,
        "mae": _stats([s["mae_cm"] for s in per_sample]),
        "miou": _stats([s["iou"] for s in per_sample]),
    }


def save_report(report: dict, path) -> None:
    with open(path, "w") as f:
        json.dump(report, f, indent=2)
