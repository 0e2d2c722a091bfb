"""Differentiable counterpart of the reference evaluation loss.

The predicted 2-channel phasor is turned into depth through the wrapped
atan2 phase chain, masked with the straight-through threshold, and scored
with the balanced depth MAE plus a soft IoU term.  On hard {0, 1} masks the
soft IoU reduces to exact intersection-over-union, so the forward value
matches the reference implementation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import torch

from night_trainer.ste import ste_threshold

C_LIGHT = 299792458.0
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class LossConfig:
    frequency_hz: float = 2.0e7
    alpha: float = 1.0 / 7.0
    depth_threshold_m: float = 0.01

    def __post_init__(self):
        if self.frequency_hz <= 0 or self.alpha <= 0 or self.depth_threshold_m <= 0:
            raise ValueError("loss parameters must be positive")


def depth_from_phasor(pred: torch.Tensor, frequency_hz: float) -> torch.Tensor:
    """Depth map from a (batch, 2, h, w) phasor: wrapped-phase chain.

    atan2 of the zero phasor is 0, so all-zero background pixels map to
    depth 0, matching the reference depth extraction.
    """
    phase = torch.atan2(pred[:, 1], pred[:, 0])
    phase = torch.remainder(phase, TWO_PI)
    return C_LIGHT * phase / (2.0 * TWO_PI * frequency_hz)


def balanced_mae(pred_depth, gt_depth, gt_mask, alpha: float) -> torch.Tensor:
    """Per-batch-mean of w * L_obj + L_bgr with w = alpha * |B| / |O|."""
    err = (pred_depth - gt_depth).abs()
    obj = gt_mask
    bgr = 1.0 - gt_mask
    n_obj = obj.sum(dim=(-2, -1))
    n_bgr = bgr.sum(dim=(-2, -1))
    s_obj = (err * obj).sum(dim=(-2, -1))
    s_bgr = (err * bgr).sum(dim=(-2, -1))
    l_bgr = torch.where(n_bgr > 0, s_bgr / n_bgr.clamp(min=1), torch.zeros_like(s_bgr))
    w = alpha * n_bgr / n_obj.clamp(min=1)
    l_obj = w * s_obj / n_obj.clamp(min=1)
    return torch.where(n_obj > 0, l_obj + l_bgr, l_bgr).mean()


def soft_iou(pred_mask, gt_mask) -> torch.Tensor:
    """Product-form IoU: sum(p*t) / sum(p + t - p*t); both-empty counts 1."""
    inter = (pred_mask * gt_mask).sum(dim=(-2, -1))
    union = (pred_mask + gt_mask - pred_mask * gt_mask).sum(dim=(-2, -1))
    return torch.where(union > 0, inter / union.clamp(min=1e-12), torch.ones_like(inter)).mean()


def combined_loss(pred, gt_depth, gt_mask, cfg: LossConfig = LossConfig()) -> torch.Tensor:
    """(balanced MAE + (1 - IoU)) / 2 of a predicted phasor batch."""
    if pred.ndim != 4 or pred.shape[1] != 2:
        raise ValueError(f"expected (batch, 2, h, w) prediction, got {tuple(pred.shape)}")
    if pred.shape[-2:] != gt_depth.shape[-2:]:
        raise ValueError("prediction dims do not match the ground truth")
    pred_depth = depth_from_phasor(pred, cfg.frequency_hz)
    pred_mask = ste_threshold(pred_depth, cfg.depth_threshold_m)
    l_mae = balanced_mae(pred_depth, gt_depth, gt_mask, cfg.alpha)
    l_iou = 1.0 - soft_iou(pred_mask, gt_mask)
    return (l_mae + l_iou) / 2.0
