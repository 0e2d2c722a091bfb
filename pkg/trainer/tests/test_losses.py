"""Differentiable loss against the simulator's reference implementation."""

import numpy as np
import pytest
import torch

import night.metrics
import night.sampleio

from night_trainer.losses import (
    LossConfig,
    balanced_mae,
    combined_loss,
    depth_from_phasor,
    soft_iou,
)

FREQ = 2e7


def _fixture(rng, h=12, w=16):
    """Random prediction/ground-truth pair shared by both implementations."""
    pred = rng.normal(size=(h, w)) + 1j * rng.normal(size=(h, w))
    gt_depth = np.where(rng.random((h, w)) < 0.3, rng.uniform(0.05, 3.0, (h, w)), 0.0)
    gt_mask = gt_depth > 0.01
    return pred, gt_depth.astype(np.float64), gt_mask


def _trainer_loss(pred, gt_depth, gt_mask):
    t = torch.stack(
        [torch.from_numpy(pred.real), torch.from_numpy(pred.imag)]
    ).unsqueeze(0)
    depth = torch.from_numpy(gt_depth).unsqueeze(0)
    mask = torch.from_numpy(gt_mask.astype(np.float64)).unsqueeze(0)
    return float(combined_loss(t, depth, mask, LossConfig(frequency_hz=FREQ)))


def _reference_loss(pred, gt_depth, gt_mask):
    record = night.sampleio.SampleRecord(
        id="fixture",
        frequencies_hz=(FREQ, 5e7, 6e7),
        input_phasors=np.zeros((3,) + gt_depth.shape, dtype=np.complex64),
        gt_phasor=pred.astype(np.complex64),
        gt_depth=gt_depth,
        gt_mask=gt_mask,
    )
    return night.metrics.combined_loss(pred, record)


def test_loss_parity_on_ten_fixtures():
    rng = np.random.default_rng(7)
    for _ in range(10):
        pred, gt_depth, gt_mask = _fixture(rng)
        assert _trainer_loss(pred, gt_depth, gt_mask) == pytest.approx(
            _reference_loss(pred, gt_depth, gt_mask), abs=1e-5
        )


def test_depth_from_phasor_wraps_negative_phase():
    pred = torch.tensor([[[1.0]], [[-1e-3]]], dtype=torch.float64).unsqueeze(0)
    d = depth_from_phasor(pred, FREQ)
    # phase just below zero lands at the far end of the unambiguous range
    assert float(d) > 7.0


def test_soft_iou_both_empty_is_one():
    z = torch.zeros(1, 4, 4)
    assert float(soft_iou(z, z)) == 1.0


def test_soft_iou_equals_hard_iou_on_binary_masks():
    rng = np.random.default_rng(3)
    a = torch.from_numpy((rng.random((1, 8, 8)) < 0.4).astype(np.float64))
    b = torch.from_numpy((rng.random((1, 8, 8)) < 0.4).astype(np.float64))
    inter = float((a.bool() & b.bool()).sum())
    union = float((a.bool() | b.bool()).sum())
    assert float(soft_iou(a, b)) == pytest.approx(inter / union, abs=1e-12)


def test_balanced_mae_no_objects_returns_background_term():
    pred = torch.full((1, 4, 4), 0.5, dtype=torch.float64)
    gt = torch.zeros(1, 4, 4, dtype=torch.float64)
    mask = torch.zeros(1, 4, 4, dtype=torch.float64)
    assert float(balanced_mae(pred, gt, mask, 1.0 / 7.0)) == pytest.approx(0.5, abs=1e-12)


def test_combined_loss_rejects_shape_mismatch():
    with pytest.raises(ValueError):
        combined_loss(torch.zeros(1, 2, 4, 4), torch.zeros(1, 5, 4), torch.zeros(1, 5, 4))
    with pytest.raises(ValueError):
        combined_loss(torch.zeros(1, 3, 4, 4), torch.zeros(1, 4, 4), torch.zeros(1, 4, 4))


def test_loss_is_differentiable():
    rng = np.random.default_rng(11)
    pred, gt_depth, gt_mask = _fixture(rng)
    t = torch.stack(
        [torch.from_numpy(pred.real), torch.from_numpy(pred.imag)]
    ).unsqueeze(0).requires_grad_(True)
    loss = combined_loss(
        t,
        torch.from_numpy(gt_depth).unsqueeze(0),
        torch.from_numpy(gt_mask.astype(np.float64)).unsqueeze(0),
        LossConfig(frequency_hz=FREQ),
    )
    loss.backward()
    assert t.grad is not None
    assert torch.isfinite(t.grad).all()
