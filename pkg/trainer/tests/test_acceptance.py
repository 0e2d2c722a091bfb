"""Acceptance criteria for the trainer component.

Each test prints one ``[acceptance] PASS/FAIL`` line so the criteria can be
audited from the test log.  The toy learning run is the expensive one
(dataset generation plus 32 training epochs, tens of minutes on CPU).
"""

import numpy as np
import torch

import night.metrics
import night.sampleio
from night.metrics import hard_threshold

from night_trainer.losses import LossConfig, combined_loss
from night_trainer.ste import ste_threshold
from night_trainer.train import TrainConfig, train

FREQ = 2e7


def _report(capsys, name, ok):
    with capsys.disabled():
        print(f"[acceptance] {'PASS' if ok else 'FAIL'}: {name}")
    assert ok, name


def test_loss_parity_with_reference(capsys):
    """Trainer loss equals the reference combined loss within 1e-5."""
    rng = np.random.default_rng(123)
    worst = 0.0
    for i in range(10):
        h, w = 16, 20
        pred = rng.normal(size=(h, w)) + 1j * rng.normal(size=(h, w))
        gt_depth = np.where(
            rng.random((h, w)) < 0.25, rng.uniform(0.05, 3.0, (h, w)), 0.0
        )
        gt_mask = gt_depth > 0.01
        record = night.sampleio.SampleRecord(
            id=f"fixture_{i}",
            frequencies_hz=(FREQ, 5e7, 6e7),
            input_phasors=np.zeros((3, h, w), dtype=np.complex64),
            gt_phasor=pred.astype(np.complex64),
            gt_depth=gt_depth,
            gt_mask=gt_mask,
        )
        reference = night.metrics.combined_loss(pred, record)
        t = torch.stack(
            [torch.from_numpy(pred.real), torch.from_numpy(pred.imag)]
        ).unsqueeze(0)
        ours = float(
            combined_loss(
                t,
                torch.from_numpy(gt_depth).unsqueeze(0),
                torch.from_numpy(gt_mask.astype(np.float64)).unsqueeze(0),
                LossConfig(frequency_hz=FREQ),
            )
        )
        worst = max(worst, abs(ours - reference))
    _report(capsys, f"loss parity on 10 shared fixtures (max |diff| = {worst:.2e})", worst <= 1e-5)


def test_ste_forward_masks_bit_equal(capsys):
    """STE forward masks are bit-equal to the reference hard threshold."""
    rng = np.random.default_rng(7)
    depth = rng.uniform(0.0, 0.03, (64, 48))
    depth.ravel()[:6] = [0.0, 0.01, 0.0100001, 0.0099999, 2.0, 7.4]
    ours = ste_threshold(torch.from_numpy(depth), 0.01).numpy().astype(bool)
    ref = hard_threshold(depth, 0.01)
    equal = np.array_equal(ours, ref)
    _report(capsys, "STE forward masks bit-equal to reference hard_threshold", equal)


def test_toy_learning(toy_manifest, tmp_path, capsys):
    """64 train / 16 test scenes at 64x48, <= 32 epochs: smoothed training
    loss strictly decreases first to last epoch and held-out mIoU >= 0.3."""
    cfg = TrainConfig(
        max_epochs=32,
        learning_rate=1e-3,
        batch_size=4,
        patience=32,
        augment=False,
        seed=0,
    )
    records = train(toy_manifest, toy_manifest, tmp_path / "run", cfg)
    losses = np.array([r["train_loss"] for r in records])
    k = 5  # moving-average window to smooth batch-level loss noise
    smoothed = np.convolve(losses, np.ones(k) / k, mode="valid")
    decreased = bool(smoothed[-1] < smoothed[0])
    miou = records[-1]["val_miou"]
    _report(
        capsys,
        f"toy learning: smoothed train loss {smoothed[0]:.3f} -> {smoothed[-1]:.3f} decreases",
        decreased,
    )
    _report(capsys, f"toy learning: held-out mIoU {miou:.3f} >= 0.3", miou >= 0.3)
