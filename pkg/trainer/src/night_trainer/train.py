"""Training loop: Adam, early stopping, JSONL log, atomic checkpoints."""

from __future__ import annotations

import json
import os
import random
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import torch
from torch.utils.data import DataLoader

from night_trainer.data import PhasorDataset
from night_trainer.losses import LossConfig, combined_loss, depth_from_phasor
from night_trainer.model import PhasorUNet
from night_trainer.ste import ste_threshold


@dataclass(frozen=True)
class TrainConfig:
    max_epochs: int = 695
    learning_rate: float = 1e-4
    batch_size: int = 8
    patience: int = 150
    augment: bool = True
    noise_sigma: float = 0.02
    seed: int = 0

    def __post_init__(self):
        if self.patience < 1:
            raise ValueError("patience must be >= 1")
        if self.max_epochs < 1 or self.batch_size < 1:
            raise ValueError("max_epochs and batch_size must be >= 1")


def _seed_everything(seed: int) -> None:
    random.seed(seed)
    np.random.seed(seed)
    torch.manual_seed(seed)


def save_checkpoint(path, model: PhasorUNet, cfg: TrainConfig, epoch: int) -> None:
    """Write-then-rename so a crash never leaves a half-written checkpoint."""
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    torch.save(
        {"model_state": model.state_dict(), "config": asdict(cfg), "epoch": epoch}, tmp
    )
    os.replace(tmp, path)


def load_checkpoint(path) -> PhasorUNet:
    blob = torch.load(path, map_location="cpu", weights_only=True)
    model = PhasorUNet()
    model.load_state_dict(blob["model_state"])
    model.eval()
    return model


def _hard_iou(pred_mask: torch.Tensor, gt_mask: torch.Tensor) -> float:
    inter = float((pred_mask.bool() & gt_mask.bool()).sum())
    union = float((pred_mask.bool() | gt_mask.bool()).sum())
    return inter / union if union else 1.0


@torch.no_grad()
def evaluate(model, loader, loss_cfg: LossConfig):
    """Mean loss and mean per-sample IoU over a loader."""
    model.eval()
    losses, ious = [], []
    for x, _, depth, mask in loader:
        pred = model(x)
        losses.append(float(combined_loss(pred, depth, mask, loss_cfg)))
        pred_mask = ste_threshold(
            depth_from_phasor(pred, loss_cfg.frequency_hz), loss_cfg.depth_threshold_m
        )
        for i in range(x.shape[0]):
            ious.append(_hard_iou(pred_mask[i], mask[i]))
    return float(np.mean(losses)), float(np.mean(ious))


def train(train_manifest, val_manifest, out_dir, cfg: TrainConfig = TrainConfig(), device="cpu"):
    """Train on one manifest split, validate on another, keep the best model.

    Writes ``checkpoint.pt`` (latest), ``best.pt`` (lowest validation loss)
    and ``log.jsonl`` with one ``{epoch, train_loss, val_loss, val_miou}``
    record per epoch into ``out_dir``.  Stops early after ``cfg.patience``
    epochs without validation improvement.  Returns the log records.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    _seed_everything(cfg.seed)

    train_set = PhasorDataset(
        train_manifest, split="train", augment=cfg.augment, noise_sigma=cfg.noise_sigma, seed=cfg.seed
    )
    val_set = PhasorDataset(val_manifest, split="test", augment=False)
    train_loader = DataLoader(
        train_set,
        batch_size=cfg.batch_size,
        shuffle=True,
        generator=torch.Generator().manual_seed(cfg.seed),
    )
    val_loader = DataLoader(val_set, batch_size=cfg.batch_size)
    loss_cfg = LossConfig(frequency_hz=train_set.frequency_hz)

    model = PhasorUNet().to(device)
    opt = torch.optim.Adam(model.parameters(), lr=cfg.learning_rate)
    # Depth comes from the wrapped phase, so the loss has a cliff at phase
    # zero; annealing the step size lets background pixels settle into the
    # narrow sub-threshold band instead of jittering across the wrap, and
    # clipping bounds the spikes produced by pixels that do cross it.
    sched = torch.optim.lr_scheduler.CosineAnnealingLR(opt, T_max=cfg.max_epochs)
    best_val = float("inf")
    stale = 0
    records = []
    with open(out_dir / "log.jsonl", "w") as log:
        for epoch in range(cfg.max_epochs):
            train_set.set_epoch(epoch)
            model.train()
            epoch_losses = []
            for x, _, depth, mask in train_loader:
                x, depth, mask = x.to(device), depth.to(device), mask.to(device)
                opt.zero_grad()
                loss = combined_loss(model(x), depth, mask, loss_cfg)
                loss.backward()
                torch.nn.utils.clip_grad_norm_(model.parameters(), 1.0)
                opt.step()
                epoch_losses.append(float(loss.detach()))
            sched.step()
            val_loss, val_miou = evaluate(model, val_loader, loss_cfg)
            rec = {
                "epoch": epoch,
                "train_loss": float(np.mean(epoch_losses)),
                "val_loss": val_loss,
                "val_miou": val_miou,
            }
            records.append(rec)
            log.write(json.dumps(rec) + "\n")
            log.flush()
            save_checkpoint(out_dir / "checkpoint.pt", model, cfg, epoch)
            if val_loss < best_val:
                best_val = val_loss
                stale = 0
                save_checkpoint(out_dir / "best.pt", model, cfg, epoch)
            else:
                stale += 1
                if stale >= cfg.patience:
                    break
    return records
