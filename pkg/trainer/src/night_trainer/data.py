"""Dataset loading: manifest parsing, 7-channel inputs, light augmentation."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import torch
from torch.utils.data import Dataset

from night_trainer.sampleio import Sample, read_sample

MANIFEST_VERSION = 1


def load_manifest(path) -> dict:
    with open(path) as f:
        doc = json.load(f)
    if doc.get("format_version") != MANIFEST_VERSION:
        raise ValueError(f"unsupported manifest version {doc.get('format_version')}")
    return doc


def manifest_entries(doc: dict, split: str | None = None) -> list:
    entries = doc["samples"]
    if split is not None:
        entries = [e for e in entries if e["split"] == split]
    return entries


def preprocess(sample: Sample, k: float) -> np.ndarray:
    """7-channel float32 input: [A20/K, Re/A20 x3, Im/A20 x3]; dark pixels zero."""
    if k <= 0:
        raise ValueError("normalization constant must be positive")
    ph = sample.input_phasors.astype(np.complex128)
    a20 = np.abs(ph[0])
    safe = np.where(a20 > 0, a20, 1.0)
    out = np.empty((7,) + a20.shape)
    out[0] = a20 / k
    out[1:4] = ph.real / safe
    out[4:7] = ph.imag / safe
    out[:, a20 == 0] = 0.0
    return out.astype(np.float32)


class PhasorDataset(Dataset):
    """(input, gt phasor, gt depth, gt mask) tensors for one manifest split.

    Optional augmentation: axis flips plus Gaussian noise on the input
    channels, drawn from a generator seeded per (epoch, index) so epochs
    are reproducible.
    """

    def __init__(self, manifest_path, split=None, augment=False, noise_sigma=0.02, seed=0):
        self.root = Path(manifest_path).parent
        self.doc = load_manifest(manifest_path)
        self.entries = manifest_entries(self.doc, split)
        if not self.entries:
            raise ValueError(f"manifest has no samples for split {split!r}")
        self.k = float(self.doc["normalization_k"])
        self.frequency_hz = float(self.doc["frequencies_hz"][0])
        self.augment = augment
        self.noise_sigma = noise_sigma
        self.seed = seed
        self.epoch = 0

    def set_epoch(self, epoch: int) -> None:
        self.epoch = epoch

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, idx):
        sample = read_sample(self.root / self.entries[idx]["file"])
        x = preprocess(sample, self.k)
        gt = sample.gt_phasor.astype(np.complex64)
        gt_planes = np.stack([gt.real, gt.imag]).astype(np.float32)
        depth = sample.gt_depth.astype(np.float32)
        mask = sample.gt_mask.astype(np.float32)
        if self.augment:
            rng = np.random.default_rng((self.seed, self.epoch, idx))
            if rng.random() < 0.5:
                x, gt_planes = x[..., ::-1], gt_planes[..., ::-1]
                depth, mask = depth[..., ::-1], mask[..., ::-1]
            if rng.random() < 0.5:
                x, gt_planes = x[:, ::-1], gt_planes[:, ::-1]
                depth, mask = depth[::-1], mask[::-1]
            if self.noise_sigma > 0:
                x = x + rng.normal(0.0, self.noise_sigma, x.shape).astype(np.float32)
        return (
            torch.from_numpy(np.ascontiguousarray(x, dtype=np.float32)),
            torch.from_numpy(np.ascontiguousarray(gt_planes)),
            torch.from_numpy(np.ascontiguousarray(depth)),
            torch.from_numpy(np.ascontiguousarray(mask)),
        )
