"""Export model predictions as sample files consumable by ``night eval``."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import torch

from night_trainer.data import load_manifest, manifest_entries, preprocess
from night_trainer.sampleio import Sample, read_sample, write_sample


@torch.no_grad()
def export_predictions(model, manifest_path, out_dir, split=None, device="cpu"):
    """Write one prediction file per manifest sample into ``out_dir``.

    Each file keeps the sample's id, frequencies and input planes and puts
    the predicted 20 MHz phasor in the ground-truth phasor slot (depth and
    mask planes are zeroed).  Returns the list of written paths; per-sample
    I/O failures are reported with the sample id.
    """
    model.eval()
    doc = load_manifest(manifest_path)
    root = Path(manifest_path).parent
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    k = float(doc["normalization_k"])
    written = []
    for entry in manifest_entries(doc, split):
        sample = read_sample(root / entry["file"])
        x = torch.from_numpy(preprocess(sample, k))[None].to(device)
        pred = model(x)[0].cpu().numpy()
        h, w = sample.gt_depth.shape
        out = Sample(
            id=sample.id,
            frequencies_hz=sample.frequencies_hz,
            input_phasors=sample.input_phasors,
            gt_phasor=(pred[0] + 1j * pred[1]).astype(np.complex64),
            gt_depth=np.zeros((h, w), dtype=np.float32),
            gt_mask=np.zeros((h, w), dtype=bool),
            meta={"prediction": True},
        )
        path = out_dir / f"{sample.id}.nlos"
        try:
            write_sample(out, path)
        except OSError as exc:
            raise OSError(f"failed to write prediction for {sample.id}: {exc}") from exc
        written.append(path)
    return written
