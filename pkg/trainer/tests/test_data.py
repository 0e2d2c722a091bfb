"""Sample/manifest reading and preprocessing against the simulator's files."""

import numpy as np
import pytest
import torch

# the simulator package is imported in tests only, as the reference
# implementation of the shared file formats
import night.dataset
import night.sampleio

from night_trainer import data as td
from night_trainer import sampleio as tio


def test_read_sample_matches_reference(small_manifest):
    doc = td.load_manifest(small_manifest)
    root = small_manifest.parent
    for entry in doc["samples"]:
        ours = tio.read_sample(root / entry["file"])
        ref = night.sampleio.parse_sample(root / entry["file"])
        assert ours.id == ref.id
        assert ours.frequencies_hz == ref.frequencies_hz
        assert np.array_equal(ours.input_phasors, ref.input_phasors)
        assert np.array_equal(ours.gt_phasor, ref.gt_phasor)
        assert np.array_equal(ours.gt_depth, ref.gt_depth)
        assert np.array_equal(ours.gt_mask, ref.gt_mask)
        assert ours.meta == ref.meta


def test_write_sample_parses_with_reference(small_manifest, tmp_path):
    doc = td.load_manifest(small_manifest)
    sample = tio.read_sample(small_manifest.parent / doc["samples"][0]["file"])
    out = tmp_path / "rt.nlos"
    tio.write_sample(sample, out)
    ref = night.sampleio.parse_sample(out)
    assert ref.id == sample.id
    assert np.array_equal(ref.gt_phasor, sample.gt_phasor)
    # and byte-identical to the original file
    assert out.read_bytes() == (small_manifest.parent / doc["samples"][0]["file"]).read_bytes()


def test_read_sample_rejects_junk(tmp_path):
    bad = tmp_path / "bad.nlos"
    bad.write_bytes(b"JUNKJUNKJUNKJUNKJUNK")
    with pytest.raises(ValueError):
        tio.read_sample(bad)


def test_manifest_version_check(tmp_path):
    bad = tmp_path / "m.json"
    bad.write_text('{"format_version": 999}')
    with pytest.raises(ValueError):
        td.load_manifest(bad)


def test_preprocess_matches_reference(small_manifest):
    doc = td.load_manifest(small_manifest)
    root = small_manifest.parent
    k = float(doc["normalization_k"])
    for entry in doc["samples"][:3]:
        ours = td.preprocess(tio.read_sample(root / entry["file"]), k)
        ref = night.dataset.preprocess(night.sampleio.parse_sample(root / entry["file"]), k)
        assert np.array_equal(ours, ref)


def test_dataset_tensors(small_manifest):
    ds = td.PhasorDataset(small_manifest, split="train")
    x, gt, depth, mask = ds[0]
    assert x.shape == (7, 18, 24)
    assert gt.shape == (2, 18, 24)
    assert depth.shape == mask.shape == (18, 24)
    assert x.dtype == gt.dtype == depth.dtype == mask.dtype == torch.float32
    assert torch.equal(mask > 0, depth > 0)


def test_dataset_empty_split_rejected(small_manifest):
    with pytest.raises(ValueError):
        td.PhasorDataset(small_manifest, split="nope")


def test_dataset_augmentation_is_epoch_seeded(small_manifest):
    ds = td.PhasorDataset(small_manifest, split="train", augment=True, seed=3)
    ds.set_epoch(1)
    a = ds[0]
    b = ds[0]
    assert torch.equal(a[0], b[0])
    ds.set_epoch(2)
    c = ds[0]
    assert not torch.equal(a[0], c[0])
    # ground-truth planes stay noise-free and mask==depth>0 survives
    assert torch.equal(c[3] > 0, c[2] > 0)
