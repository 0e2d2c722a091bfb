"""Training-loop mechanics: config validation, patience, artifacts."""

import json

import pytest
import torch

import night_trainer.train as train_mod
from night_trainer.train import TrainConfig, load_checkpoint, save_checkpoint, train
from night_trainer.model import PhasorUNet


def test_config_rejects_bad_values():
    with pytest.raises(ValueError):
        TrainConfig(patience=0)
    with pytest.raises(ValueError):
        TrainConfig(max_epochs=0)
    with pytest.raises(ValueError):
        TrainConfig(batch_size=0)


def test_empty_manifest_rejected(tmp_path):
    manifest = tmp_path / "manifest.json"
    manifest.write_text(
        json.dumps(
            {
                "format_version": 1,
                "normalization_k": 1.0,
                "frequencies_hz": [2e7, 5e7, 6e7],
                "samples": [],
            }
        )
    )
    with pytest.raises(ValueError):
        train(manifest, manifest, tmp_path / "run", TrainConfig(max_epochs=1))


def test_checkpoint_round_trip(tmp_path):
    model = PhasorUNet()
    save_checkpoint(tmp_path / "ck.pt", model, TrainConfig(), epoch=3)
    loaded = load_checkpoint(tmp_path / "ck.pt")
    for a, b in zip(model.parameters(), loaded.parameters()):
        assert torch.equal(a, b)
    assert not loaded.training


def test_early_stopping_on_frozen_validation(small_manifest, tmp_path, monkeypatch):
    monkeypatch.setattr(train_mod, "evaluate", lambda *a, **k: (1.0, 0.0))
    cfg = TrainConfig(max_epochs=50, patience=3, batch_size=4, augment=False)
    records = train(small_manifest, small_manifest, tmp_path / "run", cfg)
    # epoch 0 sets the best; the next `patience` epochs never improve
    assert len(records) == 1 + cfg.patience


def test_train_writes_log_and_checkpoints(small_manifest, tmp_path):
    out = tmp_path / "run"
    cfg = TrainConfig(max_epochs=2, patience=5, batch_size=4, augment=False)
    records = train(small_manifest, small_manifest, out, cfg)
    assert len(records) == 2
    logged = [json.loads(line) for line in (out / "log.jsonl").read_text().splitlines()]
    assert logged == records
    for rec in records:
        assert set(rec) == {"epoch", "train_loss", "val_loss", "val_miou"}
    assert (out / "checkpoint.pt").exists()
    model = load_checkpoint(out / "best.pt")
    y = model(torch.zeros(1, 7, 18, 24))
    assert torch.isfinite(y).all()
