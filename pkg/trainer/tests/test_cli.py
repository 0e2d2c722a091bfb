"""Command line round trip: train then export."""

from night_trainer.cli import main


def test_cli_train_then_export(small_manifest, tmp_path, capsys):
    run_dir = tmp_path / "run"
    rc = main(
        [
            "train",
            "--manifest", str(small_manifest),
            "--out", str(run_dir),
            "--epochs", "1",
            "--batch-size", "4",
            "--no-augment",
        ]
    )
    assert rc == 0
    assert "trained 1 epochs" in capsys.readouterr().out
    assert (run_dir / "best.pt").exists()

    pred_dir = tmp_path / "preds"
    rc = main(
        [
            "export",
            "--checkpoint", str(run_dir / "best.pt"),
            "--manifest", str(small_manifest),
            "--out", str(pred_dir),
            "--split", "test",
        ]
    )
    assert rc == 0
    assert list(pred_dir.glob("*.nlos"))


def test_cli_reports_missing_checkpoint(tmp_path, capsys):
    rc = main(
        [
            "export",
            "--checkpoint", str(tmp_path / "nope.pt"),
            "--manifest", str(tmp_path / "nope.json"),
            "--out", str(tmp_path / "out"),
        ]
    )
    assert rc == 1
    assert "night-train:" in capsys.readouterr().err
