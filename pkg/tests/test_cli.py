"""Command line front end: subcommand flows and exit codes."""

import json

import numpy as np
import pytest

from night import cli
from night.sampleio import parse_sample
from night.scene import sample_scene, save_scene


@pytest.fixture(scope="module")
def cli_dataset(tmp_path_factory):
    """Dataset generated through the CLI itself; returns (root, config_path)."""
    root = tmp_path_factory.mktemp("cli_ds")
    cfg = {
        "width": 24,
        "height": 18,
        "wall_patches": [16, 8],
        "object_samples": 64,
    }
    cfg_path = root / "config.json"
    cfg_path.write_text(json.dumps(cfg))
    out = root / "data"
    rc = cli.main(
        ["generate", "--config", str(cfg_path), "--seed", "99", "--out", str(out), "--n-scenes", "4"]
    )
    assert rc == cli.EXIT_OK
    return out, cfg_path


def test_generate_layout(cli_dataset):
    out, _ = cli_dataset
    assert (out / "manifest.json").exists()
    doc = json.loads((out / "manifest.json").read_text())
    assert len(doc["samples"]) == 4
    for entry in doc["samples"]:
        assert (out / entry["file"]).exists()


def test_preprocess_command(cli_dataset, tmp_path):
    out, _ = cli_dataset
    dest = tmp_path / "pre"
    rc = cli.main(["preprocess", "--manifest", str(out / "manifest.json"), "--out", str(dest)])
    assert rc == cli.EXIT_OK
    arrays = sorted(dest.glob("*.npy"))
    assert len(arrays) == 4
    x = np.load(arrays[0])
    assert x.shape == (7, 18, 24)
    assert x.dtype == np.float32


def test_baseline_and_eval_commands(cli_dataset, tmp_path):
    out, _ = cli_dataset
    preds = tmp_path / "preds"
    rc = cli.main(["baseline", "--manifest", str(out / "manifest.json"), "--out", str(preds)])
    assert rc == cli.EXIT_OK
    report = tmp_path / "report.json"
    rc = cli.main(
        ["eval", "--pred", str(preds), "--gt", str(out / "manifest.json"), "--report", str(report)]
    )
    assert rc == cli.EXIT_OK
    doc = json.loads(report.read_text())
    assert len(doc["per_sample"]) == 4
    assert 0.0 <= doc["miou"]["mean"] <= 1.0


def test_eval_split_filter(cli_dataset, tmp_path):
    out, _ = cli_dataset
    preds = tmp_path / "preds"
    cli.main(["baseline", "--manifest", str(out / "manifest.json"), "--out", str(preds)])
    report = tmp_path / "report.json"
    rc = cli.main(
        [
            "eval",
            "--pred", str(preds),
            "--gt", str(out / "manifest.json"),
            "--report", str(report),
            "--split", "test",
        ]
    )
    assert rc == cli.EXIT_OK
    doc = json.loads(report.read_text())
    assert len(doc["per_sample"]) == 1


def test_render_command(tmp_path, cli_dataset):
    _, cfg_path = cli_dataset
    scene_path = tmp_path / "scene.json"
    save_scene(sample_scene(4, 16, 12), scene_path)
    out = tmp_path / "one.nlos"
    rc = cli.main(
        ["render", "--scene", str(scene_path), "--out", str(out), "--config", str(cfg_path), "--id", "one"]
    )
    assert rc == cli.EXIT_OK
    rec = parse_sample(out)
    assert rec.id == "one"
    assert rec.gt_depth.shape == (12, 16)


def test_export_pointcloud_command(cli_dataset, tmp_path):
    out, _ = cli_dataset
    doc = json.loads((out / "manifest.json").read_text())
    sample = out / doc["samples"][0]["file"]
    dest = tmp_path / "cloud.xyz"
    rc = cli.main(["export-pointcloud", "--sample", str(sample), "--out", str(dest)])
    assert rc == cli.EXIT_OK
    lines = dest.read_text().splitlines()
    rec = parse_sample(sample)
    assert len(lines) == int(np.count_nonzero(rec.gt_depth > 0))
    if lines:
        assert len(lines[0].split()) == 3


def test_plot_command(cli_dataset, tmp_path):
    out, _ = cli_dataset
    doc = json.loads((out / "manifest.json").read_text())
    sample = out / doc["samples"][0]["file"]
    dest = tmp_path / "plots"
    rc = cli.main(["plot", "--sample", str(sample), "--out", str(dest)])
    assert rc == cli.EXIT_OK
    pngs = list(dest.glob("*.png"))
    assert len(pngs) == 10  # 4 gt planes + 3 freq x (re, im)
    assert len(list(dest.glob("*_scales.json"))) == 1


def test_exit_code_bad_json_config(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    rc = cli.main(["generate", "--config", str(bad), "--seed", "1", "--out", str(tmp_path / "d")])
    assert rc == cli.EXIT_CONFIG


def test_exit_code_unknown_config_key(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"widht": 8}))
    rc = cli.main(["generate", "--config", str(bad), "--seed", "1", "--out", str(tmp_path / "d")])
    assert rc == cli.EXIT_CONFIG


def test_exit_code_missing_manifest(tmp_path):
    rc = cli.main(["preprocess", "--manifest", str(tmp_path / "nope.json"), "--out", str(tmp_path / "o")])
    assert rc == cli.EXIT_IO


def test_exit_code_corrupt_sample(tmp_path):
    bad = tmp_path / "bad.nlos"
    bad.write_bytes(b"JUNKJUNKJUNK")
    rc = cli.main(["plot", "--sample", str(bad), "--out", str(tmp_path / "p")])
    assert rc == cli.EXIT_IO


def test_exit_code_validation_error(tmp_path, cli_dataset):
    out, _ = cli_dataset
    # evaluating with an empty prediction directory -> missing predictions
    empty = tmp_path / "empty"
    empty.mkdir()
    rc = cli.main(
        ["eval", "--pred", str(empty), "--gt", str(out / "manifest.json"), "--report", str(tmp_path / "r.json")]
    )
    assert rc == cli.EXIT_VALIDATION


def test_exit_code_bad_scene_schema(tmp_path, cli_dataset):
    _, cfg_path = cli_dataset
    scene_path = tmp_path / "scene.json"
    scene_path.write_text(json.dumps({"camera": {}}))
    rc = cli.main(
        ["render", "--scene", str(scene_path), "--out", str(tmp_path / "s.nlos"), "--config", str(cfg_path)]
    )
    assert rc == cli.EXIT_VALIDATION
