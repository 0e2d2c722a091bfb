"""Fixtures: small datasets generated through the simulator CLI.

The trainer talks to the simulator only through its external interfaces,
so fixtures are produced by invoking the ``night`` command line tool.
"""

import json
import subprocess

import pytest


def generate_dataset(out_dir, n_scenes, seed, cfg):
    cfg_path = out_dir / "config.json"
    cfg_path.write_text(json.dumps(cfg))
    subprocess.run(
        [
            "night", "generate",
            "--config", str(cfg_path),
            "--seed", str(seed),
            "--out", str(out_dir),
            "--n-scenes", str(n_scenes),
        ],
        check=True,
        capture_output=True,
    )
    return out_dir / "manifest.json"


@pytest.fixture(scope="session")
def small_manifest(tmp_path_factory):
    """6-scene dataset at 24x18 for fast unit tests."""
    out = tmp_path_factory.mktemp("trainer_small")
    cfg = {"width": 24, "height": 18, "wall_patches": [16, 8], "object_samples": 64}
    return generate_dataset(out, 6, 41, cfg)


@pytest.fixture(scope="session")
def toy_manifest(tmp_path_factory):
    """80-scene dataset at 64x48 (64 train / 16 test) for the learning check.

    Glossy walls only (roughness 0.30): the hidden-object component of the
    return scales with wall glossiness, and at this dataset size the diffuse
    end of the roughness range carries too little multipath signal to learn
    from.  Render fidelity is raised accordingly so the multipath term is
    resolved rather than buried in quadrature error.
    """
    out = tmp_path_factory.mktemp("trainer_toy")
    cfg = {
        "width": 64,
        "height": 48,
        "wall_patches": [64, 32],
        "object_samples": 512,
        "train_ratio": 0.8,
        "roughness_grid": [0.30],
    }
    return generate_dataset(out, 80, 5, cfg)
