"""Shared fixtures: light render configs and a small on-disk dataset."""

import pytest

from night.dataset import GenerateConfig, generate_dataset
from night.render import RenderConfig


@pytest.fixture(scope="session")
def light_render_cfg():
    """Cheap quadrature for tests that only need plausible transients."""
    return RenderConfig(wall_patches=(16, 8), object_samples=64)


@pytest.fixture(scope="session")
def tiny_gen_cfg(light_render_cfg):
    return GenerateConfig(width=32, height=24, render=light_render_cfg)


@pytest.fixture(scope="session")
def tiny_dataset(tmp_path_factory, tiny_gen_cfg):
    """A 5-scene dataset on disk; returns (root_dir, manifest)."""
    out = tmp_path_factory.mktemp("dataset")
    manifest = generate_dataset(5, 1234, out, tiny_gen_cfg)
    return out, manifest
