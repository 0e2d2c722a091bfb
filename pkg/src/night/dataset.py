"""End-to-end dataset generation, preprocessing, augmentation and splitting.

One sample = iToF phasor images of a corner scene at {20, 50, 60} MHz plus
the mirror-trick ground truth (20 MHz phasor, depth map and object mask of
the mirrored scene).  Everything is a pure function of the master seed and
the configuration.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np
from scipy import ndimage

from night import tof
from night.render import RenderConfig, render_los_gt, render_transient_nlos
from night.sampleio import SampleRecord, parse_sample, write_sample
from night.scene import ROUGHNESS_GRID, SceneDescription, mirror_transform, sample_scene

MANIFEST_VERSION = 1

# Pose quantization grid for the train/test disjointness audit.
POSE_POSITION_QUANTUM_M = 0.01
POSE_ROTATION_QUANTUM_DEG = 1.0


@dataclass(frozen=True)
class GenerateConfig:
    width: int = 64
    height: int = 48
    frequencies_hz: tuple = tof.DEFAULT_FREQUENCIES_HZ
    render: RenderConfig = RenderConfig()
    train_ratio: float = 0.8
    amplitude_percentile: float = 99.9
    # Restrict the wall roughness drawn per scene (full grid by default);
    # lets one generate the per-roughness dataset slices used in ablations.
    roughness_grid: tuple = ROUGHNESS_GRID

    def __post_init__(self):
        if not 0.0 < self.train_ratio < 1.0:
            raise ValueError("train_ratio must lie in (0, 1)")


@dataclass(frozen=True)
class AugmentParams:
    """Geometric + noise augmentation; ranges follow the training recipe."""

    rotation_deg: float = 0.0
    translation_px: tuple = (0.0, 0.0)
    flip_h: bool = False
    flip_v: bool = False
    noise_sigma: float = 0.0

    def __post_init__(self):
        if not -180.0 <= self.rotation_deg <= 180.0:
            raise ValueError("rotation must lie in [-180, 180] degrees")


def scene_seed(master_seed: int, index: int) -> int:
    """Stable per-scene seed derived from the master seed."""
    return int(np.random.SeedSequence([master_seed, index]).generate_state(1)[0])


def render_sample(scene: SceneDescription, sample_id: str, cfg: GenerateConfig) -> SampleRecord:
    """Render one scene into a full SampleRecord."""
    transient = render_transient_nlos(scene, cfg.render)
    inputs = np.stack(
        [transient.to_phasor_image(f) for f in cfg.frequencies_hz]
    ).astype(np.complex64)
    mirrored = mirror_transform(scene)
    depth, mask, phasor = render_los_gt(mirrored, cfg.frequencies_hz[0])
    meta = {
        "seed": scene.seed,
        "roughness": scene.wall_roughness,
        "objects": [
            {
                "kind": p.kind,
                "position": [round(v, 9) for v in p.position.tolist()],
                "rotation_deg": [round(v, 9) for v in p.rotation_deg.tolist()],
                "size": list(p.size),
            }
            for p in scene.objects
        ],
    }
    return SampleRecord(
        id=sample_id,
        frequencies_hz=cfg.frequencies_hz,
        input_phasors=inputs,
        gt_phasor=phasor.astype(np.complex64),
        gt_depth=depth.astype(np.float32),
        gt_mask=mask,
        meta=meta,
    )


# ---------------------------------------------------------------------------
# Manifest
# ---------------------------------------------------------------------------


@dataclass
class ManifestEntry:
    id: str
    file: str
    split: str
    meta: dict


@dataclass
class DatasetManifest:
    frequencies_hz: tuple
    width: int
    height: int
    bin_size_m: float
    n_bins: int
    normalization_k: float
    master_seed: int
    samples: list
    format_version: int = MANIFEST_VERSION

    def entries(self, split: str | None = None):
        return [e for e in self.samples if split is None or e.split == split]

    def to_json(self) -> dict:
        return {
            "format_version": self.format_version,
            "frequencies_hz": list(self.frequencies_hz),
            "width": self.width,
            "height": self.height,
            "bin_size_m": self.bin_size_m,
            "n_bins": self.n_bins,
            "normalization_k": self.normalization_k,
            "master_seed": self.master_seed,
            "samples": [asdict(e) for e in self.samples],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "DatasetManifest":
        if doc.get("format_version") != MANIFEST_VERSION:
            raise ValueError(f"unsupported manifest version {doc.get('format_version')}")
        return cls(
            frequencies_hz=tuple(doc["frequencies_hz"]),
            width=doc["width"],
            height=doc["height"],
            bin_size_m=doc["bin_size_m"],
            n_bins=doc["n_bins"],
            normalization_k=doc["normalization_k"],
            master_seed=doc["master_seed"],
            samples=[ManifestEntry(**e) for e in doc["samples"]],
        )


def save_manifest(manifest: DatasetManifest, path) -> None:
    with open(path, "w") as f:
        json.dump(manifest.to_json(), f, indent=2, sort_keys=True)


def load_manifest(path) -> DatasetManifest:
    with open(path) as f:
        return DatasetManifest.from_json(json.load(f))


# ---------------------------------------------------------------------------
# Split
# ---------------------------------------------------------------------------


def _pose_keys(meta: dict):
    keys = set()
    for obj in meta["objects"]:
        pos = tuple(round(v / POSE_POSITION_QUANTUM_M) for v in obj["position"])
        rot = tuple(round(v / POSE_ROTATION_QUANTUM_DEG) for v in obj["rotation_deg"])
        keys.add((obj["kind"], pos, rot))
    return keys


def split_dataset(entries: list, ratio: float):
    """Assign scene entries to train/test; audits pose disjointness.

    Returns ``(train, test)`` lists of entries with their split field set.
    Raises when any (object kind, quantized pose) tuple would land in both
    splits.
    """
    if not 0.0 < ratio < 1.0:
        raise ValueError("split ratio must lie in (0, 1)")
    n_train = int(len(entries) * ratio)
    train, test = entries[:n_train], entries[n_train:]
    train_keys = set().union(*(_pose_keys(e.meta) for e in train)) if train else set()
    test_keys = set().union(*(_pose_keys(e.meta) for e in test)) if test else set()
    collisions = train_keys & test_keys
    if collisions:
        raise ValueError(f"train/test pose collision: {sorted(collisions)[:3]}")
    for e in train:
        e.split = "train"
    for e in test:
        e.split = "test"
    return train, test


# ---------------------------------------------------------------------------
# Generation
# ---------------------------------------------------------------------------


def generate_dataset(n_scenes: int, master_seed: int, out_dir, cfg: GenerateConfig = GenerateConfig()) -> DatasetManifest:
    """Generate scenes, render samples, split and write the manifest.

    Deterministic in (n_scenes, master_seed, cfg); files land in
    ``out_dir/samples`` with the manifest at ``out_dir/manifest.json``.
    """
    if n_scenes < 1:
        raise ValueError("n_scenes must be >= 1")
    out_dir = Path(out_dir)
    samples_dir = out_dir / "samples"
    samples_dir.mkdir(parents=True, exist_ok=True)

    records = []
    entries = []
    for i in range(n_scenes):
        seed = scene_seed(master_seed, i)
        scene = sample_scene(seed, cfg.width, cfg.height, cfg.roughness_grid)
        sample_id = f"scene_{i:05d}"
        try:
            record = render_sample(scene, sample_id, cfg)
        except OSError as exc:
            raise OSError(f"failed to render sample {sample_id}: {exc}") from exc
        records.append(record)
        entries.append(
            ManifestEntry(id=sample_id, file=f"samples/{sample_id}.nlos", split="", meta=record.meta)
        )

    split_dataset(entries, cfg.train_ratio)
    for record, entry in zip(records, entries):
        record.meta = dict(record.meta, split=entry.split)
        entry.meta = record.meta
        try:
            write_sample(record, out_dir / entry.file)
        except OSError as exc:
            raise OSError(f"failed to write sample {entry.id}: {exc}") from exc

    train_amp = [
        np.abs(r.input_phasors[0]) for r, e in zip(records, entries) if e.split == "train"
    ]
    k = float(np.percentile(np.concatenate([a.ravel() for a in train_amp]), cfg.amplitude_percentile))
    if k <= 0:
        k = 1.0

    manifest = DatasetManifest(
        frequencies_hz=cfg.frequencies_hz,
        width=cfg.width,
        height=cfg.height,
        bin_size_m=cfg.render.bin_size_m,
        n_bins=cfg.render.n_bins,
        normalization_k=k,
        master_seed=master_seed,
        samples=entries,
    )
    save_manifest(manifest, out_dir / "manifest.json")
    return manifest


def load_record(manifest_dir, entry: ManifestEntry) -> SampleRecord:
    return parse_sample(Path(manifest_dir) / entry.file)


# ---------------------------------------------------------------------------
# Preprocessing (7-channel network input)
# ---------------------------------------------------------------------------


def preprocess(record: SampleRecord, k: float) -> np.ndarray:
    """7-channel network input, float32 (7, h, w).

    Channels: [A20/K, Re20/A20, Re50/A20, Re60/A20, Im20/A20, Im50/A20,
    Im60/A20]; pixels with zero 20 MHz amplitude carry all-zero channels.
    """
    if k <= 0:
        raise ValueError("normalization constant must be positive")
    phasors = record.input_phasors.astype(np.complex128)
    a20 = np.abs(phasors[0])
    safe = np.where(a20 > 0, a20, 1.0)
    out = np.empty((7,) + a20.shape, dtype=np.float64)
    out[0] = a20 / k
    out[1:4] = phasors.real / safe
    out[4:7] = phasors.imag / safe
    out[:, a20 == 0] = 0.0
    return out.astype(np.float32)


# ---------------------------------------------------------------------------
# Augmentation
# ---------------------------------------------------------------------------


def _affine_matrices(params: AugmentParams, shape):
    """Inverse-map matrix and offset for scipy affine_transform (row, col)."""
    h, w = shape
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    th = math.radians(params.rotation_deg)
    # forward map on (x, y) with y pointing down: translate(rotate(flip(p - c))) + c
    rot = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
    flip = np.diag([-1.0 if params.flip_h else 1.0, -1.0 if params.flip_v else 1.0])
    fwd = rot @ flip
    # snap near-integer entries so right-angle rotations map the pixel grid
    # onto itself exactly instead of leaking interpolation at the borders
    snapped = np.round(fwd)
    fwd = np.where(np.abs(fwd - snapped) < 1e-12, snapped, fwd)
    inv = np.linalg.inv(fwd)
    tx, ty = params.translation_px
    # in (row, col) = (y, x) order for ndimage
    inv_rc = np.array([[inv[1, 1], inv[1, 0]], [inv[0, 1], inv[0, 0]]])
    center = np.array([cy, cx])
    shift = np.array([ty, tx])
    offset = center - inv_rc @ (center + shift)
    return inv_rc, offset


def _is_identity_geometry(params: AugmentParams) -> bool:
    return (
        params.rotation_deg == 0.0
        and tuple(params.translation_px) == (0.0, 0.0)
        and not params.flip_h
        and not params.flip_v
    )


def _warp(plane: np.ndarray, matrix, offset, order: int) -> np.ndarray:
    return ndimage.affine_transform(
        plane, matrix, offset=offset, order=order, mode="constant", cval=0.0, prefilter=False
    )


def augment(x: np.ndarray, gt: tuple, params: AugmentParams, rng_seed: int):
    """Jointly transform the network input and its ground-truth planes.

    ``gt`` is (gt_phasor, gt_depth, gt_mask).  Continuous planes are
    resampled bilinearly; depth and mask with nearest neighbor so the
    mask == (depth > 0) identity survives.  Gaussian noise (seeded) goes on
    the input channels only.  Identity parameters with zero sigma return
    the inputs bit-exact.
    """
    phasor, depth, mask = gt
    x = np.asarray(x)
    if _is_identity_geometry(params):
        x_out = x.copy()
        phasor_out = np.asarray(phasor).copy()
        depth_out = np.asarray(depth).copy()
        mask_out = np.asarray(mask).copy()
    else:
        matrix, offset = _affine_matrices(params, x.shape[-2:])
        x_out = np.stack([_warp(ch.astype(np.float64), matrix, offset, 1) for ch in x]).astype(x.dtype)
        ph = np.asarray(phasor, dtype=np.complex128)
        phasor_out = (
            _warp(ph.real, matrix, offset, 1) + 1j * _warp(ph.imag, matrix, offset, 1)
        ).astype(phasor.dtype)
        depth_out = _warp(np.asarray(depth, dtype=np.float64), matrix, offset, 0).astype(depth.dtype)
        mask_out = _warp(np.asarray(mask, dtype=np.float64), matrix, offset, 0) > 0.5
    if params.noise_sigma > 0:
        rng = np.random.default_rng(rng_seed)
        x_out = (x_out + rng.normal(0.0, params.noise_sigma, x_out.shape)).astype(x_out.dtype)
    return x_out, (phasor_out, depth_out, mask_out)


def sample_augment_params(rng: np.random.Generator, shape, noise_sigma: float = 0.02) -> AugmentParams:
    """Draw augmentation parameters from the configured ranges."""
    h, w = shape
    return AugmentParams(
        rotation_deg=float(rng.uniform(-180.0, 180.0)),
        translation_px=(
            float(rng.uniform(-0.2 * w, 0.2 * w)),
            float(rng.uniform(-0.2 * h, 0.2 * h)),
        ),
        flip_h=bool(rng.random() < 0.5),
        flip_v=bool(rng.random() < 0.5),
        noise_sigma=noise_sigma,
    )
