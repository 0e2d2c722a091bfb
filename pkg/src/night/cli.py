"""``night`` command line front end.

Subcommands: generate, render, preprocess, eval, baseline,
export-pointcloud, plot.  Exit codes: 0 success, 2 bad config/usage,
3 I/O failure, 4 validation failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np
from PIL import Image

from night import dataset as ds
from night import metrics, tof
from night.render import RenderConfig
from night.sampleio import SampleFormatError, SampleRecord, parse_sample, write_sample
from night.scene import load_scene

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_VALIDATION = 4


def _load_generate_config(path) -> ds.GenerateConfig:
    doc = {}
    if path is not None:
        with open(path) as f:
            doc = json.load(f)
    render_keys = {"wall_patches", "object_samples", "emitter_power", "n_bins", "bin_size_m"}
    render_doc = {k: doc.pop(k) for k in list(doc) if k in render_keys}
    if "wall_patches" in render_doc:
        render_doc["wall_patches"] = tuple(render_doc["wall_patches"])
    if "frequencies_hz" in doc:
        doc["frequencies_hz"] = tuple(doc["frequencies_hz"])
    if "roughness_grid" in doc:
        doc["roughness_grid"] = tuple(doc["roughness_grid"])
    return ds.GenerateConfig(render=RenderConfig(**render_doc), **doc)


def _cmd_generate(args) -> int:
    cfg = _load_generate_config(args.config)
    manifest = ds.generate_dataset(args.n_scenes, args.seed, args.out, cfg)
    print(f"wrote {len(manifest.samples)} samples to {args.out}")
    return EXIT_OK


def _cmd_render(args) -> int:
    scene = load_scene(args.scene)
    cfg = _load_generate_config(args.config)
    cfg = ds.GenerateConfig(
        width=scene.camera.intrinsics.width,
        height=scene.camera.intrinsics.height,
        frequencies_hz=cfg.frequencies_hz,
        render=cfg.render,
    )
    record = ds.render_sample(scene, args.id, cfg)
    write_sample(record, args.out)
    print(f"wrote sample {args.id} to {args.out}")
    return EXIT_OK


def _cmd_preprocess(args) -> int:
    manifest = ds.load_manifest(args.manifest)
    root = Path(args.manifest).parent
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for entry in manifest.samples:
        record = parse_sample(root / entry.file)
        x = ds.preprocess(record, manifest.normalization_k)
        np.save(out_dir / f"{entry.id}.npy", x)
    print(f"preprocessed {len(manifest.samples)} samples into {out_dir}")
    return EXIT_OK


def _load_predictions(pred_dir, manifest) -> dict:
    preds = {}
    for entry in manifest.samples:
        path = Path(pred_dir) / f"{entry.id}.nlos"
        if not path.exists():
            raise KeyError(f"missing prediction for sample {entry.id}: {path}")
        preds[entry.id] = parse_sample(path).gt_phasor.astype(np.complex128)
    return preds


def _cmd_eval(args) -> int:
    manifest = ds.load_manifest(args.gt)
    root = Path(args.gt).parent
    entries = manifest.entries(args.split)
    records = {e.id: parse_sample(root / e.file) for e in entries}
    sub = ds.DatasetManifest(**{**manifest.__dict__, "samples": entries})
    preds = _load_predictions(args.pred, sub)
    report = metrics.evaluate_dataset(preds, records)
    metrics.save_report(report, args.report)
    print(
        f"evaluated {len(entries)} samples: "
        f"mIoU {report['miou']['mean']:.3f}, MAE {report['mae']['mean']:.2f} cm"
    )
    return EXIT_OK


def _cmd_baseline(args) -> int:
    manifest = ds.load_manifest(args.manifest)
    root = Path(args.manifest).parent
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for entry in manifest.samples:
        record = parse_sample(root / entry.file)
        pred = SampleRecord(
            id=record.id,
            frequencies_hz=record.frequencies_hz,
            input_phasors=record.input_phasors,
            gt_phasor=record.input_phasors[0],
            gt_depth=np.zeros_like(record.gt_depth),
            gt_mask=np.zeros_like(record.gt_mask),
            meta={"baseline": "naive_depth"},
        )
        write_sample(pred, out_dir / f"{entry.id}.nlos")
    print(f"wrote {len(manifest.samples)} baseline predictions to {out_dir}")
    return EXIT_OK


def _cmd_export_pointcloud(args) -> int:
    record = parse_sample(args.sample)
    depth = record.gt_depth.astype(np.float64)
    h, w = depth.shape
    tan_h = math.tan(math.radians(args.hfov_deg) / 2.0)
    tan_v = tan_h * h / w
    u = (2.0 * (np.arange(w) + 0.5) / w - 1.0) * tan_h
    v = (1.0 - 2.0 * (np.arange(h) + 0.5) / h) * tan_v
    uu, vv = np.meshgrid(u, v)
    dirs = np.stack([uu, vv, np.ones_like(uu)], axis=-1)
    dirs /= np.linalg.norm(dirs, axis=-1, keepdims=True)
    pts = dirs * depth[..., None]
    pts = pts[depth > 0]
    with open(args.out, "w") as f:
        for x, y, z in pts:
            f.write(f"{x:.6f} {y:.6f} {z:.6f}\n")
    print(f"wrote {len(pts)} points to {args.out}")
    return EXIT_OK


def _save_png16(plane: np.ndarray, path) -> float:
    lo, hi = float(plane.min()), float(plane.max())
    scale = (hi - lo) or 1.0
    img = ((plane - lo) / scale * 65535.0).astype(np.uint16)
    Image.fromarray(img).save(path)
    return scale


def _cmd_plot(args) -> int:
    record = parse_sample(args.sample)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    scales = {}
    planes = {
        "gt_depth": record.gt_depth.astype(np.float64),
        "gt_mask": record.gt_mask.astype(np.float64),
        "gt_real": record.gt_phasor.real.astype(np.float64),
        "gt_imag": record.gt_phasor.imag.astype(np.float64),
    }
    for i, f in enumerate(record.frequencies_hz):
        mhz = int(round(f / 1e6))
        planes[f"input_real_{mhz}mhz"] = record.input_phasors[i].real.astype(np.float64)
        planes[f"input_imag_{mhz}mhz"] = record.input_phasors[i].imag.astype(np.float64)
    for name, plane in planes.items():
        scales[name] = {
            "scale": _save_png16(plane, out_dir / f"{record.id}_{name}.png"),
            "offset": float(plane.min()),
        }
    with open(out_dir / f"{record.id}_scales.json", "w") as f:
        json.dump(scales, f, indent=2)
    print(f"wrote {len(planes)} plots to {out_dir}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="night", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate a dataset")
    g.add_argument("--config", default=None, help="generation config JSON")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--out", required=True)
    g.add_argument("--n-scenes", type=int, default=140)
    g.set_defaults(func=_cmd_generate)

    r = sub.add_parser("render", help="render one scene file into a sample")
    r.add_argument("--scene", required=True)
    r.add_argument("--out", required=True)
    r.add_argument("--config", default=None)
    r.add_argument("--id", default="scene")
    r.set_defaults(func=_cmd_render)

    pp = sub.add_parser("preprocess", help="samples -> 7-channel network inputs")
    pp.add_argument("--manifest", required=True)
    pp.add_argument("--out", required=True)
    pp.set_defaults(func=_cmd_preprocess)

    e = sub.add_parser("eval", help="evaluate predictions against ground truth")
    e.add_argument("--pred", required=True)
    e.add_argument("--gt", required=True, help="ground-truth manifest JSON")
    e.add_argument("--report", required=True)
    e.add_argument("--split", default=None)
    e.set_defaults(func=_cmd_eval)

    b = sub.add_parser("baseline", help="naive single-frequency baseline predictions")
    b.add_argument("--manifest", required=True)
    b.add_argument("--out", required=True)
    b.set_defaults(func=_cmd_baseline)

    pc = sub.add_parser("export-pointcloud", help="depth map -> ASCII point list")
    pc.add_argument("--sample", required=True)
    pc.add_argument("--out", required=True)
    pc.add_argument("--hfov-deg", type=float, default=60.0)
    pc.set_defaults(func=_cmd_export_pointcloud)

    pl = sub.add_parser("plot", help="sample planes -> 16-bit grayscale PNGs")
    pl.add_argument("--sample", required=True)
    pl.add_argument("--out", required=True)
    pl.set_defaults(func=_cmd_plot)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except json.JSONDecodeError as exc:
        print(f"night: bad config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TypeError as exc:
        print(f"night: bad config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, SampleFormatError) as exc:
        print(f"night: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, KeyError) as exc:
        print(f"night: validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
