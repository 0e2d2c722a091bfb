"""Benchmark the compiled transport kernels against the numpy fallback.

Times stage 1 (emitter -> wall -> object gather) and stage 2 (object ->
wall -> sensor scatter) on a sampled scene for each available backend and
verifies that the outputs agree.

Usage: python3 benchmarks/bench_transport.py [--seed N] [--repeats N]
"""

import argparse
import time

import numpy as np

from night.render import RenderConfig
from night.render.brdf import brdf_terms
from night.render.kernels import available_backends
from night.render.renderer import _occ_params, _wall_patch_grid
from night.scene import sample_scene, scene_surface_samples


def build_inputs(seed, cfg):
    scene = sample_scene(seed, 64, 48)
    obj_pts, obj_nrm, obj_area = scene_surface_samples(scene, cfg.object_samples)
    patch_pts, patch_area = _wall_patch_grid(scene.front_wall, cfg.wall_patches)
    kd, ks, e = brdf_terms(scene.front_wall.material)
    occ = _occ_params(scene.middle_wall)
    cam = scene.camera.position
    rng = np.random.default_rng(seed)
    wall_pts = patch_pts[rng.choice(len(patch_pts), 1024, replace=False)]
    wall_dist = np.linalg.norm(wall_pts - cam, axis=1)
    args1 = (
        obj_pts, obj_nrm, cam, patch_pts, patch_area, scene.front_wall.normal,
        kd, ks, e, 1.0, occ, cfg.bin_size_m, cfg.n_bins,
    )
    args2_tail = (
        obj_pts, obj_nrm, obj_area, 0.8, wall_pts, wall_dist, cam,
        scene.front_wall.normal, kd, ks, e, occ, cfg.bin_size_m, cfg.n_bins,
    )
    return args1, args2_tail


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return out, min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    cfg = RenderConfig(wall_patches=(64, 32), object_samples=256)
    args1, args2_tail = build_inputs(args.seed, cfg)
    backends = available_backends()
    print(f"backends: {', '.join(backends)}")

    hists = {}
    t1 = {}
    for name, mod in backends.items():
        hists[name], t1[name] = best_of(lambda m=mod: m.stage1_gather(*args1), args.repeats)
    ref = next(iter(hists.values()))
    assert all(np.allclose(h, ref, rtol=1e-10, atol=1e-18) for h in hists.values())

    pix = {}
    t2 = {}
    for name, mod in backends.items():
        pix[name], t2[name] = best_of(
            lambda m=mod: m.stage2_scatter(ref, *args2_tail), args.repeats
        )
    ref2 = next(iter(pix.values()))
    assert all(np.allclose(p, ref2, rtol=1e-10, atol=1e-20) for p in pix.values())

    print(f"{'backend':<10} {'stage1 [ms]':>12} {'stage2 [ms]':>12}")
    for name in backends:
        print(f"{name:<10} {t1[name] * 1e3:>12.2f} {t2[name] * 1e3:>12.2f}")
    if "numpy" in backends and "cython" in backends:
        print(
            f"speedup: stage1 {t1['numpy'] / t1['cython']:.1f}x, "
            f"stage2 {t2['numpy'] / t2['cython']:.1f}x"
        )


if __name__ == "__main__":
    main()
