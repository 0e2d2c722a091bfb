"""Deterministic desk-scale transient rendering of corner scenes.

Three render modes:

* :func:`render_transient_nlos` -- the physical scene: per-pixel direct wall
  return plus the emitter -> wall -> object -> wall -> sensor triple bounce,
  integrated by fixed quadrature over wall patches and object surface
  samples (no Monte Carlo, bit-reproducible);
* :func:`render_transient_mirrorwall` -- the same scene with an ideal-mirror
  front wall, where the triple bounce collapses to one specular reflection
  per pixel;
* :func:`render_los_gt` -- ground truth for a mirrored scene: depth,
  object mask and the 20 MHz phasor of the now-visible object.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from night import tof
from night.render import kernels
from night.render._transport_py import _segment_visible
from night.render.brdf import brdf_terms
from night.scene import (
    SceneDescription,
    WallRect,
    camera_ray_grid,
    intersect_objects,
    reflect_direction,
    scene_surface_samples,
)


@dataclass(frozen=True)
class RenderConfig:
    """Quadrature resolutions and emitter power for the NLoS render."""

    wall_patches: tuple = (64, 32)
    object_samples: int = 256
    emitter_power: float = 1.0
    n_bins: int = tof.DEFAULT_N_BINS
    bin_size_m: float = tof.DEFAULT_BIN_SIZE_M

    def __post_init__(self):
        if min(self.wall_patches) < 1 or self.object_samples < 1:
            raise ValueError("quadrature resolutions must be >= 1")


@dataclass(frozen=True)
class TransientImage:
    """Per-pixel transient histograms, shaped (height, width, n_bins)."""

    bins: np.ndarray
    bin_size_m: float = tof.DEFAULT_BIN_SIZE_M

    @property
    def height(self) -> int:
        return self.bins.shape[0]

    @property
    def width(self) -> int:
        return self.bins.shape[1]

    @property
    def n_bins(self) -> int:
        return self.bins.shape[2]

    def to_phasor_image(self, freq_hz: float) -> np.ndarray:
        return tof.itof_from_transient(self.bins, freq_hz, self.bin_size_m)


def _occ_params(wall: WallRect):
    return (wall.center, wall.normal, wall.u_axis, wall.v_axis, wall.half_u, wall.half_v)


def _wall_patch_grid(wall: WallRect, shape):
    m, n = shape
    u = (2.0 * (np.arange(m) + 0.5) / m - 1.0) * wall.half_u
    v = (2.0 * (np.arange(n) + 0.5) / n - 1.0) * wall.half_v
    uu, vv = np.meshgrid(u, v, indexing="ij")
    pts = wall.center + uu[..., None] * wall.u_axis + vv[..., None] * wall.v_axis
    area = (2.0 * wall.half_u / m) * (2.0 * wall.half_v / n)
    return pts.reshape(-1, 3), area


def _intersect_rect_grid(wall: WallRect, origin, dirs):
    """Vectorized rectangle intersection over a (h, w, 3) direction grid."""
    denom = dirs @ wall.normal
    with np.errstate(divide="ignore", invalid="ignore"):
        t = ((wall.center - origin) @ wall.normal) / denom
    hit = origin + t[..., None] * dirs
    rel = hit - wall.center
    ok = (
        (np.abs(denom) > 1e-12)
        & (t > 1e-9)
        & (np.abs(rel @ wall.u_axis) <= wall.half_u)
        & (np.abs(rel @ wall.v_axis) <= wall.half_v)
    )
    return np.where(ok, t, np.inf)


def check_nlos_condition(scene: SceneDescription, n_samples: int = 64) -> bool:
    """True when no camera-to-object-surface segment clears the occluder."""
    pts, _, _ = scene_surface_samples(scene, n_samples)
    vis = _segment_visible(scene.camera.position, pts, _occ_params(scene.middle_wall))
    return not np.any(vis > 0)


def _direct_term(scene, dirs, bins_out, cfg):
    """Single-bounce wall return for every pixel with a wall hit.

    Returns the per-pixel wall-hit distances for the front wall (inf where
    the pixel sees the middle wall or nothing).
    """
    cam = scene.camera.position
    t_front = _intersect_rect_grid(scene.front_wall, cam, dirs)
    t_middle = _intersect_rect_grid(scene.middle_wall, cam, dirs)
    for wall, t, t_other in (
        (scene.front_wall, t_front, t_middle),
        (scene.middle_wall, t_middle, t_front),
    ):
        sel = np.isfinite(t) & (t < t_other)
        if not np.any(sel):
            continue
        kd, ks, e = brdf_terms(wall.material)
        cos_in = np.clip(-(dirs[sel] @ wall.normal), 0.0, None)
        cos_r = 2.0 * cos_in**2 - 1.0
        f = kd + (ks * np.clip(cos_r, 0.0, None) ** e if ks else 0.0)
        ts = t[sel]
        energy = cfg.emitter_power / (4.0 * np.pi * ts**2) * cos_in * f
        b = (2.0 * ts / cfg.bin_size_m).astype(np.intp)
        valid = b < cfg.n_bins
        rows = np.flatnonzero(sel.ravel())[valid]
        flat = bins_out.reshape(-1, cfg.n_bins)
        np.add.at(flat, (rows, b[valid]), energy[valid])
    front_visible = np.isfinite(t_front) & (t_front < t_middle)
    return np.where(front_visible, t_front, np.inf)


def render_transient_nlos(scene: SceneDescription, cfg: RenderConfig = RenderConfig()) -> TransientImage:
    """Transient render of the physical corner scene.

    Rejects scenes where any object surface point is directly visible from
    the camera (the setup is only meaningful behind the occluder).
    """
    if scene.front_wall is None:
        raise ValueError("NLoS render needs a front wall")
    if scene.front_wall.material.ideal_specular:
        raise ValueError("use render_transient_mirrorwall for ideal mirror walls")
    if not check_nlos_condition(scene):
        raise ValueError("scene violates the NLoS condition: object directly visible")

    intr = scene.camera.intrinsics
    h, w = intr.height, intr.width
    dirs = camera_ray_grid(scene.camera)
    out = np.zeros((h, w, cfg.n_bins))
    t_front = _direct_term(scene, dirs, out, cfg)

    if scene.objects:
        cam = scene.camera.position
        occ = _occ_params(scene.middle_wall)
        obj_pts, obj_nrm, obj_area = scene_surface_samples(scene, cfg.object_samples)
        patch_pts, patch_area = _wall_patch_grid(scene.front_wall, cfg.wall_patches)
        kd, ks, e = brdf_terms(scene.front_wall.material)
        hist = kernels.stage1_gather(
            obj_pts,
            obj_nrm,
            cam,
            patch_pts,
            patch_area,
            scene.front_wall.normal,
            kd,
            ks,
            e,
            cfg.emitter_power,
            occ,
            cfg.bin_size_m,
            cfg.n_bins,
        )
        sel = np.isfinite(t_front)
        if np.any(sel):
            tq = t_front[sel]
            wall_pts = cam + tq[:, None] * dirs[sel]
            pix = kernels.stage2_scatter(
                hist,
                obj_pts,
                obj_nrm,
                obj_area,
                scene.object_material.albedo,
                wall_pts,
                tq,
                cam,
                scene.front_wall.normal,
                kd,
                ks,
                e,
                occ,
                cfg.bin_size_m,
                cfg.n_bins,
            )
            flat = out.reshape(-1, cfg.n_bins)
            flat[np.flatnonzero(sel.ravel())] += pix
    return TransientImage(bins=out, bin_size_m=cfg.bin_size_m)


def render_transient_mirrorwall(scene: SceneDescription, cfg: RenderConfig = RenderConfig()) -> TransientImage:
    """Transient render with an ideal-mirror front wall.

    Each pixel ray reflects specularly off the wall and intersects the
    hidden objects; the direct wall term is omitted in this mode.
    """
    if scene.front_wall is None or not scene.front_wall.material.ideal_specular:
        raise ValueError("mirror-wall render needs an ideal specular front wall")
    intr = scene.camera.intrinsics
    h, w = intr.height, intr.width
    dirs = camera_ray_grid(scene.camera)
    cam = scene.camera.position
    wall = scene.front_wall
    t_wall = _intersect_rect_grid(wall, cam, dirs)
    out = np.zeros((h, w, cfg.n_bins))
    for py in range(h):
        for px in range(w):
            t1 = t_wall[py, px]
            if not math.isfinite(t1):
                continue
            d = dirs[py, px]
            origin = cam + t1 * d
            d_ref = reflect_direction(d, wall.normal)
            hit = intersect_objects(scene, origin, d_ref)
            if hit is None:
                continue
            t2, n, _ = hit
            total = t1 + t2
            b = int(2.0 * total / cfg.bin_size_m)
            if b >= cfg.n_bins:
                continue
            cos_o = max(0.0, float(-(n @ d_ref)))
            out[py, px, b] += scene.object_material.albedo / np.pi * cos_o / total**2
    return TransientImage(bins=out, bin_size_m=cfg.bin_size_m)


def render_los_gt(scene_mirrored: SceneDescription, freq_hz: float = tof.DEFAULT_FREQUENCIES_HZ[0]):
    """Depth map, object mask and phasor image of a mirrored (LoS) scene.

    Expects the output of :func:`night.scene.mirror_transform` (no front
    wall).  Misses map to depth 0, background mask and the zero phasor.
    """
    if scene_mirrored.front_wall is not None:
        raise ValueError("LoS ground truth expects a mirrored scene without a front wall")
    intr = scene_mirrored.camera.intrinsics
    h, w = intr.height, intr.width
    dirs = camera_ray_grid(scene_mirrored.camera)
    cam = scene_mirrored.camera.position
    depth = np.zeros((h, w))
    mask = np.zeros((h, w), dtype=bool)
    phasor = np.zeros((h, w), dtype=np.complex128)
    albedo = scene_mirrored.object_material.albedo
    for py in range(h):
        for px in range(w):
            d = dirs[py, px]
            hit = intersect_objects(scene_mirrored, cam, d)
            if hit is None:
                continue
            t, n, _ = hit
            cos_o = max(0.0, float(-(n @ d)))
            amp = albedo / np.pi * cos_o / t**2
            depth[py, px] = t
            mask[py, px] = True
            phasor[py, px] = amp * np.exp(1j * tof.phase_from_depth(t, freq_hz))
    return depth, mask, phasor


def first_return_depth(img: TransientImage) -> np.ndarray:
    """Per-pixel depth from the earliest nonzero transient bin (bin center)."""
    bins = img.bins
    nz = bins > 0
    first = np.argmax(nz, axis=2)
    any_hit = np.any(nz, axis=2)
    path = (first + 0.5) * img.bin_size_m
    return np.where(any_hit, path / 2.0, 0.0)
