"""Pure-numpy transport kernels (fallback for the compiled extension).

The triple-bounce integral factorizes into two stages sharing the object
surface samples:

* stage 1 gathers emitter -> wall-patch -> object-sample throughput into a
  per-sample histogram over the partial path length;
* stage 2 scatters each sample's histogram into every pixel, shifted by the
  object -> wall-hit -> sensor return path and weighted by the last two
  bounce factors.

Binning the two partial paths separately costs at most one bin (1 cm of
path) versus binning the exact total, and makes the hot loop tractable.
"""

from __future__ import annotations

import numpy as np

BACKEND = "numpy"

_EPS = 1e-9


def _segment_visible(p, q, occ):
    """1.0 where the open segment p -> q misses the occluder rectangle.

    ``p`` and ``q`` broadcast against each other over leading axes.
    """
    center, normal, u_axis, v_axis, half_u, half_v = occ
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    seg = q - p
    denom = seg @ normal
    num = (center - p) @ normal
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(np.abs(denom) > _EPS, num / np.where(denom == 0, 1.0, denom), -1.0)
    crossing = (t > _EPS) & (t < 1.0 - _EPS)
    hit = p + t[..., None] * seg
    rel = hit - center
    inside = (np.abs(rel @ u_axis) <= half_u) & (np.abs(rel @ v_axis) <= half_v)
    return np.where(crossing & inside, 0.0, 1.0)


def _phong(cos_r, kd, ks, exponent):
    if ks == 0.0:
        return np.full_like(cos_r, kd)
    return kd + ks * np.clip(cos_r, 0.0, None) ** exponent


def stage1_gather(
    obj_pts,
    obj_nrm,
    emitter,
    patch_pts,
    patch_area,
    wall_normal,
    kd,
    ks,
    exponent,
    power,
    occ,
    bin_size_m,
    n_bins,
):
    """Histogram of energy arriving at each object sample.

    Returns ``I`` of shape (n_samples, n_bins), binned over the partial
    path emitter -> patch -> sample.
    """
    obj_pts = np.asarray(obj_pts, dtype=np.float64)
    obj_nrm = np.asarray(obj_nrm, dtype=np.float64)
    emitter = np.asarray(emitter, dtype=np.float64)
    patch_pts = np.asarray(patch_pts, dtype=np.float64)
    wall_normal = np.asarray(wall_normal, dtype=np.float64)

    # emitter -> patch leg
    v_eu = patch_pts - emitter
    d_eu = np.linalg.norm(v_eu, axis=1)
    dir_eu = v_eu / d_eu[:, None]
    cos_u_in = np.clip(-(dir_eu @ wall_normal), 0.0, None)
    vis_eu = _segment_visible(emitter, patch_pts, occ)
    irr_u = power / (4.0 * np.pi * d_eu**2) * cos_u_in * vis_eu

    # mirror direction of the incoming light at each patch
    w_in = -dir_eu
    refl_u = 2.0 * (w_in @ wall_normal)[:, None] * wall_normal - w_in

    # patch -> sample leg, all pairs (P, K)
    v_uo = obj_pts[None, :, :] - patch_pts[:, None, :]
    d_uo = np.linalg.norm(v_uo, axis=2)
    dir_uo = v_uo / d_uo[:, :, None]
    cos_u_out = np.clip(np.einsum("pkj,j->pk", dir_uo, wall_normal), 0.0, None)
    cos_o_in = np.clip(-np.einsum("pkj,kj->pk", dir_uo, obj_nrm), 0.0, None)
    cos_r = np.einsum("pkj,pj->pk", dir_uo, refl_u)
    f_wall = _phong(cos_r, kd, ks, exponent)
    vis_uo = _segment_visible(patch_pts[:, None, :], obj_pts[None, :, :], occ)

    energy = (
        irr_u[:, None] * f_wall * patch_area * cos_u_out * cos_o_in / d_uo**2 * vis_uo
    )
    bins = ((d_eu[:, None] + d_uo) / bin_size_m).astype(np.intp)
    valid = bins < n_bins
    n_samples = obj_pts.shape[0]
    flat = np.where(valid, np.arange(n_samples)[None, :] * n_bins + bins, 0)
    out = np.bincount(
        flat.ravel(), weights=(energy * valid).ravel(), minlength=n_samples * n_bins
    )
    return out.reshape(n_samples, n_bins)


def stage2_scatter(
    sample_hist,
    obj_pts,
    obj_nrm,
    obj_area,
    obj_albedo,
    wall_pts,
    wall_dist,
    cam,
    wall_normal,
    kd,
    ks,
    exponent,
    occ,
    bin_size_m,
    n_bins,
    chunk=4096,
):
    """Scatter per-sample histograms into per-pixel transients.

    ``wall_pts``/``wall_dist`` hold the front-wall hit point and hit
    distance of each contributing pixel.  Returns (n_pixels, n_bins).
    """
    sample_hist = np.asarray(sample_hist, dtype=np.float64)
    obj_pts = np.asarray(obj_pts, dtype=np.float64)
    obj_nrm = np.asarray(obj_nrm, dtype=np.float64)
    obj_area = np.asarray(obj_area, dtype=np.float64)
    wall_pts = np.asarray(wall_pts, dtype=np.float64)
    wall_dist = np.asarray(wall_dist, dtype=np.float64)
    cam = np.asarray(cam, dtype=np.float64)
    wall_normal = np.asarray(wall_normal, dtype=np.float64)

    n_q = wall_pts.shape[0]
    n_k = obj_pts.shape[0]
    out = np.zeros((n_q, n_bins))
    supports = [np.flatnonzero(sample_hist[k]) for k in range(n_k)]

    for lo in range(0, n_q, chunk):
        hi = min(lo + chunk, n_q)
        w = wall_pts[lo:hi]
        tq = wall_dist[lo:hi]
        v_ow = w[:, None, :] - obj_pts[None, :, :]
        d_ow = np.linalg.norm(v_ow, axis=2)
        dir_ow = v_ow / d_ow[:, :, None]
        cos_o_out = np.clip(np.einsum("qkj,kj->qk", dir_ow, obj_nrm), 0.0, None)
        cos_w_in = np.clip(-np.einsum("qkj,j->qk", dir_ow, wall_normal), 0.0, None)
        w_in = -dir_ow
        dir_ws = cam - w
        dir_ws /= np.linalg.norm(dir_ws, axis=1, keepdims=True)
        refl = 2.0 * np.einsum("qkj,j->qk", w_in, wall_normal)[:, :, None] * wall_normal - w_in
        cos_r = np.einsum("qkj,qj->qk", refl, dir_ws)
        f_wall = _phong(cos_r, kd, ks, exponent)
        vis = _segment_visible(obj_pts[None, :, :], w[:, None, :], occ)
        scale = (
            (obj_albedo / np.pi)
            * cos_o_out
            * obj_area[None, :]
            * cos_w_in
            / d_ow**2
            * f_wall
            * vis
        )
        shift = ((d_ow + tq[:, None]) / bin_size_m).astype(np.intp)

        block = out[lo:hi]
        for k in range(n_k):
            sup = supports[k]
            if sup.size == 0:
                continue
            vals = sample_hist[k, sup]
            sc = scale[:, k]
            active = np.flatnonzero(sc > 0)
            if active.size == 0:
                continue
            sh = shift[active, k]
            for s in np.unique(sh):
                rows = active[sh == s]
                cols = s + sup
                cols = cols[cols < n_bins]
                block[np.ix_(rows, cols)] += np.outer(sc[rows], vals[: cols.size])
    return out
