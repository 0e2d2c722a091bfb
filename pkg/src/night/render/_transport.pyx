# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled transport kernels; numerical twin of _transport_py."""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt, pow, M_PI, fabs

BACKEND = "cython"

cdef double _EPS = 1e-9


cdef inline double _dot3(double ax, double ay, double az,
                         double bx, double by, double bz) nogil:
    return ax * bx + ay * by + az * bz


cdef inline bint _segment_visible_c(double px, double py, double pz,
                                    double qx, double qy, double qz,
                                    double[::1] oc, double[::1] on,
                                    double[::1] ou, double[::1] ov,
                                    double half_u, double half_v) nogil:
    cdef double sx = qx - px
    cdef double sy = qy - py
    cdef double sz = qz - pz
    cdef double denom = _dot3(sx, sy, sz, on[0], on[1], on[2])
    if fabs(denom) <= _EPS:
        return True
    cdef double t = _dot3(oc[0] - px, oc[1] - py, oc[2] - pz, on[0], on[1], on[2]) / denom
    if t <= _EPS or t >= 1.0 - _EPS:
        return True
    cdef double hx = px + t * sx - oc[0]
    cdef double hy = py + t * sy - oc[1]
    cdef double hz = pz + t * sz - oc[2]
    if fabs(_dot3(hx, hy, hz, ou[0], ou[1], ou[2])) > half_u:
        return True
    if fabs(_dot3(hx, hy, hz, ov[0], ov[1], ov[2])) > half_v:
        return True
    return False


def stage1_gather(obj_pts, obj_nrm, emitter, patch_pts, double patch_area,
                  wall_normal, double kd, double ks, double exponent,
                  double power, occ, double bin_size_m, int n_bins):
    cdef double[:, ::1] op = np.ascontiguousarray(obj_pts, dtype=np.float64)
    cdef double[:, ::1] onr = np.ascontiguousarray(obj_nrm, dtype=np.float64)
    cdef double[::1] e = np.ascontiguousarray(emitter, dtype=np.float64)
    cdef double[:, ::1] up = np.ascontiguousarray(patch_pts, dtype=np.float64)
    cdef double[::1] nw = np.ascontiguousarray(wall_normal, dtype=np.float64)
    cdef double[::1] oc = np.ascontiguousarray(occ[0], dtype=np.float64)
    cdef double[::1] onorm = np.ascontiguousarray(occ[1], dtype=np.float64)
    cdef double[::1] ou = np.ascontiguousarray(occ[2], dtype=np.float64)
    cdef double[::1] ov = np.ascontiguousarray(occ[3], dtype=np.float64)
    cdef double half_u = occ[4]
    cdef double half_v = occ[5]

    cdef Py_ssize_t n_p = up.shape[0]
    cdef Py_ssize_t n_k = op.shape[0]
    out_arr = np.zeros((n_k, n_bins))
    cdef double[:, ::1] out = out_arr

    cdef Py_ssize_t p, k
    cdef double vx, vy, vz, d_eu, d_uo, inv
    cdef double dir_eu_x, dir_eu_y, dir_eu_z
    cdef double cos_u_in, irr, rux, ruy, ruz, ndw
    cdef double dox, doy, doz, cos_u_out, cos_o_in, cos_r, f_wall, energy
    cdef Py_ssize_t b

    for p in range(n_p):
        vx = up[p, 0] - e[0]
        vy = up[p, 1] - e[1]
        vz = up[p, 2] - e[2]
        d_eu = sqrt(vx * vx + vy * vy + vz * vz)
        inv = 1.0 / d_eu
        dir_eu_x = vx * inv
        dir_eu_y = vy * inv
        dir_eu_z = vz * inv
        cos_u_in = -_dot3(dir_eu_x, dir_eu_y, dir_eu_z, nw[0], nw[1], nw[2])
        if cos_u_in <= 0.0:
            continue
        if not _segment_visible_c(e[0], e[1], e[2], up[p, 0], up[p, 1], up[p, 2],
                                  oc, onorm, ou, ov, half_u, half_v):
            continue
        irr = power / (4.0 * M_PI * d_eu * d_eu) * cos_u_in
        # mirror of the incoming light direction
        ndw = _dot3(-dir_eu_x, -dir_eu_y, -dir_eu_z, nw[0], nw[1], nw[2])
        rux = 2.0 * ndw * nw[0] + dir_eu_x
        ruy = 2.0 * ndw * nw[1] + dir_eu_y
        ruz = 2.0 * ndw * nw[2] + dir_eu_z
        for k in range(n_k):
            vx = op[k, 0] - up[p, 0]
            vy = op[k, 1] - up[p, 1]
            vz = op[k, 2] - up[p, 2]
            d_uo = sqrt(vx * vx + vy * vy + vz * vz)
            inv = 1.0 / d_uo
            dox = vx * inv
            doy = vy * inv
            doz = vz * inv
            cos_u_out = _dot3(dox, doy, doz, nw[0], nw[1], nw[2])
            if cos_u_out <= 0.0:
                continue
            cos_o_in = -_dot3(dox, doy, doz, onr[k, 0], onr[k, 1], onr[k, 2])
            if cos_o_in <= 0.0:
                continue
            if not _segment_visible_c(up[p, 0], up[p, 1], up[p, 2],
                                      op[k, 0], op[k, 1], op[k, 2],
                                      oc, onorm, ou, ov, half_u, half_v):
                continue
            cos_r = _dot3(dox, doy, doz, rux, ruy, ruz)
            if ks != 0.0 and cos_r > 0.0:
                f_wall = kd + ks * pow(cos_r, exponent)
            else:
                f_wall = kd
            energy = irr * f_wall * patch_area * cos_u_out * cos_o_in / (d_uo * d_uo)
            b = <Py_ssize_t>((d_eu + d_uo) / bin_size_m)
            if b < n_bins:
                out[k, b] += energy
    return out_arr


def stage2_scatter(sample_hist, obj_pts, obj_nrm, obj_area, double obj_albedo,
                   wall_pts, wall_dist, cam, wall_normal,
                   double kd, double ks, double exponent,
                   occ, double bin_size_m, int n_bins, chunk=None):
    cdef double[:, ::1] hist = np.ascontiguousarray(sample_hist, dtype=np.float64)
    cdef double[:, ::1] op = np.ascontiguousarray(obj_pts, dtype=np.float64)
    cdef double[:, ::1] onr = np.ascontiguousarray(obj_nrm, dtype=np.float64)
    cdef double[::1] oa = np.ascontiguousarray(obj_area, dtype=np.float64)
    cdef double[:, ::1] wp = np.ascontiguousarray(wall_pts, dtype=np.float64)
    cdef double[::1] wd = np.ascontiguousarray(wall_dist, dtype=np.float64)
    cdef double[::1] c = np.ascontiguousarray(cam, dtype=np.float64)
    cdef double[::1] nw = np.ascontiguousarray(wall_normal, dtype=np.float64)
    cdef double[::1] oc = np.ascontiguousarray(occ[0], dtype=np.float64)
    cdef double[::1] onorm = np.ascontiguousarray(occ[1], dtype=np.float64)
    cdef double[::1] ou = np.ascontiguousarray(occ[2], dtype=np.float64)
    cdef double[::1] ov = np.ascontiguousarray(occ[3], dtype=np.float64)
    cdef double half_u = occ[4]
    cdef double half_v = occ[5]

    cdef Py_ssize_t n_q = wp.shape[0]
    cdef Py_ssize_t n_k = op.shape[0]
    out_arr = np.zeros((n_q, n_bins))
    cdef double[:, ::1] out = out_arr

    # precompute per-sample support ranges to skip empty histograms
    sup_lo_arr = np.zeros(n_k, dtype=np.intp)
    sup_hi_arr = np.zeros(n_k, dtype=np.intp)
    for k_idx in range(n_k):
        nz = np.flatnonzero(np.asarray(hist[k_idx]))
        if nz.size:
            sup_lo_arr[k_idx] = nz[0]
            sup_hi_arr[k_idx] = nz[-1] + 1
    cdef Py_ssize_t[::1] sup_lo = sup_lo_arr
    cdef Py_ssize_t[::1] sup_hi = sup_hi_arr

    cdef Py_ssize_t q, k, b, shift, hi
    cdef double vx, vy, vz, d_ow, inv, dox, doy, doz
    cdef double cos_o_out, cos_w_in, wsx, wsy, wsz, ndw, rx, ry, rz
    cdef double cos_r, f_wall, scale, h

    with nogil:
        for q in range(n_q):
            vx = c[0] - wp[q, 0]
            vy = c[1] - wp[q, 1]
            vz = c[2] - wp[q, 2]
            inv = 1.0 / sqrt(vx * vx + vy * vy + vz * vz)
            wsx = vx * inv
            wsy = vy * inv
            wsz = vz * inv
            for k in range(n_k):
                if sup_hi[k] == 0:
                    continue
                vx = wp[q, 0] - op[k, 0]
                vy = wp[q, 1] - op[k, 1]
                vz = wp[q, 2] - op[k, 2]
                d_ow = sqrt(vx * vx + vy * vy + vz * vz)
                inv = 1.0 / d_ow
                dox = vx * inv
                doy = vy * inv
                doz = vz * inv
                cos_o_out = _dot3(dox, doy, doz, onr[k, 0], onr[k, 1], onr[k, 2])
                if cos_o_out <= 0.0:
                    continue
                cos_w_in = -_dot3(dox, doy, doz, nw[0], nw[1], nw[2])
                if cos_w_in <= 0.0:
                    continue
                if not _segment_visible_c(op[k, 0], op[k, 1], op[k, 2],
                                          wp[q, 0], wp[q, 1], wp[q, 2],
                                          oc, onorm, ou, ov, half_u, half_v):
                    continue
                ndw = -_dot3(dox, doy, doz, nw[0], nw[1], nw[2])
                rx = 2.0 * ndw * nw[0] + dox
                ry = 2.0 * ndw * nw[1] + doy
                rz = 2.0 * ndw * nw[2] + doz
                cos_r = _dot3(rx, ry, rz, wsx, wsy, wsz)
                if ks != 0.0 and cos_r > 0.0:
                    f_wall = kd + ks * pow(cos_r, exponent)
                else:
                    f_wall = kd
                scale = (obj_albedo / M_PI) * cos_o_out * oa[k] * cos_w_in \
                        / (d_ow * d_ow) * f_wall
                shift = <Py_ssize_t>((d_ow + wd[q]) / bin_size_m)
                hi = sup_hi[k]
                if shift + hi > n_bins:
                    hi = n_bins - shift
                for b in range(sup_lo[k], hi):
                    h = hist[k, b]
                    if h != 0.0:
                        out[q, shift + b] += scale * h
    return out_arr
