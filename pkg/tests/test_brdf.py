"""Wall reflectance: Lambertian limit, glossy lobe, energy bounds."""

import math

import numpy as np
import pytest

from night.render import brdf
from night.scene import Material


def test_specular_exponent_values():
    assert brdf.specular_exponent(1.0) == pytest.approx(0.0)
    assert brdf.specular_exponent(0.3) == pytest.approx(2.0 / 0.3**4 - 2.0)
    # monotone: rougher -> smaller exponent
    es = [brdf.specular_exponent(a) for a in np.linspace(0.3, 1.0, 10)]
    assert es == sorted(es, reverse=True)


def test_lambertian_limit_is_constant():
    mat = Material(albedo=0.8, roughness=1.0)
    n = np.array([0.0, 0.0, 1.0])
    w_in = np.array([0.0, 0.0, 1.0])
    rng = np.random.default_rng(0)
    for _ in range(20):
        v = rng.normal(size=3)
        v[2] = abs(v[2]) + 0.1
        w_out = v / np.linalg.norm(v)
        assert brdf.brdf_eval(mat, w_in, w_out, n) == pytest.approx(0.8 / math.pi)


def test_glossy_peaks_at_mirror_direction():
    mat = Material(albedo=0.8, roughness=0.4)
    n = np.array([0.0, 0.0, 1.0])
    w_in = np.array([1.0, 0.0, 1.0]) / math.sqrt(2)
    mirror = np.array([-1.0, 0.0, 1.0]) / math.sqrt(2)
    f_peak = brdf.brdf_eval(mat, w_in, mirror, n)
    off = np.array([0.0, 0.5, 1.0])
    off /= np.linalg.norm(off)
    assert f_peak > brdf.brdf_eval(mat, w_in, off, n)
    assert f_peak > brdf.brdf_eval(mat, w_in, w_in, n)


def test_hemispherical_reflectance_bounded_by_albedo():
    # integrate f * cos(theta_out) over the hemisphere by quadrature
    n = np.array([0.0, 0.0, 1.0])
    w_in = np.array([0.0, 0.0, 1.0])  # normal incidence: lobe fully inside
    nt, np_ = 256, 256
    theta = (np.arange(nt) + 0.5) * (math.pi / 2) / nt
    phi = (np.arange(np_) + 0.5) * 2 * math.pi / np_
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    w = np.stack([np.sin(tt) * np.cos(pp), np.sin(tt) * np.sin(pp), np.cos(tt)], axis=-1)
    d_omega = np.sin(tt) * (math.pi / 2 / nt) * (2 * math.pi / np_)
    for rough in (1.0, 0.7, 0.4, 0.3):
        mat = Material(albedo=0.8, roughness=rough)
        cos_r = w @ (2.0 * (n @ w_in) * n - w_in)
        f = brdf.brdf_from_cosines(mat, cos_r)
        total = float(np.sum(f * np.cos(tt) * d_omega))
        assert total <= 0.8 + 1e-3
        if rough == 1.0:
            assert total == pytest.approx(0.8, rel=1e-3)


def test_brdf_terms_split():
    mat = Material(albedo=0.6, roughness=0.5)
    kd, ks, e = brdf.brdf_terms(mat)
    assert kd == pytest.approx(0.6 * 0.5 / math.pi)
    assert e == pytest.approx(2.0 / 0.5**4 - 2.0)
    assert ks == pytest.approx(0.6 * 0.5 * (e + 2.0) / (2.0 * math.pi))


def test_brdf_from_cosines_array_and_clip():
    mat = Material(albedo=0.8, roughness=0.5)
    kd, _, _ = brdf.brdf_terms(mat)
    vals = brdf.brdf_from_cosines(mat, np.array([-0.5, 0.0, 0.9]))
    # negative/zero cosine collapses to the diffuse floor
    assert vals[0] == pytest.approx(kd)
    assert vals[1] == pytest.approx(kd)
    assert vals[2] > kd


def test_brdf_eval_rejects_bad_inputs():
    mat = Material(albedo=0.8, roughness=0.5)
    n = np.array([0.0, 0.0, 1.0])
    up = np.array([0.0, 0.0, 1.0])
    with pytest.raises(ValueError):
        brdf.brdf_eval(mat, np.array([0.0, 0.0, 2.0]), up, n)
    with pytest.raises(ValueError):
        brdf.brdf_eval(mat, up, np.array([0.0, 0.0, -1.0]), n)


def test_ideal_specular_has_no_finite_brdf():
    with pytest.raises(ValueError):
        brdf.brdf_terms(Material(albedo=1.0, ideal_specular=True))
