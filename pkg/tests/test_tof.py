"""Phasor math: conversions, projection, direct/global split."""

import numpy as np
import pytest

from night import tof


def test_amplitude_phase_scalar():
    a, p = tof.amplitude_phase(3.0 + 4.0j)
    assert a == pytest.approx(5.0)
    assert p == pytest.approx(np.arctan2(4.0, 3.0))


def test_amplitude_phase_zero_phasor():
    a, p = tof.amplitude_phase(0.0 + 0.0j)
    assert a == 0.0
    assert p == 0.0


def test_amplitude_phase_negative_real_axis_folds_to_plus_pi():
    _, p = tof.amplitude_phase(-1.0 + 0.0j)
    assert p == pytest.approx(np.pi)
    assert p > 0


def test_amplitude_phase_array():
    z = np.array([1.0, 1.0j, -1.0, 0.0])
    a, p = tof.amplitude_phase(z)
    assert np.allclose(a, [1.0, 1.0, 1.0, 0.0])
    assert np.allclose(p, [0.0, np.pi / 2.0, np.pi, 0.0])
    assert np.all(p > -np.pi) and np.all(p <= np.pi)


def test_wrap_phase_range():
    rng = np.random.default_rng(0)
    ph = rng.uniform(-50.0, 50.0, 1000)
    w = tof.wrap_phase(ph)
    assert np.all(w >= 0) and np.all(w < 2.0 * np.pi)
    assert np.allclose(np.exp(1j * w), np.exp(1j * ph))


def test_depth_from_phase_known_values():
    # c * pi / (4 pi f) = c / (4 f)
    assert tof.depth_from_phase(np.pi, 2.0e7) == pytest.approx(3.74740573, abs=1e-8)
    assert tof.depth_from_phase(np.pi, 5.0e7) == pytest.approx(1.49896229, abs=1e-8)


def test_phase_from_depth_known_value():
    assert tof.phase_from_depth(1.0, 5.0e7) == pytest.approx(2.0958450, abs=1e-6)


def test_phase_depth_round_trip():
    rng = np.random.default_rng(1)
    for f in tof.DEFAULT_FREQUENCIES_HZ:
        d = rng.uniform(0.0, tof.unambiguous_range(f) * 0.999, 200)
        back = tof.depth_from_phase(tof.phase_from_depth(d, f), f)
        assert np.allclose(back, d, rtol=1e-12, atol=1e-12)


def test_negative_phase_wraps_to_nonnegative_depth():
    d = tof.depth_from_phase(-0.5, 2.0e7)
    assert d >= 0
    assert d == pytest.approx(tof.depth_from_phase(2.0 * np.pi - 0.5, 2.0e7))


def test_unambiguous_ranges():
    assert tof.unambiguous_range(2.0e7) == pytest.approx(7.49481145, abs=1e-8)
    assert tof.unambiguous_range(5.0e7) == pytest.approx(2.99792458, abs=1e-8)
    assert tof.unambiguous_range(6.0e7) == pytest.approx(2.49827048, abs=1e-8)


def test_higher_frequency_shrinks_unambiguous_range():
    rs = [tof.unambiguous_range(f) for f in sorted(tof.DEFAULT_FREQUENCIES_HZ)]
    assert rs == sorted(rs, reverse=True)


def test_dtof_pulse_depth():
    assert tof.dtof_pulse_depth(0.5, 0.5) == pytest.approx(1.49896229e8)
    with pytest.raises(ValueError):
        tof.dtof_pulse_depth(0.0, 0.0)


def test_input_validation():
    with pytest.raises(ValueError):
        tof.depth_from_phase(1.0, 0.0)
    with pytest.raises(ValueError):
        tof.phase_from_depth(-0.1, 2.0e7)
    with pytest.raises(ValueError):
        tof.unambiguous_range(-1.0)
    with pytest.raises(ValueError):
        tof.TransientVector(np.array([1.0, -1.0]))
    with pytest.raises(ValueError):
        tof.TransientVector(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        tof.TransientVector(np.zeros(4), bin_size_m=0.0)


def test_projection_kernel_is_unit_modulus():
    k = tof.projection_kernel(100, 0.01, 5.0e7)
    assert np.allclose(np.abs(k), 1.0)


def test_itof_single_delta_matches_closed_form():
    # a single return at round-trip path r yields phase 2 pi f r / c
    n_bins, bs = 2000, 0.01
    for f in tof.DEFAULT_FREQUENCIES_HZ:
        b = 742
        bins = np.zeros(n_bins)
        bins[b] = 2.5
        z = tof.itof_from_transient(tof.TransientVector(bins, bs), f)
        amp, phase = tof.amplitude_phase(z)
        r = (b + 0.5) * bs
        expected = 2.0 * np.pi * f * r / tof.C_LIGHT
        assert amp == pytest.approx(2.5)
        diff = np.angle(np.exp(1j * (phase - expected)))
        assert abs(diff) < 1e-12


def test_itof_array_matches_per_row():
    rng = np.random.default_rng(2)
    img = rng.uniform(0.0, 1.0, (3, 4, 50))
    z = tof.itof_from_transient(img, 5.0e7, 0.01)
    assert z.shape == (3, 4)
    one = tof.itof_from_transient(tof.TransientVector(img[1, 2], 0.01), 5.0e7)
    assert z[1, 2] == pytest.approx(one)


def test_itof_is_linear():
    rng = np.random.default_rng(3)
    a = rng.uniform(0, 1, 100)
    b = rng.uniform(0, 1, 100)
    f = 2.0e7
    za = tof.itof_from_transient(a, f)
    zb = tof.itof_from_transient(b, f)
    zab = tof.itof_from_transient(a + b, f)
    assert zab == pytest.approx(za + zb)


def test_split_transient_components_sum_back():
    rng = np.random.default_rng(4)
    bins = rng.uniform(0, 1, 60)
    bins[:5] = 0.0
    bins[12:20] = 0.0
    tv = tof.TransientVector(bins, 0.01)
    sp = tof.split_transient(tv)
    assert np.array_equal(sp.direct.bins + sp.global_part.bins, bins)


def test_split_transient_direct_is_first_run():
    bins = np.zeros(20)
    bins[3:6] = 1.0
    bins[10] = 2.0
    sp = tof.split_transient(tof.TransientVector(bins))
    assert np.flatnonzero(sp.direct.bins).tolist() == [3, 4, 5]
    assert np.flatnonzero(sp.global_part.bins).tolist() == [10]


def test_split_transient_all_zero():
    sp = tof.split_transient(tof.TransientVector(np.zeros(10)))
    assert not sp.direct.bins.any()
    assert not sp.global_part.bins.any()


def test_split_transient_single_run_has_empty_global():
    bins = np.zeros(20)
    bins[7:12] = 0.5
    sp = tof.split_transient(tof.TransientVector(bins))
    assert np.array_equal(sp.direct.bins, bins)
    assert not sp.global_part.bins.any()


def test_naive_depth_zero_phasor_maps_to_zero():
    z = np.array([[0.0 + 0.0j, np.exp(1j * 1.0)]])
    d = tof.naive_depth(z, 2.0e7)
    assert d[0, 0] == 0.0
    assert d[0, 1] == pytest.approx(tof.depth_from_phase(1.0, 2.0e7))


def test_naive_depth_inverts_phase_from_depth():
    rng = np.random.default_rng(5)
    depth = rng.uniform(0.1, 7.0, (8, 8))
    z = np.exp(1j * tof.phase_from_depth(depth, 2.0e7))
    assert np.allclose(tof.naive_depth(z, 2.0e7), depth, atol=1e-9)


def test_bin_centers():
    tv = tof.TransientVector(np.zeros(4), 0.5)
    assert np.allclose(tv.bin_centers_m(), [0.25, 0.75, 1.25, 1.75])
