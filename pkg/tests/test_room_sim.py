import math

import numpy as np
import pytest

from rirdiff.metrics import edc, t60_from_edc
from rirdiff.room_sim import (
    RoomSpec, SourceSpec, make_arc_array, make_source_positions, reflection_coeff_for_t60,
    simulate_matrix, simulate_rir, source_at_angle,
)

FS, C = 8000.0, 343.0


def test_room_validation():
    with pytest.raises(ValueError):
        RoomSpec(dims=(6, 0, 2))
    with pytest.raises(ValueError):
        RoomSpec(reflection=1.0)
    with pytest.raises(ValueError):
        RoomSpec(sample_rate=0)
    assert RoomSpec(reflection=0.5).reflection == (0.5,) * 6


def test_ula_spacing(room):
    arr = make_arc_array(64, 0.0, room)
    gaps = np.linalg.norm(np.diff(arr.positions, axis=0), axis=1)
    np.testing.assert_allclose(gaps, 3.0 / 63, rtol=1e-12)
    np.testing.assert_allclose(arr.positions[:, 2], 1.4)
    np.testing.assert_allclose(arr.center[:2], room.center[:2])


def test_semicircle_spacing(room):
    arr = make_arc_array(64, 1.0, room)
    gaps = np.linalg.norm(np.diff(arr.positions, axis=0), axis=1)
    chord = 2 * 1.5 * math.sin(math.pi / 126)
    np.testing.assert_allclose(gaps, chord, rtol=1e-9)
    assert chord == pytest.approx(0.0748, abs=1e-4)
    r = np.linalg.norm(arr.positions[:, :2] - room.center[:2], axis=1)
    np.testing.assert_allclose(r, 1.5, rtol=1e-12)


def test_two_mic_array(room):
    arr = make_arc_array(2, 0.0, room)
    assert arr.n_mics == 2
    assert np.linalg.norm(arr.positions[1] - arr.positions[0]) == pytest.approx(3.0)


def test_intermediate_arc_interpolates(room):
    lin = make_arc_array(64, 0.0, room).positions
    circ = make_arc_array(64, 1.0, room).positions
    mid = make_arc_array(64, 1 / 3, room).positions
    np.testing.assert_allclose(mid, (2 / 3) * lin + (1 / 3) * circ, atol=1e-12)


def test_arc_errors(room):
    with pytest.raises(ValueError):
        make_arc_array(1, 0.0, room)
    with pytest.raises(ValueError):
        make_arc_array(64, 0.0, RoomSpec(dims=(2.5, 5, 3)))


def test_source_positions(room, ula):
    srcs = make_source_positions(room, ula)
    assert [s.angle_deg for s in srcs] == [10, 30, 50, 70, 90, 110, 130, 150, 170]
    d = [np.linalg.norm(s.position - ula.center) for s in srcs]
    np.testing.assert_allclose(d, 2.0, rtol=1e-12)
    pos = np.array([s.position for s in srcs])
    assert len({tuple(np.round(p, 9)) for p in pos}) == 9
    broadside = srcs[4].position - ula.center
    np.testing.assert_allclose(broadside, [0, 2, 0], atol=1e-12)
    # 10 deg and 170 deg mirror about the broadside axis.
    a, b = srcs[0].position - ula.center, srcs[-1].position - ula.center
    np.testing.assert_allclose([a[0], a[1]], [-b[0], b[1]], atol=1e-12)


def test_source_outside_room_rejected(ula):
    small = RoomSpec(dims=(4.0, 3.0, 2.8))
    arr = make_arc_array(8, 0.0, small, span=1.0)
    with pytest.raises(ValueError):
        make_source_positions(small, arr)


def test_free_field_pulse():
    room = RoomSpec(reflection=0.0)
    src = np.array([2.0, 2.0, 1.4])
    mic = src + [2.0, 0, 0]
    h = simulate_rir(room, src, mic, 200)
    delay = 2.0 * FS / C
    assert delay == pytest.approx(46.65, abs=0.01)
    assert abs(np.argmax(np.abs(h)) - delay) <= 1
    # Band-limited pulse area equals the spherical-spreading amplitude.
    assert h.sum() == pytest.approx(1 / (4 * np.pi * 2.0), rel=1e-3)
    energy_centroid = np.sum(np.arange(200) * h ** 2) / np.sum(h ** 2)
    assert energy_centroid == pytest.approx(delay, abs=0.5)


def test_free_field_distance_law():
    room = RoomSpec(reflection=0.0)
    src = np.array([1.0, 2.0, 1.4])
    h1 = simulate_rir(room, src, src + [1.0, 0, 0], 100)
    h2 = simulate_rir(room, src, src + [2.0, 0, 0], 100)
    assert h1.sum() / h2.sum() == pytest.approx(2.0, rel=0.01)


def test_cube_mirror_symmetry():
    room = RoomSpec(dims=(4, 4, 4), reflection=(0.7, 0.7, 0.6, 0.6, 0.5, 0.5))
    src = np.array([1.3, 2.1, 1.7])
    mic = np.array([2.9, 1.6, 2.2])
    flip = np.array([4.0, 0, 0])
    # Reflecting both points in x = 2 leaves the image set (and RIR) unchanged.
    m_src = np.array([flip[0] - src[0], src[1], src[2]])
    m_mic = np.array([flip[0] - mic[0], mic[1], mic[2]])
    np.testing.assert_allclose(simulate_rir(room, src, mic, 400), simulate_rir(room, m_src, m_mic, 400),
                               atol=1e-12)


def test_reciprocity():
    room = RoomSpec(reflection=0.8)
    a, b = np.array([1.0, 1.5, 1.2]), np.array([4.0, 3.5, 2.0])
    np.testing.assert_allclose(simulate_rir(room, a, b, 300), simulate_rir(room, b, a, 300), atol=1e-12)


def test_simulate_rir_errors(room):
    with pytest.raises(ValueError):
        simulate_rir(room, [1, 1, 1], [1, 1, 1], 10)
    with pytest.raises(ValueError):
        simulate_rir(room, [1, 1, 1], [2, 2, 2], 0)
    with pytest.raises(ValueError):
        simulate_rir(room, [7, 1, 1], [2, 2, 2], 10)


def test_more_reflection_more_energy():
    src, mic = np.array([1.0, 1.5, 1.2]), np.array([4.0, 3.5, 2.0])
    e = [np.sum(simulate_rir(RoomSpec(reflection=b), src, mic, 512) ** 2) for b in (0.2, 0.4, 0.8)]
    assert e[0] <= e[1] <= e[2]


def test_matrix_layout_and_determinism(room):
    arr = make_arc_array(8, 0.0, room)
    src = source_at_angle(room, arr, 90)
    r = room.with_reflection(0.7)
    M = simulate_matrix(r, src, arr, 256)
    assert M.data.shape == (256, 8)
    np.testing.assert_array_equal(M.data, simulate_matrix(r, src, arr, 256).data)
    np.testing.assert_array_equal(M.data[:, 3], simulate_rir(r, src, arr.positions[3], 256))
    perm = np.array([3, 1, 0, 7, 2, 6, 5, 4])
    from rirdiff.room_sim import ArrayGeometry
    Mp = simulate_matrix(r, src, ArrayGeometry(arr.positions[perm]), 256)
    np.testing.assert_array_equal(Mp.data, M.data[:, perm])


def test_singleton_matrix(room):
    from rirdiff.room_sim import ArrayGeometry
    src = SourceSpec([3.0, 4.0, 1.4])
    mic = np.array([[2.0, 2.0, 1.4]])
    M = simulate_matrix(room, src, ArrayGeometry(mic), 128)
    np.testing.assert_array_equal(M.data[:, 0], simulate_rir(room, src, mic[0], 128))


def test_broadside_direct_path_symmetric(reverb_room, ula):
    src = source_at_angle(reverb_room, ula, 90)
    M = simulate_matrix(reverb_room, src, ula, 128)
    d = np.linalg.norm(ula.positions - src.position, axis=1)
    np.testing.assert_allclose(d, d[::-1], atol=1e-12)
    np.testing.assert_allclose(M.data, M.data[:, ::-1], atol=1e-12)
    arrival = np.argmax(np.abs(M.data), axis=0)
    np.testing.assert_array_equal(arrival, arrival[::-1])


def test_sabine_inverse(room):
    assert room.volume == pytest.approx(92.4)
    assert room.surface_area == pytest.approx(130.4)
    beta = reflection_coeff_for_t60(room, 0.6)
    alpha = 0.161 * 92.4 / (0.6 * 130.4)
    assert alpha == pytest.approx(0.190, abs=1e-3)
    assert beta == pytest.approx(math.sqrt(1 - alpha), rel=1e-12)
    assert beta == pytest.approx(0.900, abs=1e-3)
    assert reflection_coeff_for_t60(room, 1e6) == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(ValueError):
        reflection_coeff_for_t60(room, 0.05)
    with pytest.raises(ValueError):
        reflection_coeff_for_t60(room, 0.0)


def test_calibrated_room_t60(reverb_room, ula):
    src = source_at_angle(reverb_room, ula, 90)
    h = simulate_rir(reverb_room, src, ula.positions[48], 2048)
    t60 = t60_from_edc(edc(h), FS)
    assert 0.45 <= t60 <= 0.75
