import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rirdiff.imaging import (
    Mask, complete_matrix, make_mask, masked_image, reassemble, split_patches,
)
from rirdiff.metrics import nmse
from rirdiff.room_sim import RirMatrix


def _matrix(K, N, seed=0):
    return RirMatrix(np.random.default_rng(seed).standard_normal((K, N)), 8000.0)


def test_make_mask_counts():
    m = make_mask(64, 0.7, 3)
    assert m.n_missing == 45 and m.n_measured == 19
    assert make_mask(64, 0.5, 3).n_missing == 32
    assert make_mask(64, 0.1, 0).n_missing == 6
    assert make_mask(10, 0.25, 0).n_missing == 3  # 2.5 rounds up


def test_make_mask_deterministic():
    np.testing.assert_array_equal(make_mask(64, 0.3, 9).measured, make_mask(64, 0.3, 9).measured)
    assert not np.array_equal(make_mask(64, 0.5, 1).measured, make_mask(64, 0.5, 2).measured)


def test_make_mask_errors():
    with pytest.raises(ValueError):
        make_mask(4, 0.75, 0)
    with pytest.raises(ValueError):
        make_mask(64, 1.0, 0)


def test_patch_count_2048():
    grid = split_patches(_matrix(2048, 64))
    rows = grid.offsets[:, 0]
    assert grid.n_patches == 43
    assert rows[:3].tolist() == [0, 48, 96]
    assert rows[-2:].tolist() == [1968, 1984]
    # Oracle: ceil((K - 64) / 48) + 1 with the end clamp.
    assert grid.n_patches == int(np.ceil((2048 - 64) / 48)) + 1


def test_single_patch_round_trip():
    M = _matrix(64, 64)
    grid = split_patches(M)
    assert grid.n_patches == 1
    np.testing.assert_allclose(reassemble(grid), M.data, rtol=1e-12, atol=1e-12)


def test_pixels_bounded_and_scales_positive():
    M = _matrix(300, 64, 2)
    grid = split_patches(M, make_mask(64, 0.5, 0))
    assert np.abs(grid.pixels).max() <= 1.0
    assert np.all(grid.scales > 0)


def test_scale_homogeneity():
    M = _matrix(500, 64, 3)
    mask = make_mask(64, 0.4, 1)
    g1 = split_patches(M, mask)
    g2 = split_patches(M.with_data(7.5 * M.data), mask)
    np.testing.assert_allclose(g1.pixels, g2.pixels, rtol=1e-12, atol=1e-15)
    np.testing.assert_allclose(g2.scales, 7.5 * g1.scales, rtol=1e-12)
    np.testing.assert_allclose(reassemble(g2), 7.5 * reassemble(g1), rtol=1e-12, atol=1e-12)


def test_scale_uses_measured_columns_only():
    data = np.ones((64, 64))
    data[:, 5] = 100.0
    measured = np.ones(64, dtype=bool)
    measured[5] = False
    grid = split_patches(data, Mask(measured))
    assert grid.scales[0] == 1.0
    assert np.all(grid.pixels[0][:, 5] == 0)


def test_zero_patch_falls_back_to_unit_scale():
    data = np.zeros((64, 64))
    with pytest.warns(RuntimeWarning):
        grid = split_patches(data)
    assert grid.scales[0] == 1.0 and grid.degenerate[0]


def test_column_padding_inherits_mask():
    measured = np.ones(16, dtype=bool)
    measured[-1] = False
    M = _matrix(100, 16)
    grid = split_patches(M, Mask(measured))
    assert grid.padded_dims == (100, 64)
    assert not grid.column_mask[15:].any() and grid.column_mask[:15].all()
    pm = grid.pixel_masks()
    assert pm.shape == (grid.n_patches, 64, 64)
    assert not pm[:, :, 20].any()


def test_short_time_axis_zero_padded():
    M = _matrix(10, 64)
    grid = split_patches(M)
    assert grid.padded_dims == (64, 64)
    np.testing.assert_allclose(reassemble(grid), M.data, rtol=1e-12)


def test_wide_image_tiles_columns():
    M = _matrix(70, 130)
    grid = split_patches(M)
    assert sorted(set(grid.offsets[:, 1].tolist())) == [0, 48, 66]
    np.testing.assert_allclose(reassemble(grid), M.data, rtol=1e-12)


@pytest.mark.parametrize("K,N", [(64, 64), (1000, 64), (2048, 16), (130, 200), (5, 2)])
def test_ownership_partitions_image(K, N):
    grid = split_patches(_matrix(K, N))
    count = np.zeros(grid.padded_dims, dtype=int)
    for (r0, r1), (c0, c1) in grid.ownership():
        count[r0:r1, c0:c1] += 1
    assert np.all(count == 1)
    # Owned region stays inside the patch itself.
    for (r, c), ((r0, r1), (c0, c1)) in zip(grid.offsets, grid.ownership()):
        assert r <= r0 < r1 <= r + 64 and c <= c0 < c1 <= c + 64


def test_reassemble_uses_ownership_only():
    M = _matrix(112, 64)
    grid = split_patches(M)
    assert grid.n_patches == 2
    fake = np.stack([np.full((64, 64), 1.0), np.full((64, 64), 2.0)])
    grid.scales[:] = 1.0
    out = reassemble(grid, fake)
    # Patches overlap on rows 48..63; the boundary sits at (48 + 64) // 2 = 56.
    assert np.all(out[:56] == 1.0) and np.all(out[56:] == 2.0)


def test_reassemble_zero_and_shape_errors():
    grid = split_patches(_matrix(200, 64))
    assert not reassemble(grid, np.zeros_like(grid.pixels)).any()
    with pytest.raises(ValueError):
        reassemble(grid, np.zeros((1, 64, 64)))


def test_identity_round_trip_with_mask():
    M = _matrix(1000, 64, 5)
    mask = make_mask(64, 0.6, 2)
    grid = split_patches(M, mask)
    image = reassemble(grid, grid.pixels)
    np.testing.assert_allclose(image, masked_image(M, mask), rtol=1e-12, atol=1e-12)
    done = complete_matrix(M, mask, image)
    np.testing.assert_array_equal(done.data[:, mask.measured], M.data[:, mask.measured])
    assert not done.data[:, ~mask.measured].any()


def test_complete_matrix_cases():
    M = _matrix(50, 8)
    rec = np.full((50, 8), 3.0)
    full = Mask.all_measured(8)
    np.testing.assert_array_equal(complete_matrix(M, full, rec).data, M.data)
    two = np.zeros(8, dtype=bool)
    two[[1, 6]] = True
    out = complete_matrix(M, Mask(two), rec).data
    np.testing.assert_array_equal(out[:, [1, 6]], M.data[:, [1, 6]])
    assert np.all(out[:, [0, 2, 3, 4, 5, 7]] == 3.0)
    with pytest.raises(ValueError):
        complete_matrix(M, full, np.zeros((50, 7)))


def test_complete_matrix_measured_nmse_is_exact():
    M = _matrix(50, 8)
    mask = make_mask(8, 0.5, 0)
    out = complete_matrix(M, mask, np.random.default_rng(1).standard_normal((50, 8)))
    assert nmse(M, out, mask.measured_idx) == float("-inf")


@settings(max_examples=25, deadline=None)
@given(K=st.integers(1, 400), N=st.integers(2, 140), ratio=st.floats(0.0, 0.7),
       c=st.floats(0.01, 100.0), seed=st.integers(0, 2 ** 16))
def test_round_trip_properties(K, N, ratio, c, seed):
    rng = np.random.default_rng(seed)
    data = rng.standard_normal((K, N))
    try:
        mask = make_mask(N, ratio, seed)
    except ValueError:
        return
    grid = split_patches(data, mask)
    assert np.abs(grid.pixels).max() <= 1.0
    image = reassemble(grid)
    assert image.shape == (K, N)
    np.testing.assert_allclose(image, masked_image(data, mask), rtol=1e-10, atol=1e-12)
    scaled = reassemble(split_patches(c * data, mask))
    np.testing.assert_allclose(scaled, c * image, rtol=1e-10, atol=1e-12)
