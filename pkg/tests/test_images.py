import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from holodyn.images import (
    ImageGrid,
    RenderParams,
    Viewport,
    encode_image,
    normalize,
    read_pnm,
    write_image,
)


def _grid(values):
    values = np.asarray(values, dtype=float)
    vp = Viewport(0j, 1.0, 1.0, values.shape[1], values.shape[0])
    return ImageGrid(vp, values, "test")


def test_zero_grid_pgm_bytes(tmp_path):
    path = tmp_path / "z.pgm"
    write_image(_grid(np.zeros((2, 2))), "gray", path)
    assert path.read_bytes() == b"P5\n2 2\n255\n" + bytes(4)


def test_constant_grid_maps_to_white():
    data = encode_image(_grid(np.ones((2, 2))), "gray")
    assert data.endswith(bytes([255] * 4))


def test_color_output_round_trip(tmp_path):
    path = tmp_path / "c.ppm"
    grid = _grid(np.arange(12.0).reshape(3, 4))
    write_image(grid, "fire", path)
    magic, w, h, pixels = read_pnm(path)
    assert (magic, w, h, pixels.shape) == ("P6", 4, 3, (3, 4, 3))


def test_unknown_colormap():
    with pytest.raises(ValueError):
        encode_image(_grid(np.ones((1, 1))), "rainbow")


def test_unwritable_path_names_the_path(tmp_path):
    target = tmp_path / "missing" / "x.pgm"
    with pytest.raises(OSError, match="missing"):
        write_image(_grid(np.ones((1, 1))), "gray", target)


def test_nonfinite_values_rejected():
    with pytest.raises(ValueError):
        _grid([[np.nan]])


def test_viewport_pixel_centres():
    vp = Viewport.square(0, 2.0, 2)
    np.testing.assert_allclose(vp.grid(), [[-0.5 + 0.5j, 0.5 + 0.5j], [-0.5 - 0.5j, 0.5 - 0.5j]])


def test_params_validation():
    with pytest.raises(ValueError):
        RenderParams(max_iter=0)
    with pytest.raises(ValueError):
        RenderParams(escape_radius=-1)


@settings(max_examples=50, deadline=None)
@given(arrays(float, (4, 5), elements=st.floats(0, 100)))
def test_normalize_keeps_zero_and_range(values):
    out = normalize(values)
    assert np.all(out[values == 0] == 0)
    nz = values != 0
    if nz.any():
        assert out[nz].min() >= 1 and out[nz].max() == 255


@settings(max_examples=30, deadline=None)
@given(st.complex_numbers(max_magnitude=5), st.floats(0.1, 10), st.integers(1, 40))
def test_pixel_round_trip(center, width, n):
    vp = Viewport.square(center, width, n)
    cols, rows = np.meshgrid(np.arange(n), np.arange(n))
    c, r = vp.plane_to_pixel(vp.pixel_to_plane(cols, rows))
    np.testing.assert_allclose(c, cols, atol=1e-6)
    np.testing.assert_allclose(r, rows, atol=1e-6)
