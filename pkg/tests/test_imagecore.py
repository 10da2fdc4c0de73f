'''
(c) University of Liverpool 2020

Licensed under the MIT License.

To view a copy of this license, visit <http://opensource.org/licenses/MIT/>..

@author: neilswainston
'''
# pylint: disable=missing-function-docstring
import os.path
import tempfile

from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays
import numpy as np
from PIL import Image
import pytest

from liv_vein import imagecore


def test_load_pgm_scales_samples(write_pgm):
    path = write_pgm('a.pgm', 2, 2, [0, 255, 128, 64])
    img = imagecore.load_image(path)

    assert img.shape == (2, 2)
    np.testing.assert_array_equal(img, [[0.0, 1.0], [128 / 255, 64 / 255]])


def test_load_pgm_with_header_comment(write_pgm):
    path = write_pgm('c.pgm', 2, 1, [10, 20],
                     header=b'P5\n# scanner 3\n2 1\n255\n')
    np.testing.assert_array_equal(imagecore.load_image(path),
                                  [[10 / 255, 20 / 255]])


def test_load_pgm_low_maxval(write_pgm):
    path = write_pgm('m.pgm', 2, 1, [0, 15], maxval=15)
    np.testing.assert_array_equal(imagecore.load_image(path), [[0.0, 1.0]])


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        imagecore.load_image(str(tmp_path / 'nope.pgm'))


def test_color_ppm_unsupported(tmp_path):
    path = tmp_path / 'c.ppm'
    path.write_bytes(b'P6\n1 1\n255\n' + bytes([1, 2, 3]))

    with pytest.raises(imagecore.UnsupportedFormatError):
        imagecore.load_image(str(path))


def test_sixteen_bit_unsupported(write_pgm):
    path = write_pgm('w.pgm', 1, 1, [0, 0], maxval=65535)

    with pytest.raises(imagecore.UnsupportedFormatError):
        imagecore.load_image(path)


def test_corrupt_header(write_pgm):
    path = write_pgm('h.pgm', 0, 0, [0], header=b'P5\nab 1\n255\n')

    with pytest.raises(imagecore.CorruptHeaderError):
        imagecore.load_image(path)


def test_zero_maxval_is_corrupt_header(write_pgm):
    path = write_pgm('z.pgm', 1, 1, [0], maxval=0)

    with pytest.raises(imagecore.CorruptHeaderError):
        imagecore.load_image(path)


def test_saved_pgm_reopens_as_gray(tmp_path):
    path = str(tmp_path / 'g.pgm')
    imagecore.save_image(np.array([[0.0, 0.2], [0.6, 1.0]]), path)

    with Image.open(path) as pil_img:
        assert pil_img.format == 'PPM' and pil_img.mode == 'L'
        assert np.asarray(pil_img).tolist() == [[0, 51], [153, 255]]


def test_truncated_body(write_pgm):
    path = write_pgm('t.pgm', 4, 4, [0, 1, 2])

    with pytest.raises(imagecore.CorruptImageError) as err:
        imagecore.load_image(path)

    assert not isinstance(err.value, imagecore.CorruptHeaderError)


def test_errors_are_distinct():
    assert not issubclass(imagecore.UnsupportedFormatError,
                          imagecore.CorruptImageError)
    assert issubclass(imagecore.CorruptHeaderError,
                      imagecore.CorruptImageError)


def test_save_image_rounds_half_up(tmp_path):
    path = str(tmp_path / 'r.pgm')
    imagecore.save_image(np.array([[1.0, 0.5, 0.4999, 0.0]]), path)

    with open(path, 'rb') as fle:
        data = fle.read()

    assert data.startswith(b'P5\n4 1\n255\n')
    assert list(data[-4:]) == [255, 128, 127, 0]


def test_save_image_matches_rounding_oracle(tmp_path):
    rng = np.random.default_rng(7)
    img = rng.random((5, 6))
    path = str(tmp_path / 'o.pgm')
    imagecore.save_image(img, path)

    with open(path, 'rb') as fle:
        body = fle.read()[-30:]

    expected = [int(np.floor(val * 255 + 0.5)) for val in img.ravel()]
    assert list(body) == expected


@pytest.mark.parametrize('mask, expected', [
    (np.ones((2, 2)), [255] * 4),
    (np.zeros((2, 2)), [0] * 4),
    (np.array([[1, 0], [0, 1]]), [255, 0, 0, 255]),
])
def test_save_mask_bytes(tmp_path, mask, expected):
    path = str(tmp_path / 'mask.pgm')
    imagecore.save_mask(mask, path)

    with open(path, 'rb') as fle:
        assert list(fle.read()[-4:]) == expected


def test_save_mask_rejects_non_binary(tmp_path):
    with pytest.raises(ValueError):
        imagecore.save_mask(np.array([[0, 2]]), str(tmp_path / 'x.pgm'))


def test_save_image_rejects_out_of_range(tmp_path):
    with pytest.raises(ValueError):
        imagecore.save_image(np.array([[1.5]]), str(tmp_path / 'x.pgm'))


def test_save_labels_spreads_levels(tmp_path):
    path = str(tmp_path / 'l.pgm')
    imagecore.save_labels(np.array([[1, 2, 3]]), 3, path)

    with open(path, 'rb') as fle:
        assert list(fle.read()[-3:]) == [0, 128, 255]


def test_png_rgb_uses_luma(tmp_path):
    path = str(tmp_path / 'c.png')
    Image.fromarray(np.array([[[255, 0, 0], [0, 0, 255]]],
                             dtype=np.uint8)).save(path)
    img = imagecore.load_image(path)

    np.testing.assert_allclose(img, [[0.299, 0.114]], atol=1e-12)


def test_png_gray(tmp_path):
    path = str(tmp_path / 'g.png')
    Image.fromarray(np.array([[0, 51, 255]], dtype=np.uint8)).save(path)
    np.testing.assert_array_equal(imagecore.load_image(path),
                                  [[0.0, 0.2, 1.0]])


@settings(max_examples=30, deadline=None)
@given(arrays(np.uint8, st.tuples(st.integers(1, 12), st.integers(1, 12))))
def test_save_load_round_trip(samples):
    img = samples / 255.0

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, 'rt.pgm')
        imagecore.save_image(img, path)
        np.testing.assert_array_equal(imagecore.load_image(path), img)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 255), st.data())
def test_loaded_values_in_unit_range(maxval, data):
    width = data.draw(st.integers(1, 8))
    height = data.draw(st.integers(1, 8))
    samples = data.draw(st.lists(st.integers(0, maxval),
                                 min_size=width * height,
                                 max_size=width * height))

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, 'p.pgm')

        with open(path, 'wb') as fle:
            fle.write(b'P5 %d %d %d\n' % (width, height, maxval))
            fle.write(bytes(samples))

        img = imagecore.load_image(path)

    assert img.shape == (height, width)
    assert img.min() >= 0.0 and img.max() <= 1.0


@pytest.mark.parametrize('img', [
    np.zeros((0, 3)),
    np.zeros(4),
    np.array([[0.5, np.nan]]),
    np.array([[0.5, 1.5]]),
    np.array([[-0.1, 0.5]]),
])
def test_check_gray_rejects(img):
    with pytest.raises(ValueError):
        imagecore.check_gray(img)


def test_check_gray_returns_float():
    assert imagecore.check_gray([[0, 1]]).dtype == np.float64


def test_check_mask():
    mask = imagecore.check_mask(np.array([[True, False]]))
    assert mask.dtype == np.uint8 and mask.tolist() == [[1, 0]]

    with pytest.raises(ValueError):
        imagecore.check_mask(np.array([[0, 2]]))
