'''
(c) University of Liverpool 2020

Licensed under the MIT License.

To view a copy of this license, visit <http://opensource.org/licenses/MIT/>..

@author: neilswainston
'''
# pylint: disable=invalid-name
import logging
import os.path

from PIL import Image
import numpy as np


_LOGGER = logging.getLogger(__name__)

_PNG_MAGIC = b'\x89PNG\r\n\x1a\n'

# ITU-R 601 luma weights:
_LUMA = np.array([0.299, 0.587, 0.114])


class ImageFormatError(ValueError):
    '''Base class for image file errors.'''


class UnsupportedFormatError(ImageFormatError):
    '''File is readable but not an accepted format.'''


class CorruptImageError(ImageFormatError):
    '''File claims an accepted format but its content is damaged.'''


class CorruptHeaderError(CorruptImageError):
    '''Header of an accepted format cannot be parsed.'''


def load_image(path):
    '''Loads an 8-bit PGM (P5) or PNG as a float image in [0, 1].'''
    if not os.path.isfile(path):
        raise FileNotFoundError('No such image: %s' % path)

    with open(path, 'rb') as fle:
        magic = fle.read(len(_PNG_MAGIC))

    if magic.startswith(b'P5'):
        return _read_pil(path, 'PPM', ('L',))

    if magic.startswith(_PNG_MAGIC):
        return _read_pil(path, 'PNG', ('L', 'RGB', 'RGBA'))

    raise UnsupportedFormatError('Unsupported image format: %s' % path)


def save_image(img, path):
    '''Writes a gray image as P5 PGM, rounding half up.'''
    img = check_gray(img)
    samples = np.floor(img * 255.0 + 0.5).astype(np.uint8)
    _write_pgm(samples, path)


def save_mask(mask, path):
    '''Writes a binary mask as P5 PGM (1 -> 255).'''
    mask = check_mask(mask)
    _write_pgm(mask * np.uint8(255), path)


def save_labels(labels, k, path):
    '''Writes a cluster label grid as evenly spaced gray levels.'''
    labels = np.asarray(labels)

    if labels.ndim != 2 or labels.min() < 1 or labels.max() > k:
        raise ValueError('labels must be a 2-D grid in [1, %d]' % k)

    if k == 1:
        samples = np.full(labels.shape, 255, dtype=np.uint8)
    else:
        levels = np.floor(np.arange(k) * 255.0 / (k - 1) + 0.5)
        samples = levels[labels - 1].astype(np.uint8)

    _write_pgm(samples, path)


def check_gray(img):
    '''Validates a gray image, returning it as float64.'''
    img = np.asarray(img, dtype=np.float64)

    if img.ndim != 2 or img.size == 0:
        raise ValueError('Gray image must be a non-empty 2-D grid, got shape '
                         '%s' % (img.shape,))

    if not np.all(np.isfinite(img)):
        raise ValueError('Gray image contains non-finite values')

    if img.min() < 0.0 or img.max() > 1.0:
        raise ValueError('Gray image values must lie in [0, 1]')

    return img


def check_mask(mask):
    '''Validates a binary mask, returning it as uint8.'''
    mask = np.asarray(mask)

    if mask.ndim != 2 or mask.size == 0:
        raise ValueError('Mask must be a non-empty 2-D grid, got shape %s'
                         % (mask.shape,))

    if mask.dtype == np.bool_:
        return mask.astype(np.uint8)

    if not np.all((mask == 0) | (mask == 1)):
        raise ValueError('Mask values must be 0 or 1')

    return mask.astype(np.uint8)


def load_mask(path):
    '''Loads a mask image; any non-zero sample is set.'''
    return (load_image(path) > 0).astype(np.uint8)


def _read_pil(path, fmt, modes):
    '''Decodes an 8-bit gray or RGB(A) image through Pillow.

    Pillow rescales PGM samples with maxval < 255 onto 0-255 and opens
    16-bit PGMs in mode I, which is rejected here.'''
    try:
        pil_img = Image.open(path, formats=(fmt,))
    except (OSError, SyntaxError, ValueError) as err:
        raise CorruptHeaderError('Corrupt %s header %s: %s'
                                 % (fmt, path, err)) from err

    with pil_img:
        if pil_img.mode not in modes:
            raise UnsupportedFormatError('Unsupported %s mode %s: %s'
                                         % (fmt, pil_img.mode, path))

        try:
            pil_img.load()
        except (OSError, SyntaxError, ValueError) as err:
            raise CorruptImageError('Corrupt %s %s: %s'
                                    % (fmt, path, err)) from err

        arr = np.asarray(pil_img)

    _LOGGER.debug('Read %s %s (%dx%d)', fmt, path, arr.shape[1],
                  arr.shape[0])

    if arr.ndim == 2:
        return arr.astype(np.float64) / 255.0

    rgb = arr[..., :3].astype(np.float64)
    return np.clip(rgb @ _LUMA / 255.0, 0.0, 1.0)


def _write_pgm(samples, path):
    '''Writes uint8 samples as P5 (maxval 255).'''
    out_dir = os.path.dirname(path)

    if out_dir and not os.path.exists(out_dir):
        os.makedirs(out_dir)

    samples = np.ascontiguousarray(samples, dtype=np.uint8)
    Image.fromarray(samples).save(path, format='PPM')
