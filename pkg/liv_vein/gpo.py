'''
(c) University of Liverpool 2020

Licensed under the MIT License.

To view a copy of this license, visit <http://opensource.org/licenses/MIT/>..

@author: neilswainston
'''
# pylint: disable=invalid-name
# pylint: disable=too-many-locals
from dataclasses import dataclass
import logging

import numpy as np
import pandas as pd
from scipy import ndimage

from liv_vein.imagecore import check_gray


_LOGGER = logging.getLogger(__name__)

_MIN_FREQ = 1.0 / 25.0
_MAX_FREQ = 1.0 / 3.0


@dataclass(frozen=True)
class GradientPair:
    '''Sobel responses along columns (gx) and rows (gy).'''
    gx: np.ndarray
    gy: np.ndarray


@dataclass(frozen=True)
class OrientationField:
    '''Per-block ridge angle in [0, pi) and its coherence in [0, 1].'''
    block_size: int
    angles: np.ndarray
    coherence: np.ndarray

    def block_slices(self, row, col):
        '''Pixel slices of a block.'''
        w = self.block_size
        return (slice(row * w, (row + 1) * w), slice(col * w, (col + 1) * w))


@dataclass(frozen=True)
class FrequencyMap:
    '''Per-block ridge frequency (cycles/pixel); invalid blocks hold 0.'''
    block_size: int
    freqs: np.ndarray
    valid: np.ndarray


def sobel_gradients(img):
    '''3x3 Sobel gradients with replicated borders.'''
    img = check_gray(img)

    if min(img.shape) < 3:
        raise ValueError('Image must be at least 3x3, got %s' % (img.shape,))

    return GradientPair(gx=ndimage.sobel(img, axis=1, mode='nearest'),
                        gy=ndimage.sobel(img, axis=0, mode='nearest'))


def gradient_magnitude(pair, approx=False):
    '''L2 magnitude, or the |gx| + |gy| approximation.'''
    if approx:
        return np.abs(pair.gx) + np.abs(pair.gy)

    return np.hypot(pair.gx, pair.gy)


def estimate_orientation(img, w=16):
    '''Least-squares block orientation of the ridges.'''
    img = check_gray(img)

    if w < 4:
        raise ValueError('Block size must be >= 4, got %r' % w)

    if min(img.shape) < w:
        raise ValueError('Image %s smaller than block size %d'
                         % (img.shape, w))

    grads = sobel_gradients(img)
    gxx = grads.gx * grads.gx
    gyy = grads.gy * grads.gy

    vx = _block_sums(2.0 * grads.gx * grads.gy, w)
    vy = _block_sums(gxx - gyy, w)
    energy = _block_sums(gxx + gyy, w)

    degenerate = energy <= 1e-12
    raw = 0.5 * np.arctan2(vx, vy)
    coherence = np.where(degenerate, 0.0,
                         np.hypot(vx, vy) / np.where(degenerate, 1.0, energy))

    # Smooth the doubled-angle field so opposite gradients reinforce:
    ex = ndimage.uniform_filter(np.where(degenerate, 0.0, np.cos(2 * raw)),
                                size=3, mode='nearest')
    ey = ndimage.uniform_filter(np.where(degenerate, 0.0, np.sin(2 * raw)),
                                size=3, mode='nearest')

    # Gradient direction + pi/2 gives the along-ridge direction:
    angles = np.mod(0.5 * np.arctan2(ey, ex) + np.pi / 2, np.pi)
    angles[(angles >= np.pi) | degenerate] = 0.0

    _LOGGER.debug('Orientation: %d of %d blocks degenerate',
                  degenerate.sum(), degenerate.size)

    return OrientationField(block_size=w, angles=angles,
                            coherence=np.clip(coherence, 0.0, 1.0))


def estimate_frequency(img, field, w=16, l=32):
    '''Ridge frequency from the peak spacing of oriented x-signatures.'''
    img = check_gray(img)

    if field.block_size != w:
        raise ValueError('Field block size %d does not match w=%d'
                         % (field.block_size, w))

    if l < 2 * w:
        raise ValueError('Window length l=%d must be >= 2w' % l)

    signatures = x_signatures(img, field, l)
    n_rows, n_cols = field.angles.shape
    freqs = np.zeros((n_rows, n_cols))

    for row in range(n_rows):
        for col in range(n_cols):
            if field.coherence[row, col] > 0:
                freqs[row, col] = _signature_freq(signatures[row, col])

    valid = (freqs >= _MIN_FREQ) & (freqs <= _MAX_FREQ)
    freqs[~valid] = 0.0

    _LOGGER.debug('Frequency: %d of %d blocks valid', valid.sum(),
                  valid.size)

    return FrequencyMap(block_size=w, freqs=freqs, valid=valid)


def x_signatures(img, field, l):
    '''Per-block l-length profiles across the ridges, averaged along them.'''
    w = field.block_size
    n_rows, n_cols = field.angles.shape

    centre_i = (np.arange(n_rows) * w + w // 2)[:, None, None, None]
    centre_j = (np.arange(n_cols) * w + w // 2)[None, :, None, None]
    cos_t = np.cos(field.angles)[:, :, None, None]
    sin_t = np.sin(field.angles)[:, :, None, None]

    along = (np.arange(w) - w / 2.0)[None, None, None, :]
    across = (np.arange(l) - l / 2.0)[None, None, :, None]

    jj = centre_j + along * cos_t - across * sin_t
    ii = centre_i + along * sin_t + across * cos_t

    samples = ndimage.map_coordinates(img, [ii.ravel(), jj.ravel()],
                                      order=1, mode='nearest')

    return samples.reshape(jj.shape).mean(axis=-1)


def field_table(field, freq=None):
    '''Block table of orientation (and frequency, when given).'''
    rows, cols = np.indices(field.angles.shape)

    data = {'block_row': rows.ravel(),
            'block_col': cols.ravel(),
            'angle': field.angles.ravel(),
            'coherence': field.coherence.ravel()}

    if freq is not None:
        data['freq'] = freq.freqs.ravel()
        data['valid'] = freq.valid.ravel()

    return pd.DataFrame(data)


def _signature_freq(signature):
    '''1 / mean peak spacing, or 0 with fewer than 2 peaks.'''
    smooth = ndimage.uniform_filter1d(signature, size=3, mode='nearest')
    centre = smooth[1:-1]

    # A flat top of equal samples counts once, at its left end:
    peaks = np.flatnonzero((centre > smooth[:-2]) & (centre >= smooth[2:]) &
                           (centre > smooth.mean())) + 1

    if len(peaks) < 2:
        return 0.0

    return (len(peaks) - 1) / float(peaks[-1] - peaks[0])


def _block_sums(values, w):
    '''Sums over w x w blocks; edge blocks may be partial.'''
    rows = np.arange(0, values.shape[0], w)
    cols = np.arange(0, values.shape[1], w)
    return np.add.reduceat(np.add.reduceat(values, rows, axis=0), cols,
                           axis=1)
