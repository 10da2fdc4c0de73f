'''
(c) University of Liverpool 2020

Licensed under the MIT License.

To view a copy of this license, visit <http://opensource.org/licenses/MIT/>..

@author: neilswainston
'''
# pylint: disable=invalid-name
# pylint: disable=too-many-arguments
from dataclasses import dataclass
import logging

import numpy as np
from scipy import ndimage

from liv_vein.imagecore import check_gray


_LOGGER = logging.getLogger(__name__)

_EPS = 1e-12


@dataclass(frozen=True)
class AdjustSpec:
    '''Input and output bounds of the mid-range adjustment.'''
    l_in: float = 0.0
    h_in: float = 1.0
    l_out: float = 0.2
    h_out: float = 0.6
    step: float = 0.1

    def __post_init__(self):
        for name in ['l_in', 'h_in', 'l_out', 'h_out']:
            val = getattr(self, name)

            if not 0.0 <= val <= 1.0:
                raise ValueError('%s must lie in [0, 1], got %r' % (name, val))

        if self.l_in >= self.h_in:
            raise ValueError('l_in must be < h_in')

        if self.l_out >= self.h_out:
            raise ValueError('l_out must be < h_out')

        if not 0.0 < self.step <= self.h_out - self.l_out + _EPS:
            raise ValueError('step must lie in (0, h_out - l_out]')

    def levels(self):
        '''Returns the quantization grid.'''
        k = int(round((self.h_out - self.l_out) / self.step)) + 1
        return np.round(self.l_out + self.step * np.arange(k), 10)


@dataclass(frozen=True)
class QuantizedImage:
    '''Image snapped onto a discrete level grid.'''
    image: np.ndarray
    levels: np.ndarray

    @property
    def k(self):
        '''Number of grid levels.'''
        return len(self.levels)

    def levels_present(self):
        '''Returns the levels actually taken by a pixel.'''
        return np.unique(self.image)


@dataclass(frozen=True)
class PreparedImage:
    '''Every stage of preprocessing.'''
    normalized: np.ndarray
    denoised: np.ndarray
    adjusted: np.ndarray
    quantized: QuantizedImage
    spec: AdjustSpec


def normalize_local(img, window=15, target_mean=0.5, target_var=0.01):
    '''Maps local mean and variance onto target values.'''
    img = check_gray(img)
    _check_window(img, window)

    if target_var <= 0:
        raise ValueError('target_var must be > 0')

    mean, var = _local_stats(img, window)
    flat = var < _EPS

    gain = np.sqrt(target_var / np.where(flat, 1.0, var))
    out = np.where(flat, target_mean, target_mean + (img - mean) * gain)

    return np.clip(out, 0.0, 1.0)


def wiener_denoise(img, window=3):
    '''Adaptive local-statistics Wiener filter.'''
    img = check_gray(img)
    _check_window(img, window)

    mean, var = _local_stats(img, window)

    # Noise power estimated as the mean local variance:
    noise = var.mean()
    gain = np.maximum(var - noise, 0.0) / np.maximum(var, _EPS)
    _LOGGER.debug('Wiener noise estimate %.3g', noise)

    return np.clip(mean + gain * (img - mean), 0.0, 1.0)


def adjust_midrange(img, spec):
    '''Linear stretch of [l_in, h_in] onto [l_out, h_out].'''
    img = check_gray(img)
    scale = (spec.h_out - spec.l_out) / (spec.h_in - spec.l_in)
    out = spec.l_out + scale * (np.clip(img, spec.l_in, spec.h_in) -
                                spec.l_in)
    return np.clip(out, spec.l_out, spec.h_out)


def quantize_levels(img, spec):
    '''Snaps each pixel to its nearest grid level, ties going down.'''
    img = check_gray(img)
    levels = spec.levels()

    # Subtracting a hair below 0.5 before ceil rounds exact halves down:
    idx = np.ceil((img - spec.l_out) / spec.step - 0.5 - 1e-9)
    idx = np.clip(idx, 0, len(levels) - 1).astype(np.intp)

    return QuantizedImage(image=levels[idx], levels=levels)


def stretch_limits(img, percent=1.0):
    '''Input bounds from the low/high percentiles of the image.'''
    img = check_gray(img)
    l_in, h_in = np.percentile(img, [percent, 100.0 - percent])

    if h_in - l_in < 1e-6:
        _LOGGER.warning('Degenerate intensity range, using [0, 1]')
        return 0.0, 1.0

    return float(l_in), float(h_in)


def prepare(img, config):
    '''normalize -> denoise -> adjust -> quantize.'''
    normalized = normalize_local(img, config.norm_window,
                                 config.target_mean, config.target_var)
    denoised = wiener_denoise(normalized, config.wiener_window)

    if config.auto_adjust:
        l_in, h_in = stretch_limits(denoised, config.stretch_percent)
    else:
        l_in, h_in = config.l_in, config.h_in

    spec = AdjustSpec(l_in=l_in, h_in=h_in, l_out=config.l_out,
                      h_out=config.h_out, step=config.step)

    adjusted = adjust_midrange(denoised, spec)

    return PreparedImage(normalized=normalized,
                         denoised=denoised,
                         adjusted=adjusted,
                         quantized=quantize_levels(adjusted, spec),
                         spec=spec)


def _local_stats(img, window):
    '''Windowed mean and variance with replicated borders.'''
    mean = ndimage.uniform_filter(img, size=window, mode='nearest')
    sq_mean = ndimage.uniform_filter(img * img, size=window, mode='nearest')
    return mean, np.maximum(sq_mean - mean * mean, 0.0)


def _check_window(img, window):
    '''Validates a square odd window against the image.'''
    if window < 3 or window % 2 == 0:
        raise ValueError('window must be odd and >= 3, got %r' % window)

    if window > min(img.shape):
        raise ValueError('window %d larger than image %s'
                         % (window, img.shape))
