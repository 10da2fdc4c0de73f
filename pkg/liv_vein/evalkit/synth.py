'''
(c) University of Liverpool 2020

Licensed under the MIT License.

To view a copy of this license, visit <http://opensource.org/licenses/MIT/>..

@author: neilswainston
'''
# pylint: disable=invalid-name
# pylint: disable=too-many-arguments
# pylint: disable=too-many-instance-attributes
from dataclasses import dataclass
import math

import numpy as np
from scipy import integrate, ndimage


@dataclass(frozen=True)
class PhantomSpec:
    '''Synthetic finger image: dark quadratic veins on a flat background.'''
    seed: int = 0
    width: int = 320
    height: int = 240
    vein_count: int = 4
    vein_width_range: tuple = (10.0, 14.0)
    background_level: float = 0.7
    vein_depth: float = 0.3
    noise_sigma: float = 0.02
    blur_sigma: float = 1.0

    def __post_init__(self):
        low, high = self.vein_width_range

        if self.width < 3 or self.height < 3:
            raise ValueError('Phantom must be at least 3x3')

        if self.vein_count < 0:
            raise ValueError('vein_count must be >= 0')

        if not 0 < low <= high:
            raise ValueError('vein_width_range must be positive and ordered')

        if not 0 <= self.vein_depth <= self.background_level <= 1:
            raise ValueError('Need 0 <= vein_depth <= background_level <= 1')

        if self.noise_sigma < 0 or self.blur_sigma < 0:
            raise ValueError('noise_sigma and blur_sigma must be >= 0')


@dataclass(frozen=True)
class Vein:
    '''Centre line y = c0 x^2 + c1 x + c2 (row as a function of column).'''
    coeffs: np.ndarray
    width: float

    def rows(self, cols):
        '''Centre row at each column.'''
        return np.polyval(self.coeffs, cols)

    def slope(self, cols):
        '''dy/dx at each column.'''
        return np.polyval(np.polyder(self.coeffs), cols)

    def distance(self, rows, cols):
        '''Approximate perpendicular distance from the centre line.'''
        return np.abs(rows - self.rows(cols)) / \
            np.sqrt(1.0 + self.slope(cols) ** 2)

    def length(self, width):
        '''Arc length over columns [0, width - 1].'''
        cols = np.linspace(0, width - 1, 4 * width)
        return float(integrate.trapezoid(
            np.sqrt(1.0 + self.slope(cols) ** 2), cols))


def gen_grating(angle, period, width, height, phase=0.0):
    '''Sinusoidal stripes running along angle (radians, column axis = 0).'''
    if period < 2:
        raise ValueError('period must be >= 2')

    normal = angle + math.pi / 2
    rows, cols = np.indices((height, width), dtype=np.float64)
    wave = cols * math.cos(normal) + rows * math.sin(normal)
    return 0.5 + 0.4 * np.sin(2 * math.pi * wave / period + phase)


def phantom_veins(spec, rng=None):
    '''Draws one vein per horizontal band of the image.'''
    rng = rng if rng is not None else np.random.default_rng(spec.seed)
    veins = []
    band = spec.height / max(spec.vein_count, 1)
    xs = [0.0, spec.width / 2.0, spec.width - 1.0]

    for idx in range(spec.vein_count):
        # Control points stay in the middle half of the band:
        low = idx * band + 0.25 * band
        ys = rng.uniform(low, low + 0.5 * band, size=3)
        vein_width = rng.uniform(*spec.vein_width_range)
        veins.append(Vein(coeffs=np.polyfit(xs, ys, 2), width=vein_width))

    return veins


def gen_phantom(spec=None):
    '''Returns (image, truth mask); deterministic per seed.'''
    spec = spec or PhantomSpec()
    rng = np.random.default_rng(spec.seed)
    veins = phantom_veins(spec, rng)

    rows, cols = np.indices((spec.height, spec.width), dtype=np.float64)
    darkening = np.zeros(rows.shape)
    truth = np.zeros(rows.shape, dtype=bool)

    for vein in veins:
        dist = vein.distance(rows, cols)
        sigma = vein.width / 2.0
        np.maximum(darkening,
                   spec.vein_depth * np.exp(-dist ** 2 / (2 * sigma ** 2)),
                   out=darkening)
        truth |= dist <= vein.width / 2.0

    img = spec.background_level - darkening

    if spec.blur_sigma > 0:
        img = ndimage.gaussian_filter(img, spec.blur_sigma, mode='nearest')

    if spec.noise_sigma > 0:
        img = img + rng.normal(0.0, spec.noise_sigma, size=img.shape)

    return np.clip(img, 0.0, 1.0), truth.astype(np.uint8)
