'''
(c) University of Liverpool 2020

Licensed under the MIT License.

To view a copy of this license, visit <http://opensource.org/licenses/MIT/>..

@author: neilswainston
'''
# pylint: disable=invalid-name
# pylint: disable=too-many-instance-attributes
# pylint: disable=too-many-locals
from dataclasses import dataclass
from functools import lru_cache
import logging
import math

import numpy as np
from scipy import ndimage
from skimage.draw import line

from liv_vein import clustering, gpo, preprocess
from liv_vein.config import PipelineConfig
from liv_vein.imagecore import check_gray, check_mask


_LOGGER = logging.getLogger(__name__)

_CONCAVE = 1e-10

_FLAT = 1e-9

_EIGHT = np.ones((3, 3), dtype=bool)

# Profile directions as (dj, di) unit steps with their pixel spacing:
_DIRECTIONS = [((1, 0), 1.0),
               ((0, 1), 1.0),
               ((1, 1), math.sqrt(2.0)),
               ((1, -1), math.sqrt(2.0))]


@dataclass(frozen=True)
class Kernel:
    '''Square filter kernel.'''
    size: int
    sigma: float
    weights: np.ndarray


@dataclass(frozen=True)
class CurvatureScore:
    '''Valley centre scores and per-pixel concave-region scores.'''
    scores: np.ndarray
    regions: np.ndarray


@dataclass(frozen=True)
class StructElem:
    '''Digital line segment centred on the origin.'''
    length: int
    angle: float
    offsets: np.ndarray

    def footprint(self):
        '''Boolean footprint for scipy morphology.'''
        radius = int(np.abs(self.offsets).max()) if len(self.offsets) else 0
        grid = np.zeros((2 * radius + 1, 2 * radius + 1), dtype=bool)
        grid[self.offsets[:, 0] + radius, self.offsets[:, 1] + radius] = True
        return grid


@dataclass(frozen=True)
class ExtractionStages:
    '''Every intermediate of the extraction pipeline.'''
    prepared: preprocess.PreparedImage
    model: clustering.ClusterModel
    localized: np.ndarray
    roi: np.ndarray
    source: np.ndarray
    filtered: np.ndarray
    curvature: CurvatureScore
    lines: np.ndarray
    area: np.ndarray
    field: gpo.OrientationField
    closed: np.ndarray
    mask: np.ndarray


def gaussian_kernel(sigma, size):
    '''Sampled, unit-sum Gaussian.'''
    if sigma <= 0:
        raise ValueError('sigma must be > 0, got %r' % sigma)

    if size < 3 or size % 2 == 0:
        raise ValueError('Kernel size must be odd and >= 3, got %r' % size)

    offsets = np.arange(size) - size // 2
    sq_dist = offsets[:, None] ** 2 + offsets[None, :] ** 2
    weights = np.exp(-sq_dist / (2.0 * sigma * sigma))

    return Kernel(size=size, sigma=sigma, weights=weights / weights.sum())


def default_kernel_size(sigma):
    '''2 * ceil(3 sigma) + 1.'''
    return 2 * int(math.ceil(3 * sigma)) + 1


def matched_filter(img, kernel):
    '''Convolves with a kernel, replicating borders.'''
    img = check_gray(img)

    if kernel.size > min(img.shape):
        raise ValueError('Kernel size %d larger than image %s'
                         % (kernel.size, img.shape))

    # Kernels are point-symmetric, so correlation is convolution:
    out = ndimage.correlate(img, kernel.weights, mode='nearest')
    return np.clip(out, 0.0, 1.0)


def max_curvature(img, sigma=2.5):
    '''Scores the centres of concave cross-sections in four directions.'''
    img = check_gray(img)

    if sigma <= 0:
        raise ValueError('sigma must be > 0, got %r' % sigma)

    smooth = ndimage.gaussian_filter(img, sigma, mode='nearest')

    # Fixed intensity range, so the scores ignore gain and offset:
    low, high = smooth.min(), smooth.max()

    if high - low > _FLAT:
        smooth = (smooth - low) / (high - low)

    fy, fx = np.gradient(smooth)
    fxx = np.gradient(fx, axis=1)
    fyy = np.gradient(fy, axis=0)
    fxy = np.gradient(fx, axis=0)

    valley = np.zeros(img.shape)
    regions = np.zeros(img.shape)

    for (dj, di), spacing in _DIRECTIONS:
        norm = math.hypot(dj, di)
        uj, ui = dj / norm, di / norm
        first = uj * fx + ui * fy
        second = uj * uj * fxx + 2 * uj * ui * fxy + ui * ui * fyy
        kappa = second / (1.0 + first * first) ** 1.5

        centre_score, region_score = _score_profiles(kappa, (dj, di), spacing)
        valley += centre_score
        np.maximum(regions, region_score, out=regions)

    return CurvatureScore(scores=connect_centres(valley), regions=regions)


def connect_centres(valley):
    '''Reinforces centres that continue on both sides in some direction.'''
    height, width = valley.shape
    padded = np.pad(valley, 2)

    def _shift(di, dj):
        return padded[2 + di:2 + di + height, 2 + dj:2 + dj + width]

    best = np.zeros(valley.shape)

    for (dj, di), _ in _DIRECTIONS:
        ahead = np.maximum(_shift(di, dj), _shift(2 * di, 2 * dj))
        behind = np.maximum(_shift(-di, -dj), _shift(-2 * di, -2 * dj))
        np.maximum(best, valley + np.minimum(ahead, behind), out=best)

    return best


def binarize_scores(score, percentile=85.0):
    '''Keeps scores at or above a percentile of the positive scores.'''
    if not 0 < percentile <= 100:
        raise ValueError('percentile must lie in (0, 100], got %r'
                         % percentile)

    scores = np.asarray(score.scores)
    positive = scores[scores > 0]

    if not positive.size:
        return np.zeros(scores.shape, dtype=np.uint8)

    threshold = np.percentile(positive, percentile)
    return ((scores > 0) & (scores >= threshold)).astype(np.uint8)


def recover_area(lines, score, roi, ratio=0.1):
    '''Grows centre lines over their concave regions.

    Regions scoring below ratio times the strongest seeded region are
    dropped, as are seeds outside them.'''
    seeds = check_mask(lines).astype(bool) & check_mask(roi).astype(bool)

    if not seeds.any():
        return np.zeros(seeds.shape, dtype=np.uint8)

    reference = score.regions[seeds].max()
    candidate = (score.regions > 0) & (score.regions >= ratio * reference)

    area = ndimage.binary_propagation(seeds & candidate, structure=_EIGHT,
                                      mask=candidate)
    return area.astype(np.uint8)


def line_structure(length, angle):
    '''Symmetric Bresenham line through the origin along angle.'''
    if length < 1:
        raise ValueError('Structuring element length must be >= 1')

    half = (length - 1) / 2.0
    di = int(round(half * math.sin(angle)))
    dj = int(round(half * math.cos(angle)))

    rows, cols = line(-di, -dj, di, dj)
    offsets = np.concatenate([np.stack([rows, cols], axis=1),
                              np.stack([-rows, -cols], axis=1)])

    return StructElem(length=length, angle=float(angle),
                      offsets=np.unique(offsets, axis=0))


def close_oriented(mask, field, se_length=5):
    '''Block-wise closing with a line element at each block's angle.'''
    mask = check_mask(mask).astype(bool)
    height, width = mask.shape
    n_rows, n_cols = field.angles.shape
    w = field.block_size

    if n_rows * w < height or n_cols * w < width:
        raise ValueError('Orientation field does not cover the mask')

    out = mask.copy()
    margin = se_length

    for row in range(n_rows):
        for col in range(n_cols):
            if field.coherence[row, col] <= 0:
                continue

            r0, r1 = row * w, min((row + 1) * w, height)
            c0, c1 = col * w, min((col + 1) * w, width)
            cr0, cr1 = max(r0 - margin, 0), min(r1 + margin, height)
            cc0, cc1 = max(c0 - margin, 0), min(c1 + margin, width)

            crop = mask[cr0:cr1, cc0:cc1]

            if not crop.any():
                continue

            footprint = line_structure(se_length,
                                       field.angles[row, col]).footprint()
            closed = ndimage.binary_erosion(
                ndimage.binary_dilation(crop, structure=footprint),
                structure=footprint, border_value=1)

            out[r0:r1, c0:c1] = closed[r0 - cr0:r1 - cr0, c0 - cc0:c1 - cc0]

    return out.astype(np.uint8)


def remove_small(mask, min_area=30):
    '''Deletes 8-connected components smaller than min_area.'''
    if min_area < 0:
        raise ValueError('min_area must be >= 0')

    labels, _ = ndimage.label(check_mask(mask), structure=_EIGHT)
    sizes = np.bincount(labels.ravel())
    keep = sizes >= min_area
    keep[0] = False

    return keep[labels].astype(np.uint8)


def pretreatment_mask(height, width):
    '''-1 over the top half of the rows, +1 below.'''
    values = np.ones((height, width), dtype=np.int8)
    values[:height // 2] = -1
    return values


def extract_stages(img, config=None):
    '''Runs the full pipeline, keeping every intermediate.'''
    config = config or PipelineConfig()
    img = check_gray(img)

    # Stage one: preprocessing and localization:
    prepared = preprocess.prepare(img, config)
    model, localized = _localize(prepared.quantized, config)
    roi = ndimage.binary_dilation(localized, structure=_EIGHT,
                                  iterations=config.roi_margin) \
        if config.roi_margin > 0 else localized.astype(bool)

    # Stage two: line extraction on the denoised source:
    source = preprocess.wiener_denoise(img, config.wiener_window)
    kernel = gaussian_kernel(config.sigma, config.kernel_size or
                             default_kernel_size(config.sigma))
    filtered = matched_filter(source, kernel)
    curvature = max_curvature(filtered, config.sigma)

    lines = binarize_scores(CurvatureScore(scores=curvature.scores * roi,
                                           regions=curvature.regions),
                            config.percentile)
    area = recover_area(lines, curvature, roi.astype(np.uint8),
                        config.area_ratio)

    field = gpo.estimate_orientation(filtered, config.block_size)
    closed = close_oriented(area, field, config.se_length)
    mask = remove_small(closed, config.min_area)

    _LOGGER.debug('Extracted %d vein pixels (%d centre pixels)',
                  mask.sum(), lines.sum())

    return ExtractionStages(prepared=prepared, model=model,
                            localized=localized, roi=roi.astype(np.uint8),
                            source=source, filtered=filtered,
                            curvature=curvature, lines=lines, area=area,
                            field=field, closed=closed, mask=mask)


def extract_pattern(img, config=None):
    '''Binary vein mask of a finger image.'''
    return extract_stages(img, config).mask


@lru_cache(maxsize=32)
def profile_order(shape, direction):
    '''Flat indices of every profile along direction, -1 between profiles.'''
    height, width = shape
    grid = np.arange(height * width).reshape(shape)

    if direction == (1, 0):
        profiles = list(grid)
    elif direction == (0, 1):
        profiles = list(grid.T)
    elif direction == (1, 1):
        profiles = [grid.diagonal(off) for off in range(-height + 1, width)]
    else:
        flipped = grid[::-1]
        profiles = [flipped.diagonal(off)
                    for off in range(-height + 1, width)]

    pieces = []

    for profile in profiles:
        pieces.append(profile)
        pieces.append([-1])

    order = np.concatenate(pieces)
    order.setflags(write=False)
    return order


def _score_profiles(kappa, direction, spacing):
    '''Centre and region scores of the concave runs along one direction.'''
    order = profile_order(kappa.shape, direction)
    flat = kappa.ravel()
    values = np.where(order >= 0, flat[np.maximum(order, 0)], 0.0)

    concave = values > _CONCAVE
    edges = np.diff(np.concatenate([[0], concave.astype(np.int8), [0]]))
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1)

    centre_score = np.zeros(kappa.size)
    region_score = np.zeros(kappa.size)

    if not len(starts):
        return centre_score.reshape(kappa.shape), \
            region_score.reshape(kappa.shape)

    run_max = np.maximum.reduceat(values, starts)
    run_id = np.cumsum(edges[:-1] == 1) - 1
    inside = np.flatnonzero(concave)

    # First position in each run holding its maximum:
    hits = inside[values[inside] == run_max[run_id[inside]]]
    _, first = np.unique(run_id[hits], return_index=True)
    peaks = hits[first]

    run_score = run_max * (ends - starts) * spacing
    np.add.at(centre_score, order[peaks], run_score)
    region_score[order[inside]] = run_score[run_id[inside]]

    return centre_score.reshape(kappa.shape), \
        region_score.reshape(kappa.shape)


def _localize(quantized_image, config):
    '''Clusters the quantized image and keeps its darkest cluster.'''
    quantized = quantized_image.image
    present = len(quantized_image.levels_present())

    if present < 2:
        _LOGGER.warning('Single intensity level; localizing whole image')
        labels = np.ones(quantized.shape, dtype=np.intp)
        model = clustering.ClusterModel(
            k=1, centers=np.array([quantized.flat[0]]), labels=labels,
            iterations=0, converged=True, elapsed=0.0,
            populations=np.array([quantized.size]))
        return model, np.ones(quantized.shape, dtype=np.uint8)

    k = min(config.k or quantized_image.k, present)
    model = clustering.run_clusterer(config.algo, quantized, k,
                                     seed=config.seed,
                                     max_iter=config.max_iter,
                                     m=config.fcm_m, eps=config.fcm_eps)

    return model, clustering.localize(quantized, model)
