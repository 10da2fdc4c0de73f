'''
(c) University of Liverpool 2020

Licensed under the MIT License.

To view a copy of this license, visit <http://opensource.org/licenses/MIT/>..

@author: neilswainston
'''
# pylint: disable=invalid-name
# pylint: disable=too-many-arguments
# pylint: disable=too-many-locals
from dataclasses import dataclass
import logging
import time

import numpy as np
import pandas as pd

from liv_vein.imagecore import check_gray


_LOGGER = logging.getLogger(__name__)

_HIST_BINS = 4096
_TIE_TOL = 1e-9


class ClusterInitError(ValueError):
    '''Too few distinct intensities to seed k clusters.'''


class DegenerateHistogramError(ValueError):
    '''Histogram cannot be split into classes.'''


@dataclass
class ClusterModel:
    '''Cluster centers, per-pixel labels (1..k) and convergence record.'''
    k: int
    centers: np.ndarray
    labels: np.ndarray
    iterations: int
    converged: bool
    elapsed: float
    populations: np.ndarray
    memberships: np.ndarray = None


@dataclass(frozen=True)
class ClusterInit:
    '''Evenly spaced starting centers over the image intensity span.'''
    minimum: float
    i_range: float
    k: int

    @property
    def step_size(self):
        '''Center spacing.'''
        return self.i_range / self.k

    @property
    def initial_centers(self):
        '''Interval midpoints.'''
        return self.minimum + self.i_range * (np.arange(1, self.k + 1) - 0.5) \
            / self.k

    @property
    def intervals(self):
        '''(low, high) bounds of each starting interval.'''
        lows = self.minimum + self.step_size * np.arange(self.k)
        return list(zip(lows, lows + self.step_size))


def cluster_init(img, k):
    '''Get starting centers.'''
    _check_k(k)
    img = check_gray(img)
    minimum = float(img.min())
    return ClusterInit(minimum=minimum, i_range=float(img.max()) - minimum,
                       k=k)


def cluster_optimized(img, k, max_iter=100):
    '''Deterministic intensity clustering from evenly spaced centers.

    Lloyd alternation first runs over an exact-sum intensity histogram, then
    finishes with per-pixel passes until no label changes, so the result is
    a pixel-level fixed point.'''
    start = time.perf_counter()
    init = cluster_init(img, k)
    x = np.asarray(img, dtype=np.float64).ravel()

    # Histogram stage:
    scale = _HIST_BINS / init.i_range if init.i_range > 0 else 0.0
    bins = np.minimum(((x - init.minimum) * scale).astype(np.intp),
                      _HIST_BINS - 1)
    counts = np.bincount(bins, minlength=_HIST_BINS)
    sums = np.bincount(bins, weights=x, minlength=_HIST_BINS)
    occupied = counts > 0
    bin_means = sums[occupied] / counts[occupied]

    centers, _, hist_iter, _ = _lloyd(
        bin_means, init.initial_centers, k, max_iter, _assign_sorted,
        counts=counts[occupied], sums=sums[occupied])

    # Pixel refinement:
    centers, labels, pix_iter, converged = _lloyd(
        x, centers, k, max_iter, _assign_sorted)

    iterations = hist_iter + pix_iter - 1
    _LOGGER.debug('optimized: %d histogram + %d pixel iterations',
                  hist_iter, pix_iter)

    return _model(k, centers, labels + 1, img, iterations, converged,
                  start)


def cluster_kmeans(img, k, seed=0, max_iter=100):
    '''Lloyd k-means from k distinct, randomly drawn pixel values.'''
    if max_iter < 1:
        raise ValueError('max_iter must be >= 1')

    start = time.perf_counter()
    x = check_gray(img).ravel()
    centers = _random_centers(x, k, seed)

    centers, labels, iterations, converged = _lloyd(
        x, centers, k, max_iter, _assign_argmin)

    _LOGGER.debug('kmeans: %d iterations, converged %s', iterations,
                  converged)

    return _model(k, centers, labels + 1, img, iterations, converged,
                  start)


def cluster_fcm(img, k, m=2.0, eps=1e-4, seed=0, max_iter=100):
    '''Fuzzy c-means with fuzziness m.'''
    if m <= 1:
        raise ValueError('m must be > 1, got %r' % m)

    if eps <= 0:
        raise ValueError('eps must be > 0')

    start = time.perf_counter()
    x = check_gray(img).ravel()
    centers = _random_centers(x, k, seed)
    converged = False
    iterations = 0

    while iterations < max_iter:
        iterations += 1
        weights = fcm_memberships(x, centers, m) ** m
        totals = weights.sum(axis=0)
        new_centers = np.where(totals > 0,
                               (weights * x[:, None]).sum(axis=0) /
                               np.where(totals > 0, totals, 1.0),
                               centers)
        shift = np.abs(new_centers - centers).max()
        centers = new_centers

        if shift < eps:
            converged = True
            break

    memberships = fcm_memberships(x, centers, m)
    labels = memberships.argmax(axis=1) + 1

    _LOGGER.debug('fcm: %d iterations, converged %s', iterations, converged)

    model = _model(k, centers, labels, img, iterations, converged, start)
    model.memberships = memberships
    return model


def fcm_memberships(x, centers, m):
    '''Membership matrix (pixels x clusters); rows sum to 1.'''
    dist = np.abs(x[:, None] - centers[None, :])
    zero = dist == 0
    singular = zero.any(axis=1)

    power = np.where(zero, 1.0, dist) ** (-2.0 / (m - 1.0))
    memberships = power / power.sum(axis=1, keepdims=True)

    # A pixel sitting on a center belongs to it alone (first such center):
    if singular.any():
        first = zero[singular].argmax(axis=1)
        memberships[singular] = 0.0
        memberships[np.flatnonzero(singular), first] = 1.0

    return memberships


def threshold_otsu_double(img):
    '''Two-threshold Otsu split of the 256-bin histogram into 3 classes.'''
    start = time.perf_counter()
    img = check_gray(img)
    codes = np.rint(img * 255).astype(np.intp)
    t1, t2 = otsu_thresholds(codes)

    labels = 1 + (codes > t1).astype(np.intp) + (codes > t2)
    counts = np.bincount(labels.ravel(), minlength=4)[1:]
    sums = np.bincount(labels.ravel(), weights=img.ravel(), minlength=4)[1:]

    # Empty classes sit at the middle of their code range:
    bounds = [(0, t1), (t1 + 1, t2), (t2 + 1, 255)]
    mids = np.array([min(lo + hi, 510) / 510.0 for lo, hi in bounds])
    centers = np.where(counts > 0, sums / np.maximum(counts, 1), mids)

    _LOGGER.debug('otsu thresholds %d, %d', t1, t2)

    return _model(3, centers, labels.ravel(), img, 1, True, start)


def otsu_thresholds(codes):
    '''Returns (t1, t2) maximising between-class variance.

    Classes are codes <= t1, t1 < codes <= t2 and codes > t2, with
    0 <= t1 < t2 <= 255; the first maximum in (t1, t2) order wins.'''
    hist = np.bincount(np.ravel(codes), minlength=256)[:256]

    if np.count_nonzero(hist) < 2:
        raise DegenerateHistogramError('Histogram has a single occupied bin')

    prob = hist / hist.sum()
    cum_w = np.cumsum(prob)
    cum_m = np.cumsum(prob * np.arange(256))
    total_m = cum_m[-1]

    w0, m0 = cum_w[:, None], cum_m[:, None]
    w1, m1 = cum_w[None, :] - w0, cum_m[None, :] - m0
    w2, m2 = 1.0 - cum_w[None, :], total_m - cum_m[None, :]

    score = _class_term(m0, w0) + _class_term(m1, w1) + _class_term(m2, w2)
    score = np.where(np.triu(np.ones((256, 256), dtype=bool), 1), score,
                     -np.inf)

    t1, t2 = np.unravel_index(np.argmax(score), score.shape)
    return int(t1), int(t2)


def localize(img, model):
    '''Mask of the pixels in the darkest populated cluster.'''
    labels = np.asarray(model.labels)

    if labels.shape != np.shape(img):
        raise ValueError('Model labels do not match image shape')

    populated = np.flatnonzero(model.populations > 0)
    darkest = populated[np.argmin(model.centers[populated])] + 1
    return (labels == darkest).astype(np.uint8)


def run_clusterer(name, img, k, seed=0, max_iter=100, m=2.0, eps=1e-4):
    '''Runs a named clustering algorithm.'''
    if name not in CLUSTERERS:
        raise ValueError('Unknown clustering algorithm: %s' % name)

    if name == 'optimized':
        return cluster_optimized(img, k, max_iter=max_iter)

    if name == 'kmeans':
        return cluster_kmeans(img, k, seed=seed, max_iter=max_iter)

    if name == 'fcm':
        return cluster_fcm(img, k, m=m, eps=eps, seed=seed,
                           max_iter=max_iter)

    return threshold_otsu_double(img)


def cluster_table(model):
    '''Cluster centers and populations as a table.'''
    return pd.DataFrame({'cluster': np.arange(1, model.k + 1),
                         'center': model.centers,
                         'population': model.populations},
                        columns=['cluster', 'center', 'population'])


CLUSTERERS = {'optimized': cluster_optimized,
              'kmeans': cluster_kmeans,
              'fcm': cluster_fcm,
              'otsu': threshold_otsu_double}


def _lloyd(x, centers, k, max_iter, assign, counts=None, sums=None):
    '''Alternates nearest-center assignment and mean update.

    Returns centers, labels (nearest to the returned centers), the number of
    assignment passes that changed labels and a convergence flag.'''
    if counts is None:
        counts = np.ones(len(x))
        sums = x

    centers = np.array(centers, dtype=np.float64)
    labels = assign(x, centers)
    iterations = 1

    while True:
        members = np.bincount(labels, weights=counts, minlength=k)
        totals = np.bincount(labels, weights=sums, minlength=k)
        empty = members == 0

        if empty.any():
            _LOGGER.debug('%d empty cluster(s) keep their center',
                          empty.sum())

        centers = np.where(empty, centers,
                           totals / np.where(empty, 1, members))
        new_labels = assign(x, centers)

        if np.array_equal(new_labels, labels):
            return centers, labels, iterations, True

        labels = new_labels

        if iterations >= max_iter:
            return centers, labels, iterations, False

        iterations += 1


def _assign_argmin(x, centers):
    '''0-based nearest-center labels by squared distance, first wins.'''
    return np.argmin((x[:, None] - centers[None, :]) ** 2, axis=1)


def _assign_sorted(x, centers):
    '''0-based nearest-center labels via midpoints between sorted centers.'''
    order = np.argsort(centers, kind='stable')
    ordered = centers[order]

    # Equal centers resolve to their lowest index:
    keep = np.concatenate([[True], np.diff(ordered) > 0])
    ordered, order = ordered[keep], order[keep]

    mids = (ordered[1:] + ordered[:-1]) / 2.0
    labels = order[np.searchsorted(mids, x, side='left')]

    # Pixels on a midpoint are equidistant; settle them explicitly:
    if len(mids):
        idx = np.searchsorted(mids, x)
        near = np.minimum(
            np.abs(x - mids[np.minimum(idx, len(mids) - 1)]),
            np.abs(x - mids[np.maximum(idx - 1, 0)])) < _TIE_TOL

        if near.any():
            labels[near] = np.argmin(np.abs(x[near, None] - centers[None, :]),
                                     axis=1)

    return labels


def _random_centers(x, k, seed):
    '''Sorted, distinct pixel values drawn by a seeded generator.'''
    _check_k(k)
    rng = np.random.default_rng(seed)
    drawn = x[rng.permutation(x.size)]
    values, first = np.unique(drawn, return_index=True)

    if len(values) < k:
        raise ClusterInitError('Cannot seed %d clusters from %d distinct '
                               'values' % (k, len(values)))

    return np.sort(drawn[np.sort(first)[:k]])


def _class_term(mass, weight):
    '''m^2 / w, taken as 0 for an empty class.'''
    safe = np.where(weight > 1e-15, weight, 1.0)
    return np.where(weight > 1e-15, mass * mass / safe, 0.0)


def _model(k, centers, labels, img, iterations, converged, start):
    '''Packs a ClusterModel from 1-based flat labels.'''
    labels = np.asarray(labels).reshape(np.shape(img))

    return ClusterModel(k=k,
                        centers=np.asarray(centers, dtype=np.float64),
                        labels=labels,
                        iterations=iterations,
                        converged=converged,
                        elapsed=time.perf_counter() - start,
                        populations=np.bincount(labels.ravel(),
                                                minlength=k + 1)[1:],
                        memberships=None)


def _check_k(k):
    '''Validates a cluster count.'''
    if k < 1:
        raise ValueError('k must be >= 1, got %r' % k)
