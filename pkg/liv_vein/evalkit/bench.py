'''
(c) University of Liverpool 2020

Licensed under the MIT License.

To view a copy of this license, visit <http://opensource.org/licenses/MIT/>..

@author: neilswainston
'''
# pylint: disable=too-many-arguments
from dataclasses import dataclass, field
import hashlib
import logging
import time

import numpy as np
import pandas as pd

from liv_vein import clustering
from liv_vein.evalkit import metrics, reference
from liv_vein.imagecore import check_gray


_LOGGER = logging.getLogger(__name__)

ALGORITHMS = ['optimized', 'kmeans', 'fcm', 'otsu']


@dataclass(frozen=True)
class AlgoTiming:
    '''Timed runs of one algorithm.'''
    runs: tuple
    digest: str

    @property
    def mean(self):
        '''Mean seconds.'''
        return float(np.mean(self.runs))

    @property
    def std(self):
        '''Sample standard deviation, seconds.'''
        return float(np.std(self.runs, ddof=1))

    @property
    def variance(self):
        '''Sample variance, seconds squared.'''
        return float(np.var(self.runs, ddof=1))


@dataclass(frozen=True)
class TimingReport:
    '''Per-algorithm clustering times over repeated runs.'''
    height: int
    width: int
    k: int
    reps: int
    seed: int
    timings: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.reps < 3:
            raise ValueError('reps must be >= 3, got %r' % self.reps)

    def table(self):
        '''One row per algorithm.'''
        return pd.DataFrame(
            [{'algorithm': algo,
              'mean_s': timing.mean,
              'std_s': timing.std,
              'variance_s2': timing.variance,
              'reps': self.reps,
              'height': self.height,
              'width': self.width,
              'reference_s': reference.TIMING[algo],
              'digest': timing.digest}
             for algo, timing in self.timings.items()])

    def to_dict(self):
        '''JSON-ready dict.'''
        return {'height': self.height,
                'width': self.width,
                'k': self.k,
                'reps': self.reps,
                'seed': self.seed,
                'algorithms': {algo: {'runs': list(timing.runs),
                                      'mean': timing.mean,
                                      'std': timing.std,
                                      'variance': timing.variance,
                                      'digest': timing.digest,
                                      'reference': reference.TIMING[algo]}
                               for algo, timing in self.timings.items()}}


def bench_clustering(img, k, reps=5, seed=0, max_iter=100, m=2.0, eps=1e-4):
    '''Times each clustering algorithm reps times after one warm-up run.

    Seeded algorithms draw a fresh seed per rep from the master seed.'''
    img = check_gray(img)

    if reps < 3:
        raise ValueError('reps must be >= 3, got %r' % reps)

    rep_seeds = np.random.default_rng(seed).integers(0, 2 ** 31, size=reps)
    timings = {}

    for algo in ALGORITHMS:
        clustering.run_clusterer(algo, img, k, seed=seed, max_iter=max_iter,
                                 m=m, eps=eps)

        runs = []
        digest = hashlib.sha256()

        for rep_seed in rep_seeds:
            start = time.perf_counter()
            model = clustering.run_clusterer(algo, img, k,
                                             seed=int(rep_seed),
                                             max_iter=max_iter, m=m, eps=eps)
            runs.append(time.perf_counter() - start)
            digest.update(np.ascontiguousarray(model.labels,
                                               dtype=np.int32).tobytes())

        timings[algo] = AlgoTiming(runs=tuple(runs),
                                   digest=digest.hexdigest())
        _LOGGER.info('%s: mean %.5f s over %d reps', algo,
                     timings[algo].mean, reps)

    return TimingReport(height=img.shape[0], width=img.shape[1], k=k,
                        reps=reps, seed=seed, timings=timings)


def compare_localization(img, truth, k, seed=0, max_iter=100, m=2.0,
                         eps=1e-4):
    '''Localization scores of every algorithm against a truth mask.'''
    reports = {}

    for algo in ALGORITHMS:
        model = clustering.run_clusterer(algo, img, k, seed=seed,
                                         max_iter=max_iter, m=m, eps=eps)
        mask = clustering.localize(img, model)
        reports[algo] = metrics.metrics(metrics.confusion(mask, truth))

    return reports
