'''
(c) University of Liverpool 2020

Licensed under the MIT License.

To view a copy of this license, visit <http://opensource.org/licenses/MIT/>..

@author: neilswainston
'''
# pylint: disable=missing-function-docstring
import numpy as np
import pytest

from liv_vein.evalkit import bench


def test_report_covers_every_algorithm(small_phantom):
    img, _ = small_phantom
    report = bench.bench_clustering(img, 4, reps=3)
    table = report.table()

    assert sorted(report.timings) == sorted(bench.ALGORITHMS)
    assert len(table) == 4
    assert set(table['reps']) == {3}
    assert all(len(timing.runs) == 3 for timing in report.timings.values())
    assert report.to_dict()['height'] == img.shape[0]


def test_too_few_reps(small_phantom):
    img, _ = small_phantom

    with pytest.raises(ValueError):
        bench.bench_clustering(img, 4, reps=2)

    with pytest.raises(ValueError):
        bench.TimingReport(height=1, width=1, k=1, reps=2, seed=0)


def test_labels_digest_repeatable(small_phantom):
    img, _ = small_phantom
    first = bench.bench_clustering(img, 4, reps=3, seed=5)
    second = bench.bench_clustering(img, 4, reps=3, seed=5)

    for algo in bench.ALGORITHMS:
        assert first.timings[algo].digest == second.timings[algo].digest


def test_timing_statistics():
    timing = bench.AlgoTiming(runs=(1.0, 2.0, 3.0), digest='')

    assert timing.mean == pytest.approx(2.0)
    assert timing.variance == pytest.approx(1.0)
    assert timing.std == pytest.approx(1.0)


@pytest.mark.slow
def test_relative_speed(phantom):
    img, _ = phantom
    report = bench.bench_clustering(img, 5, reps=5)
    means = {algo: timing.mean for algo, timing in report.timings.items()}

    assert means['optimized'] <= means['kmeans'] / 2
    assert means['otsu'] <= means['optimized']

    optimized = report.timings['optimized']
    assert optimized.std < 0.5 * optimized.mean


def test_compare_localization(phantom):
    img, truth = phantom
    reports = bench.compare_localization(img, truth, 5)

    assert sorted(reports) == sorted(bench.ALGORITHMS)
    assert reports['optimized'].dice >= 0.6
    assert all(0 <= rep.accuracy <= 1 for rep in reports.values())
    assert np.isfinite(reports['otsu'].f1)
