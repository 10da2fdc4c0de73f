'''
(c) University of Liverpool 2020

Licensed under the MIT License.

To view a copy of this license, visit <http://opensource.org/licenses/MIT/>..

@author: neilswainston
'''
# pylint: disable=invalid-name
# pylint: disable=too-many-instance-attributes
from dataclasses import asdict, dataclass
import logging
import math

import numpy as np
import pandas as pd

from liv_vein.imagecore import check_mask


_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class QualityReport:
    '''Image quality of a processed image against its reference.'''
    mse: float
    psnr: float
    snr: float

    @property
    def psnr_infinite(self):
        '''Images are identical.'''
        return math.isinf(self.psnr)

    @property
    def snr_degenerate(self):
        '''Processed image is constant.'''
        return math.isnan(self.snr)


@dataclass(frozen=True)
class ConfusionCounts:
    '''Pixel confusion counts.'''
    tp: int
    tn: int
    fp: int
    fn: int

    @property
    def total(self):
        '''Pixels compared.'''
        return self.tp + self.tn + self.fp + self.fn


@dataclass(frozen=True)
class MetricReport:
    '''Mask scores as ratios; degenerate lists zero-denominator scores.'''
    accuracy: float
    accuracy_tp_ratio: float
    precision: float
    recall: float
    f1: float
    dice: float
    specificity: float
    degenerate: tuple = ()

    def to_dict(self):
        '''Flat dict with the degenerate list joined.'''
        values = asdict(self)
        values['degenerate'] = ';'.join(self.degenerate)
        return values


def mse(a, b):
    '''Mean squared difference.'''
    a, b = _pair(a, b)
    return float(np.mean((a - b) ** 2))


def psnr(a, b, max_i=1.0):
    '''Peak signal-to-noise ratio in dB; inf for identical images.'''
    if max_i <= 0:
        raise ValueError('max_i must be > 0')

    err = mse(a, b)

    if err == 0:
        return math.inf

    return 10.0 * math.log10(max_i * max_i / err)


def snr(a):
    '''10 log10(mean / std) in dB; nan for a constant image.'''
    a = np.asarray(a, dtype=np.float64)
    std = a.std()

    if std == 0:
        _LOGGER.warning('SNR undefined for a constant image')
        return math.nan

    return 10.0 * math.log10(a.mean() / std)


def quality(reference, processed, max_i=1.0):
    '''MSE and PSNR of processed against reference, SNR of processed.'''
    return QualityReport(mse=mse(reference, processed),
                         psnr=psnr(reference, processed, max_i),
                         snr=snr(processed))


def confusion(pred, truth):
    '''Pixel-level confusion counts of a predicted mask.'''
    pred, truth = check_mask(pred), check_mask(truth)

    if pred.shape != truth.shape:
        raise ValueError('Mask shapes differ: %s vs %s'
                         % (pred.shape, truth.shape))

    pred, truth = pred.astype(bool), truth.astype(bool)

    return ConfusionCounts(tp=int(np.sum(pred & truth)),
                           tn=int(np.sum(~pred & ~truth)),
                           fp=int(np.sum(pred & ~truth)),
                           fn=int(np.sum(~pred & truth)))


def metrics(c):
    '''Accuracy, precision, recall, f1, dice and specificity.'''
    if c.total <= 0:
        raise ValueError('No pixels compared')

    degenerate = []

    def _ratio(name, num, den):
        if den == 0:
            degenerate.append(name)
            return 0.0

        return num / den

    accuracy = _ratio('accuracy', c.tp + c.tn, c.total)
    tp_ratio = _ratio('accuracy_tp_ratio', c.tp, c.tp + c.tn)
    precision = _ratio('precision', c.tp, c.tp + c.fp)
    recall = _ratio('recall', c.tp, c.tp + c.fn)
    f1 = _ratio('f1', 2 * c.tp, 2 * c.tp + c.fp + c.fn)
    specificity = _ratio('specificity', c.tn, c.tn + c.fp)

    return MetricReport(accuracy=accuracy,
                        accuracy_tp_ratio=tp_ratio,
                        precision=precision,
                        recall=recall,
                        f1=f1,
                        dice=f1,
                        specificity=specificity,
                        degenerate=tuple(degenerate))


def dice(pred, truth):
    '''2|A & B| / (|A| + |B|).'''
    return metrics(confusion(pred, truth)).dice


def report_table(reports):
    '''One row per named MetricReport.'''
    rows = []

    for name, report in reports.items():
        row = {'name': name}
        row.update(report.to_dict())
        rows.append(row)

    return pd.DataFrame(rows)


def _pair(a, b):
    '''Two same-shaped float arrays.'''
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)

    if a.shape != b.shape:
        raise ValueError('Image shapes differ: %s vs %s' % (a.shape, b.shape))

    return a, b
