# Copyright (c) 2024, the tbasic developers
# All rights reserved.
#
# tbasic is distributed under the BSD 3-Clause License, see LICENSE.

"""
Prediction error metrics.

Series are daily volumes indexed ``t = 1..T``.  Predictions are compared with
the 1-time-lag predictor ``P'(t) = R(t - 1)`` on the days both are defined,
``t = 2..T``.
"""

import csv
from dataclasses import dataclass

import numpy as np

from tbasic.util import InputError

__all__ = [
    'SeriesError',
    'Report',
    'volume_error',
    'dynamics_error',
    'one_time_lag',
    'reduction_and_gain',
    'compare',
    'read_series',
    'write_series',
    'write_prediction',
    'save_report'
]


class SeriesError(InputError):
    """Raised for series of mismatched or too short lengths, or with a zero norm."""
    pass


def _pair(P, R, min_length):
    P = np.asarray(P, dtype=float)
    R = np.asarray(R, dtype=float)
    if P.shape != R.shape or P.ndim != 1:
        raise SeriesError('Series lengths differ: {} vs {}.'.format(P.shape, R.shape))
    if R.size < min_length:
        raise SeriesError('Series need at least {} values, got {}.'.format(min_length, R.size))
    norm = float(np.linalg.norm(R))
    if norm == 0.0:
        raise SeriesError('The real series is all zeros.')
    return P, R, norm


def volume_error(P, R):
    """Relative error on volume: ``||P - R|| / ||R||``."""
    P, R, norm = _pair(P, R, 1)
    return float(np.linalg.norm(P - R)) / norm


def _central_difference(X):
    return (X[2:] - X[:-2]) / 2.0


def dynamics_error(P, R):
    """
    Relative error on dynamics: distance between the central differences of P and R
    over the interior days, over ``||R||``.
    """
    P, R, norm = _pair(P, R, 3)
    return float(np.linalg.norm(_central_difference(R) - _central_difference(P))) / norm


def one_time_lag(R):
    """
    The 1-time-lag prediction of **R**.

    :return: Array of ``R(t - 1)`` for ``t = 2..T``.
    """
    R = np.asarray(R, dtype=float)
    if R.ndim != 1 or R.size < 2:
        raise SeriesError('The 1-time-lag predictor needs at least 2 values.')
    return R[:-1].copy()


def reduction_and_gain(model_volume, baseline_volume, model_dynamics, baseline_dynamics):
    """
    Percentage error reductions over a baseline.

    :return: ``(volume_reduction, dynamics_reduction, overall_gain)``, where the
             overall gain is the mean of the two reductions.
    """
    if baseline_volume <= 0.0 or baseline_dynamics <= 0.0:
        raise SeriesError('Baseline errors must be > 0 to compute reductions.')
    red_volume = 100.0 * (baseline_volume - model_volume) / baseline_volume
    red_dynamics = 100.0 * (baseline_dynamics - model_dynamics) / baseline_dynamics
    return red_volume, red_dynamics, (red_volume + red_dynamics) / 2.0


@dataclass(frozen=True)
class Report:
    """Errors of a prediction and of the 1-time-lag predictor on ``t = 2..T``."""

    volume_error: float
    dynamics_error: float
    baseline_volume_error: float
    baseline_dynamics_error: float
    volume_reduction: float
    dynamics_reduction: float
    overall_gain: float

    def to_dict(self):
        return {
            'volume_error': self.volume_error,
            'dynamics_error': self.dynamics_error,
            'baseline_volume_error': self.baseline_volume_error,
            'baseline_dynamics_error': self.baseline_dynamics_error,
            'volume_reduction': self.volume_reduction,
            'dynamics_reduction': self.dynamics_reduction,
            'overall_gain': self.overall_gain
        }


def compare(P, R):
    """
    Score prediction **P** of the real series **R** against the 1-time-lag predictor.

    :raises: :py:exc:`SeriesError` if the series differ in length, have fewer than 4 days,
             or the baseline is perfect.
    :return: :py:class:`Report`
    """
    P = np.asarray(P, dtype=float)
    R = np.asarray(R, dtype=float)
    if P.shape != R.shape:
        raise SeriesError('Series lengths differ: {} vs {}.'.format(P.shape, R.shape))
    if R.size < 4:
        raise SeriesError('Comparison needs at least 4 days, got {}.'.format(R.size))

    baseline = one_time_lag(R)
    support_P = P[1:]
    support_R = R[1:]

    model_vol = volume_error(support_P, support_R)
    model_dyn = dynamics_error(support_P, support_R)
    base_vol = volume_error(baseline, support_R)
    base_dyn = dynamics_error(baseline, support_R)

    red_vol, red_dyn, overall = reduction_and_gain(model_vol, base_vol, model_dyn, base_dyn)
    return Report(model_vol, model_dyn, base_vol, base_dyn, red_vol, red_dyn, overall)


def read_series(path, column=None):
    """
    Read one column of a daily series CSV with a header row.

    Without **column**, the column is ``predicted_volume`` or ``volume`` if present,
    else the last column.

    :raises: :py:exc:`SeriesError` for an unknown column or a non numeric value.
    :return: float numpy array.
    """
    with open(path, encoding='utf-8', newline='') as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if not header:
            raise SeriesError('"{}" is empty.'.format(path))

        if column is None:
            column = next((c for c in ('predicted_volume', 'volume') if c in header), header[-1])
        if column not in header:
            raise SeriesError('"{}" has no column "{}".'.format(path, column))
        index = header.index(column)

        values = []
        for row_number, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                values.append(float(row[index]))
            except (ValueError, IndexError):
                raise SeriesError('{}:{}: bad value in column "{}".'.format(path, row_number, column))

    return np.array(values, dtype=float)


def write_series(path, values, column='volume', helper=None):
    """Write a daily series as CSV ``day,<column>``, days numbered from 1."""
    from tbasic.filehelper import FileHelper

    helper = helper or FileHelper()
    helper.write_csv(path, ('day', column),
                     ((d, repr(float(v))) for d, v in enumerate(values, start=1)))


def write_prediction(path, values, helper=None):
    """Write a predicted daily volume as CSV ``day,predicted_volume``."""
    write_series(path, values, column='predicted_volume', helper=helper)


def save_report(path, report, helper=None):
    """Write a :py:class:`Report` as JSON."""
    from tbasic.filehelper import FileHelper

    helper = helper or FileHelper()
    helper.write_json(path, report.to_dict())
