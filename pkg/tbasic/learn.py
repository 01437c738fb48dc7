# Copyright (c) 2024, the tbasic developers
# All rights reserved.
#
# tbasic is distributed under the BSD 3-Clause License, see LICENSE.

"""
The diffusion function and the time delay.

The probability that an exposure results in diffusion is::

    P(diffusion | F) = 1 / (1 + exp(w0 + sum(w_a * F_a)))

so the probability falls as the linear term rises.  Weights are the maximum a
posteriori estimate under an isotropic Gaussian prior on **w** (L2 penalty of
strength **lam**, the intercept is not penalized), found by accelerated full
batch gradient ascent.

The delay before a receiver reacts is ``(1 - I(receiver)) * sigma`` hours, with
**sigma** fitted by least squares on observed cascade delays.
"""

import dataclasses
import json
import logging
import math
from dataclasses import dataclass

import numpy as np

from tbasic.features import FEATURE_NAMES, activity
from tbasic.util import InputError

__all__ = [
    'MAX_SIGMA',
    'SIGMA_STEP',
    'DEFAULT_SIGMA',
    'ABLATION_GROUPS',
    'TrainingError',
    'DelayCalibrationError',
    'DiffusionModel',
    'predict_probability',
    'predict_matrix',
    'log_likelihood',
    'gradient',
    'train',
    'cross_validate',
    'dimension_ablation',
    'normalized_weights',
    'estimate_delay',
    'sigma_error',
    'grid_sigma',
    'calibrate_sigma',
    'save_model',
    'load_model'
]

_log = logging.getLogger(__name__)

MAX_SIGMA = 24.0
SIGMA_STEP = 0.01
DEFAULT_SIGMA = 10.0

_N_FEATURES = len(FEATURE_NAMES)

_SOCIAL = (0, 1, 4, 5, 6, 7, 8, 9, 12)
_TOPIC = (2, 3)
_TIME = (10, 11)

ABLATION_GROUPS = {
    'social': _SOCIAL,
    'social+topic': tuple(sorted(_SOCIAL + _TOPIC)),
    'social+time': tuple(sorted(_SOCIAL + _TIME)),
    'full': tuple(range(_N_FEATURES))
}

_P_MIN = np.nextafter(0.0, 1.0)
_P_MAX = np.nextafter(1.0, 0.0)


class TrainingError(InputError):
    """Raised when a training set cannot be fitted.

    .. py:attribute:: row

        0 based index of the offending row, or **None**.
    """

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class DelayCalibrationError(InputError):
    """Raised when sigma cannot be identified from the observed delays."""
    pass


@dataclass(frozen=True)
class DiffusionModel:
    """
    Trained diffusion function and delay scale.

    **w** holds one weight per feature, aligned with :py:data:`tbasic.features.FEATURE_NAMES`.
    """

    w0: float
    w: tuple
    sigma: float = DEFAULT_SIGMA
    lam: float = 1.0
    trained_on: object = None
    n_instances: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'w', tuple(float(v) for v in self.w))
        if len(self.w) != _N_FEATURES:
            raise ValueError('Model needs {} weights, got {}.'.format(_N_FEATURES, len(self.w)))
        if not all(math.isfinite(v) for v in self.w + (self.w0,)):
            raise ValueError('Model weights must be finite.')
        if not 0.0 < self.sigma <= MAX_SIGMA:
            raise ValueError('sigma must be in (0, {}], got {}.'.format(MAX_SIGMA, self.sigma))

    def with_sigma(self, sigma):
        """Copy of the model with another delay scale."""
        return dataclasses.replace(self, sigma=float(sigma))

    @property
    def theta(self):
        """Intercept and weights as one numpy vector."""
        return np.array((self.w0,) + self.w, dtype=float)

    def to_dict(self):
        return {'w0': self.w0,
                'w': list(self.w),
                'sigma': self.sigma,
                'lambda': self.lam,
                'trained_on': self.trained_on,
                'n_instances': self.n_instances}

    @classmethod
    def from_dict(cls, data):
        return cls(w0=float(data['w0']),
                   w=tuple(data['w']),
                   sigma=float(data['sigma']),
                   lam=float(data['lambda']),
                   trained_on=data.get('trained_on'),
                   n_instances=int(data.get('n_instances', 0)))


def _probability(z):
    # 1 / (1 + exp(z)) without overflow
    return np.clip(np.exp(-np.logaddexp(0.0, z)), _P_MIN, _P_MAX)


def predict_probability(model, features):
    """
    Probability that the exposure described by **features** results in diffusion.

    :param features: 13 feature values, e.g. a :py:class:`tbasic.features.FeatureVector`.
    :return: float in the open interval ``(0, 1)``.
    """
    if len(features) != _N_FEATURES:
        raise ValueError('Expected {} features, got {}.'.format(_N_FEATURES, len(features)))
    z = model.w0 + sum(w * f for w, f in zip(model.w, features))
    return float(_probability(z))


def predict_matrix(model, X):
    """Vectorized :py:func:`predict_probability` over the rows of **X**."""
    X = np.asarray(X, dtype=float)
    return _probability(model.w0 + X @ np.asarray(model.w))


def _design(X):
    return np.hstack([np.ones((X.shape[0], 1)), X])


def log_likelihood(theta, X, y, lam):
    """
    Penalized log likelihood of ``theta = [w0, w...]`` on **X**, **y**.

    :param X: Feature matrix without the intercept column.
    """
    theta = np.asarray(theta, dtype=float)
    z = _design(np.asarray(X, dtype=float)) @ theta
    y = np.asarray(y, dtype=float)
    # log P(y=1) = -log(1 + e^z), log P(y=0) = -log(1 + e^-z)
    ll = -(y * np.logaddexp(0.0, z) + (1.0 - y) * np.logaddexp(0.0, -z)).sum()
    return float(ll - 0.5 * lam * np.dot(theta[1:], theta[1:]))


def gradient(theta, X, y, lam):
    """Gradient of :py:func:`log_likelihood` with respect to **theta**."""
    theta = np.asarray(theta, dtype=float)
    A = _design(np.asarray(X, dtype=float))
    p = np.exp(-np.logaddexp(0.0, A @ theta))
    g = A.T @ (p - np.asarray(y, dtype=float))
    g[1:] -= lam * theta[1:]
    return g


def _check_training_set(X, y):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)

    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise TrainingError('Feature matrix and labels do not match: {} vs {}.'.format(X.shape, y.shape))

    bad = np.flatnonzero(~np.isfinite(X).all(axis=1))
    if bad.size:
        raise TrainingError('Row {} holds a non finite feature value.'.format(int(bad[0])), row=int(bad[0]))

    if np.unique(y).size < 2:
        raise TrainingError('Training needs both diffusion and non-diffusion instances, got {} instance(s) '
                            'of a single class.'.format(y.shape[0]))

    return X, y.astype(float)


def _fit(X, y, lam, seed, tol, max_epochs):
    n = X.shape[0]
    A = _design(X)

    # Lipschitz constant of the mean gradient
    lipschitz = 0.25 * np.linalg.eigvalsh(A.T @ A / n).max() + lam / n
    step = 1.0 / lipschitz

    rng = np.random.default_rng(seed)
    theta = rng.normal(0.0, 0.01, size=A.shape[1])
    lookahead = theta.copy()
    momentum = 1.0

    g_norm = float('inf')
    epoch = 0
    for epoch in range(1, max_epochs + 1):
        g = gradient(lookahead, X, y, lam) / n
        g_norm = float(np.linalg.norm(g))
        if g_norm < tol:
            theta = lookahead
            break

        updated = lookahead + step * g
        if np.dot(g, updated - theta) < 0.0:
            momentum = 1.0
        next_momentum = (1.0 + math.sqrt(1.0 + 4.0 * momentum * momentum)) / 2.0
        lookahead = updated + ((momentum - 1.0) / next_momentum) * (updated - theta)
        theta = updated
        momentum = next_momentum

    _log.debug('Fitted %d instances in %d epochs, gradient norm %.3g.', n, epoch, g_norm)
    return theta, epoch, g_norm


def train(X, y, lam=1.0, seed=0, sigma=DEFAULT_SIGMA, trained_on=None, tol=1e-8, max_epochs=10000):
    """
    Fit the diffusion function on labeled feature vectors.

    :param X: Feature matrix of shape ``(n, 13)``.
    :param y: Labels, 1 for diffusion and 0 for non-diffusion.
    :param lam: L2 strength (>= 0).
    :param seed: Seed of the initial weights.
    :param sigma: Delay scale stored on the model.
    :param trained_on: Free form description of the training period, stored on the model.
    :param tol: Stop when the norm of the mean gradient falls below this.
    :param max_epochs: Maximum number of full batch iterations.

    :raises: :py:exc:`TrainingError` for a single class set or a non finite feature.
    :return: :py:class:`DiffusionModel`
    """
    if lam < 0:
        raise ValueError('lam must be >= 0, got {}.'.format(lam))

    X, y = _check_training_set(X, y)
    if X.shape[1] != _N_FEATURES:
        raise TrainingError('Expected {} feature columns, got {}.'.format(_N_FEATURES, X.shape[1]))

    theta, epochs, g_norm = _fit(X, y, lam, seed, tol, max_epochs)
    if g_norm >= tol:
        _log.info('Training stopped after %d epochs, gradient norm %.3g.', epochs, g_norm)
    else:
        _log.info('Training converged in %d epochs.', epochs)

    return DiffusionModel(w0=float(theta[0]),
                          w=tuple(float(v) for v in theta[1:]),
                          sigma=sigma,
                          lam=float(lam),
                          trained_on=trained_on,
                          n_instances=int(X.shape[0]))


def _stratified_folds(y, folds, rng):
    assignment = np.empty(y.shape[0], dtype=int)
    for label in np.unique(y):
        members = rng.permutation(np.flatnonzero(y == label))
        assignment[members] = np.arange(members.size) % folds
    return assignment


def cross_validate(X, y, folds=5, lam=1.0, seed=0, columns=None, tol=1e-8, max_epochs=10000):
    """
    Mean accuracy of the diffusion function over a stratified k-fold split.

    An instance is predicted as diffusion when its probability is at least 0.5.

    :param columns: Optional feature column indices to restrict the model to.

    :raises: :py:exc:`TrainingError` as :py:func:`train`, or if there are fewer
             instances than folds.
    :return: float in ``[0, 1]``.
    """
    X, y = _check_training_set(X, y)
    if folds < 2:
        raise ValueError('folds must be >= 2, got {}.'.format(folds))
    if X.shape[0] < folds:
        raise TrainingError('Cross validation needs at least {} instances, got {}.'.format(folds, X.shape[0]))

    if columns is not None:
        X = X[:, list(columns)]

    assignment = _stratified_folds(y, folds, np.random.default_rng(seed))

    accuracies = []
    for fold in range(folds):
        test = assignment == fold
        if not test.any():
            continue
        train_X, train_y = _check_training_set(X[~test], y[~test])
        theta, _, _ = _fit(train_X, train_y, lam, seed, tol, max_epochs)
        p = np.exp(-np.logaddexp(0.0, _design(X[test]) @ theta))
        accuracies.append(float(((p >= 0.5) == (y[test] == 1)).mean()))

    return float(np.mean(accuracies))


def dimension_ablation(X, y, folds=5, lam=1.0, seed=0):
    """
    Cross validated accuracy per feature dimension subset.

    :return: dict mapping each name of :py:data:`ABLATION_GROUPS` to an accuracy.
    """
    return {name: cross_validate(X, y, folds=folds, lam=lam, seed=seed, columns=columns)
            for name, columns in ABLATION_GROUPS.items()}


def normalized_weights(model):
    """``|w_a| / max_b |w_b|`` for every weight; all zeros when every weight is 0."""
    w = np.abs(np.asarray(model.w))
    top = w.max()
    if top == 0.0:
        return tuple(0.0 for _ in w)
    return tuple(float(v) for v in w / top)


def estimate_delay(model, dst_profile):
    """Hours before **dst_profile** reacts to an exposure: ``(1 - I(dst)) * sigma``."""
    return (1.0 - activity(dst_profile)) * model.sigma


def sigma_error(sigma, delays, activities):
    """Euclidean distance between observed delays and the delays predicted with **sigma**."""
    d = np.asarray(delays, dtype=float)
    inactive = 1.0 - np.asarray(activities, dtype=float)
    return float(np.linalg.norm(d - inactive * sigma))


def _delay_terms(delays, activities):
    d = np.asarray(delays, dtype=float)
    inactive = 1.0 - np.asarray(activities, dtype=float)

    if d.size == 0 or d.shape != inactive.shape:
        raise DelayCalibrationError('Calibration needs one activity per delay and at least one delay.')

    denominator = float(np.dot(inactive, inactive))
    if denominator == 0.0:
        raise DelayCalibrationError('Every receiver has activity 1, the delay scale is unidentifiable.')

    return float(np.dot(d, d)), float(np.dot(d, inactive)), denominator


def grid_sigma(delays, activities):
    """
    Multiple of :py:data:`SIGMA_STEP` in ``(0, 24]`` minimizing :py:func:`sigma_error`.

    :raises: :py:exc:`DelayCalibrationError` as :py:func:`calibrate_sigma`.
    """
    squares, numerator, denominator = _delay_terms(delays, activities)
    grid = np.arange(1, int(round(MAX_SIGMA / SIGMA_STEP)) + 1) * SIGMA_STEP
    squared = squares - 2.0 * grid * numerator + grid * grid * denominator
    return float(grid[int(np.argmin(squared))])


def calibrate_sigma(delays, activities):
    """
    Delay scale minimizing :py:func:`sigma_error` over ``(0, 24]``.

    :py:func:`grid_sigma` locates the optimum, which is then refined to the closed
    form least squares value inside the neighbouring grid cells.

    :param delays: Observed diffusion delays in hours.
    :param activities: Activity I of each receiver.

    :raises: :py:exc:`DelayCalibrationError` with no sample, or when every receiver has I = 1.
    :return: sigma in hours.
    """
    _, numerator, denominator = _delay_terms(delays, activities)
    coarse = grid_sigma(delays, activities)

    low = max(coarse - SIGMA_STEP, SIGMA_STEP)
    high = min(coarse + SIGMA_STEP, MAX_SIGMA)
    sigma = min(max(numerator / denominator, low), high)

    _log.info('Calibrated sigma = %.4f h over %d delays (grid optimum %.2f h).', sigma, len(delays), coarse)
    return sigma


def save_model(path, model, helper=None):
    """Write a model as JSON ``{w0, w, sigma, lambda, trained_on, n_instances}``."""
    from tbasic.filehelper import FileHelper

    helper = helper or FileHelper()
    helper.write_json(path, model.to_dict())


def load_model(path):
    """
    Read a model written by :py:func:`save_model`.

    :raises: :py:exc:`tbasic.util.InputError` if the document is not a valid model.
    """
    with open(path, encoding='utf-8') as f:
        try:
            return DiffusionModel.from_dict(json.load(f))
        except (ValueError, KeyError, TypeError) as err:
            raise InputError('"{}" is not a valid model file: {}'.format(path, err))
