# Copyright (c) 2024, the tbasic developers
# All rights reserved.
#
# tbasic is distributed under the BSD 3-Clause License, see LICENSE.

"""
The 13 features describing a ``(sender, receiver, topic, time of day)`` exposure.

Every feature lies in ``[0, 1]``.  They cover three dimensions: social
(activity, mentions, directed tweets, homogeneity), topic (has the user tweeted
the topic keywords) and time (receptivity at the hour of exposure).
"""

import csv
import math
from typing import NamedTuple

import numpy as np

from tbasic.cascade import DIFFUSION, NON_DIFFUSION
from tbasic.corpus import UserProfile
from tbasic.util import InputError, hour_of_day

__all__ = [
    'ACTIVITY_SCALE',
    'MENTION_SCALE',
    'KEYWORD_MODES',
    'FEATURE_NAMES',
    'ReceptivityRangeError',
    'FeatureVector',
    'activity',
    'homogeneity',
    'directed_ratio',
    'has_mentioned',
    'mention_rate',
    'has_keyword',
    'receptivity',
    'assemble',
    'instance_matrix',
    'feature_summary',
    'write_feature_matrix',
    'read_feature_matrix'
]

# Messages per month at one message per hour, 30.4 days * 24 hours.
ACTIVITY_SCALE = 729.6

MENTION_SCALE = 200.0

KEYWORD_MODES = ('all', 'first')


class ReceptivityRangeError(ValueError):
    """Raised when a time of day is outside ``[0, 24)``.

    .. py:attribute:: hour

        The offending value.
    """

    def __init__(self, hour):
        super().__init__('Time of day must be in [0, 24), got {}.'.format(hour))
        self.hour = hour


class FeatureVector(NamedTuple):
    """The 13 features, in model weight order."""

    activity_src: float
    activity_dst: float
    keyword_src: float
    keyword_dst: float
    mentioned_src_dst: float
    mentioned_dst_src: float
    mention_rate_src: float
    mention_rate_dst: float
    directed_ratio_src: float
    directed_ratio_dst: float
    receptivity_src: float
    receptivity_dst: float
    homogeneity: float


FEATURE_NAMES = FeatureVector._fields


def activity(profile):
    """I(v): messages per month over :py:data:`ACTIVITY_SCALE`, bounded by 1."""
    return min(profile.message_count / ACTIVITY_SCALE, 1.0)


def homogeneity(profile_x, profile_y):
    """H(x, y): Jaccard index of the sets of users mentioned by x and by y, 0 if both are empty."""
    union = profile_x.mentioned_users | profile_y.mentioned_users
    if not union:
        return 0.0
    return len(profile_x.mentioned_users & profile_y.mentioned_users) / len(union)


def directed_ratio(profile):
    """dTR(v): share of the user's messages that mention someone."""
    if profile.message_count == 0:
        return 0.0
    return profile.directed_count / profile.message_count


def has_mentioned(profile_x, user_y):
    """hM(x, y): 1 if x mentioned y during the learning period."""
    return 1.0 if user_y in profile_x.mentioned_users else 0.0


def mention_rate(profile):
    """mR(v): mentions received over :py:data:`MENTION_SCALE`, bounded by 1."""
    return min(profile.mention_received_count / MENTION_SCALE, 1.0)


def has_keyword(profile, topic, mode='all'):
    """
    hK(v, topic): 1 if the user already tweeted about the topic.

    :param mode: ``'all'``: a single past message held every topic keyword.
                 ``'first'``: the user used the first topic keyword at some point.
    """
    if mode == 'all':
        keywords = topic.keywords
        return 1.0 if any(all(k in terms for k in keywords) for terms in profile.message_terms) else 0.0
    if mode == 'first':
        return 1.0 if topic.keywords[0] in profile.keyword_set else 0.0
    raise ValueError('Unknown keyword mode "{}", expected one of {}.'.format(mode, KEYWORD_MODES))


def receptivity(profile, hour):
    """
    A(v, t): share of the user's messages published in the 4 hour bin holding **hour**.

    :raises: :py:exc:`ReceptivityRangeError` if **hour** is not in ``[0, 24)``.
    """
    if not 0.0 <= hour < 24.0:
        raise ReceptivityRangeError(hour)
    return profile.receptivity[int(hour // 4)]


def assemble(src_profile, dst_profile, topic, hour, keyword_mode='all'):
    """
    Feature vector of the exposure of **dst_profile** to **src_profile** on **topic**
    at **hour** of the day (UTC).

    :return: :py:class:`FeatureVector`
    """
    return FeatureVector(
        activity(src_profile),
        activity(dst_profile),
        has_keyword(src_profile, topic, keyword_mode),
        has_keyword(dst_profile, topic, keyword_mode),
        has_mentioned(src_profile, dst_profile.user_id),
        has_mentioned(dst_profile, src_profile.user_id),
        mention_rate(src_profile),
        mention_rate(dst_profile),
        directed_ratio(src_profile),
        directed_ratio(dst_profile),
        receptivity(src_profile, hour),
        receptivity(dst_profile, hour),
        homogeneity(src_profile, dst_profile))


def instance_matrix(instances, profiles, topics, keyword_mode='all'):
    """
    Feature matrix and labels of labeled instances.

    Users without a profile are treated as inactive during the learning period.

    :param instances: Iterable of :py:class:`tbasic.cascade.LabeledInstance`.
    :param profiles: dict of :py:class:`tbasic.corpus.UserProfile`.
    :param topics: dict mapping topic id to :py:class:`tbasic.topics.Topic`.

    :raises: :py:exc:`tbasic.util.InputError` if an instance names an unknown topic.
    :return: ``(X, y)``: float array of shape ``(n, 13)`` and int array of 0/1 labels.
    """
    rows = []
    labels = []
    for instance in instances:
        topic = topics.get(instance.topic_id)
        if topic is None:
            raise InputError('Instance refers to unknown topic "{}".'.format(instance.topic_id))

        src = profiles.get(instance.sender) or UserProfile.empty(instance.sender)
        dst = profiles.get(instance.receiver) or UserProfile.empty(instance.receiver)
        rows.append(assemble(src, dst, topic, hour_of_day(instance.time), keyword_mode))
        labels.append(1 if instance.is_diffusion else 0)

    X = np.array(rows, dtype=float).reshape(len(rows), len(FEATURE_NAMES))
    return X, np.array(labels, dtype=int)


def feature_summary(X):
    """
    Mean and standard deviation of every feature column.

    :return: dict mapping feature name to ``{'mean': ..., 'std': ...}``, in feature order.
    """
    X = np.asarray(X, dtype=float)
    if X.shape[0] == 0:
        return {name: {'mean': 0.0, 'std': 0.0} for name in FEATURE_NAMES}
    return {name: {'mean': float(X[:, j].mean()), 'std': float(X[:, j].std())}
            for j, name in enumerate(FEATURE_NAMES)}


def write_feature_matrix(path, X, y, helper=None):
    """Write a feature matrix as CSV with the 13 feature columns and a label column."""
    from tbasic.filehelper import FileHelper

    helper = helper or FileHelper()
    helper.write_csv(path, FEATURE_NAMES + ('label',),
                     ([repr(float(v)) for v in row] + [DIFFUSION if label else NON_DIFFUSION]
                      for row, label in zip(X, y)))


def read_feature_matrix(path):
    """
    Read a feature matrix written by :py:func:`write_feature_matrix`.

    :raises: :py:exc:`tbasic.util.InputError` on a bad header, a bad label or a non finite value.
    :return: ``(X, y)`` as returned by :py:func:`instance_matrix`.
    """
    rows = []
    labels = []
    with open(path, encoding='utf-8', newline='') as f:
        reader = csv.reader(f)
        header = tuple(next(reader, None) or ())
        if header != FEATURE_NAMES + ('label',):
            raise InputError('"{}" is not a feature matrix, unexpected header.'.format(path))

        for row_number, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise InputError('{}:{}: expected {} columns.'.format(path, row_number, len(header)))
            try:
                values = [float(v) for v in row[:-1]]
            except ValueError as err:
                raise InputError('{}:{}: {}'.format(path, row_number, err))
            if not all(math.isfinite(v) for v in values):
                raise InputError('{}:{}: non finite feature value.'.format(path, row_number))
            if row[-1] not in (DIFFUSION, NON_DIFFUSION):
                raise InputError('{}:{}: unknown label "{}".'.format(path, row_number, row[-1]))
            rows.append(values)
            labels.append(1 if row[-1] == DIFFUSION else 0)

    X = np.array(rows, dtype=float).reshape(len(rows), len(FEATURE_NAMES))
    return X, np.array(labels, dtype=int)
