# Copyright (c) 2024, the tbasic developers
# All rights reserved.
#
# tbasic is distributed under the BSD 3-Clause License, see LICENSE.

"""
Spreading topic detection.

Terms are scored by how bursty their 4 hour occurrence vector is, the operator picks
keyword sets from the ranking, and tweets are matched against those keyword sets.

Topic file format (JSON)::

    [{"id": "iphone", "keywords": ["iphone", "release"],
      "window": {"from": "2009-12-01T00:00:00", "to": "2010-01-01T00:00:00"}}]
"""

import json
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass

import numpy as np

from tbasic.corpus import _bin_count
from tbasic.util import InputError, parse_time

__all__ = [
    'NotRecurrentError',
    'TopicFormatError',
    'Topic',
    'TermScore',
    'score_term',
    'rank_terms',
    'cooccurring_terms',
    'match_tweet',
    'real_volume',
    'load_topics',
    'save_topics'
]

_log = logging.getLogger(__name__)


class NotRecurrentError(ValueError):
    """Raised by :py:func:`score_term` for a term absent from at least one time bin.

    .. py:attribute:: term

        The term, or **None** when scoring a bare vector.
    """

    def __init__(self, term=None):
        super().__init__('Term{} is not recurrent: min(O_term) = 0.'
                         .format('' if term is None else ' "{}"'.format(term)))
        self.term = term


class TopicFormatError(InputError):
    """Raised when a topic file or topic definition is invalid."""
    pass


@dataclass(frozen=True)
class Topic:
    """
    A minimal set of co-occurring keywords a related tweet must contain, over a time window.

    **keywords** keeps the order given by the operator, lowercased and without duplicates.
    """

    id: str
    keywords: tuple
    window: tuple

    def __post_init__(self):
        keywords = tuple(dict.fromkeys(k.strip().lower() for k in self.keywords if k.strip()))
        if not keywords:
            raise TopicFormatError('Topic "{}" has no keywords.'.format(self.id))
        if len(self.window) != 2 or self.window[1] <= self.window[0]:
            raise TopicFormatError('Topic "{}" has a degenerate window {}.'.format(self.id, self.window))
        object.__setattr__(self, 'keywords', keywords)
        object.__setattr__(self, 'window', (int(self.window[0]), int(self.window[1])))

    def to_dict(self):
        return {'id': self.id,
                'keywords': list(self.keywords),
                'window': {'from': self.window[0], 'to': self.window[1]}}

    @classmethod
    def from_dict(cls, data):
        try:
            window = data['window']
            keywords = data['keywords']
            if not isinstance(keywords, (list, tuple)):
                raise TopicFormatError('Topic "{}" keywords must be a list, got {!r}.'.format(data['id'], keywords))
            return cls(id=str(data['id']),
                       keywords=tuple(keywords),
                       window=(parse_time(window['from']), parse_time(window['to'])))
        except (KeyError, TypeError) as err:
            raise TopicFormatError('Invalid topic definition {!r}: {}'.format(data, err))


@dataclass(frozen=True)
class TermScore:
    """Interestingness of a term and the statistics of its occurrence vector."""

    term: str
    score: float
    min: int
    max: int
    avg: float
    total: int

    def to_dict(self):
        return {'term': self.term, 'score': self.score, 'min': self.min,
                'max': self.max, 'avg': self.avg, 'total': self.total}


def score_term(occurrences):
    """
    Interestingness of a term from its occurrence vector O::

        (avg(O)^2 + min(O) * max(O)) / (min(O) * avg(O))

    High scores go to terms with a high max/avg ratio and a low min/avg ratio.

    :raises: :py:exc:`NotRecurrentError` if ``min(O) == 0``.
    :raises: :py:exc:`ValueError` if O is empty.
    """
    o = np.asarray(occurrences, dtype=float)
    if o.size == 0:
        raise ValueError('Occurrence vector is empty.')

    low = o.min()
    if low <= 0:
        raise NotRecurrentError()

    avg = o.mean()
    return float((avg * avg + low * o.max()) / (low * avg))


def _occurrence_vectors(tweets, period, bin_hours):
    n_bins = _bin_count(period, bin_hours)
    bin_seconds = bin_hours * 3600
    vectors = defaultdict(lambda: np.zeros(n_bins, dtype=np.int64))

    for tweet in tweets:
        if period[0] <= tweet.timestamp < period[1]:
            index = (tweet.timestamp - period[0]) // bin_seconds
            for term in tweet.tokens:
                vectors[term][index] += 1

    return vectors


def rank_terms(tweets, period, top_k, min_total_count=1, bin_hours=4):
    """
    Rank the terms of a corpus by interestingness.

    Terms occurring fewer than **min_total_count** times, or missing from any bin,
    are left out.  Ties are broken by the term, lexicographically.

    :param tweets: Iterable of :py:class:`tbasic.corpus.TweetRecord`.
    :param period: ``(start, end)`` epoch seconds, binned from **start**.
    :param top_k: Number of terms to return (>= 1).
    :param min_total_count: Minimum total occurrences of a ranked term.
    :param bin_hours: Bin width in hours, must divide 24.

    :return: List of :py:class:`TermScore`, best first.
    """
    if top_k < 1:
        raise ValueError('top_k must be >= 1, got {}.'.format(top_k))

    scores = []
    for term, o in _occurrence_vectors(tweets, period, bin_hours).items():
        total = int(o.sum())
        if total < min_total_count or o.min() == 0:
            continue
        scores.append(TermScore(term=term,
                                score=score_term(o),
                                min=int(o.min()),
                                max=int(o.max()),
                                avg=float(o.mean()),
                                total=total))

    scores.sort(key=lambda s: (-s.score, s.term))
    return scores[:top_k]


def cooccurring_terms(tweets, term, period=None, top=10):
    """
    Terms found most often in the tweets that contain **term**.

    :return: List of ``(term, count)``, highest count first, ties broken by term.
    """
    term = term.lower()
    counts = Counter()
    for tweet in tweets:
        if period is not None and not (period[0] <= tweet.timestamp < period[1]):
            continue
        if term in tweet.tokens:
            counts.update(t for t in tweet.tokens if t != term)

    return sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:top]


def match_tweet(topic, tweet):
    """True if the tweet is inside the topic window and contains every topic keyword."""
    return (topic.window[0] <= tweet.timestamp < topic.window[1]
            and all(k in tweet.tokens for k in topic.keywords))


def real_volume(topic, tweets, start, days, adoptions_only=False):
    """
    Observed daily volume of tweets about a topic, R(t).

    :param start: Epoch seconds of the start of day 1.
    :param days: Number of days.
    :param adoptions_only: Count only the first matching tweet of each user.

    :return: numpy float array of length **days**.
    """
    volume = np.zeros(days, dtype=float)
    seen = set()

    for tweet in sorted(tweets, key=lambda t: (t.timestamp, t.author_id)):
        if not match_tweet(topic, tweet):
            continue
        if adoptions_only:
            if tweet.author_id in seen:
                continue
            seen.add(tweet.author_id)
        day = (tweet.timestamp - start) // 86400
        if 0 <= day < days:
            volume[day] += 1

    return volume


def load_topics(path):
    """
    Read a JSON topic file.

    :raises: :py:exc:`TopicFormatError` if the file is not a JSON array of topics, or ids repeat.
    :return: List of :py:class:`Topic` in file order.
    """
    with open(path, encoding='utf-8') as f:
        try:
            document = json.load(f)
        except ValueError as err:
            raise TopicFormatError('"{}" is not valid JSON: {}'.format(path, err))

    if not isinstance(document, list):
        raise TopicFormatError('"{}" must hold a JSON array of topics.'.format(path))

    topics = [Topic.from_dict(item) for item in document]

    ids = [t.id for t in topics]
    if len(set(ids)) != len(ids):
        raise TopicFormatError('"{}" defines a topic id more than once.'.format(path))

    return topics


def save_topics(path, topics, helper=None):
    """Write topics in the topic file format."""
    from tbasic.filehelper import FileHelper

    helper = helper or FileHelper()
    helper.write_json(path, [t.to_dict() for t in topics])
