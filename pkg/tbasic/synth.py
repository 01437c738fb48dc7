# Copyright (c) 2024, the tbasic developers
# All rights reserved.
#
# tbasic is distributed under the BSD 3-Clause License, see LICENSE.

"""
Synthetic corpora with planted diffusion.

A generated corpus holds a power-law follower graph, a learning month of
background tweets, and a test month of sparser chatter in which each planted
topic spreads from a few seed users according to a known diffusion model.
Engaged users tweet often and mostly to someone, so the default planted model
makes them adopt topics far more readily than casual users.  Everything is drawn from
one seeded generator, so equal specs give equal files.

Output directory layout::

    edges.tsv     follower<TAB>followee
    tweets.txt    author_id|epoch_seconds|text
    topics.json   planted topics, windowed on the test month
    truth.json    planted model, seeds and true cascade of every topic
"""

import dataclasses
import json
import logging
import os
from dataclasses import dataclass

import numpy as np

from tbasic.cascade import ActivationEvent, CascadeEdge, SpreadingCascade
from tbasic.corpus import SocialGraph, TweetRecord, build_profiles, write_follow_edges, write_tweets
from tbasic.engine import DiffusionEdges, SimulationConfig, Simulator
from tbasic.features import FEATURE_NAMES
from tbasic.learn import MAX_SIGMA, DiffusionModel
from tbasic.topics import Topic, save_topics
from tbasic.util import InputError, hour_of_day

__all__ = [
    'DIURNAL_TEMPLATES',
    'SynthSpecError',
    'SynthSpec',
    'SynthCorpus',
    'generate',
    'load_spec'
]

_log = logging.getLogger(__name__)

_DAY = 86400

# Share of a user's tweets in each 4 hour bin of the day.
DIURNAL_TEMPLATES = (
    (0.05, 0.05, 0.30, 0.30, 0.20, 0.10),
    (0.05, 0.05, 0.10, 0.20, 0.40, 0.20),
    (0.20, 0.05, 0.05, 0.10, 0.20, 0.40),
    (0.10, 0.20, 0.30, 0.20, 0.10, 0.10),
    (1 / 6, 1 / 6, 1 / 6, 1 / 6, 1 / 6, 1 / 6),
)

_TOPIC_KEYWORDS = (
    ('iphone', 'release'),
    ('google', 'buy'),
    ('copenhagen', 'summit'),
    ('avatar', 'premiere'),
    ('tiger', 'woods'),
    ('snow', 'storm'),
)

_VOCABULARY = tuple('word{}'.format(i) for i in range(60))


def _default_planted_w():
    w = dict.fromkeys(FEATURE_NAMES, 0.0)
    w['activity_dst'] = -2.0
    w['keyword_dst'] = -2.0
    w['directed_ratio_dst'] = -2.0
    return tuple(w[name] for name in FEATURE_NAMES)


class SynthSpecError(InputError):
    """Raised when a generator spec is infeasible."""
    pass


@dataclass(frozen=True)
class SynthSpec:
    """
    Generator parameters.

    The number of users each user follows is drawn from ``P(k) ~ k^-degree_exponent``
    over ``[min_degree, max_degree]``; followees are picked with probability
    proportional to a power-law popularity.

    A share **engaged_share** of the users is engaged: they tweet around
    **engaged_rate** messages a day, mostly to someone, and tend to have tweeted
    about the planted topics before.  The others are casual users tweeting around
    **tweet_rate** messages a day, rarely directed.  Daily rates are lognormal around
    these medians.  In the test month every user tweets at most **tweet_rate** a day.

    .. py:attribute:: mention_alpha

        Casual users mention someone with a ``Beta(mention_alpha, mention_beta)``
        probability; engaged users with ``Beta(mention_beta, mention_alpha)``.

    .. py:attribute:: keyword_prior

        Probability that an engaged user already tweeted a topic's keywords in the
        learning month; **casual_keyword_prior** for a casual user.

    .. py:attribute:: planted_w

        Planted weights, aligned with :py:data:`tbasic.features.FEATURE_NAMES`.
    """

    n_users: int = 200
    degree_exponent: float = 2.3
    min_degree: int = 4
    max_degree: int = 50
    tweet_rate: float = 0.5
    engaged_share: float = 0.25
    engaged_rate: float = 14.0
    rate_spread: float = 0.25
    mention_alpha: float = 1.0
    mention_beta: float = 19.0
    keyword_prior: float = 0.9
    casual_keyword_prior: float = 0.02
    n_topics: int = 1
    n_seeds: int = 3
    seed_window_hours: float = 12.0
    cascade_days: int = 10
    planted_w0: float = 4.0
    planted_w: tuple = dataclasses.field(default_factory=_default_planted_w)
    sigma: float = 7.0
    learn_start: int = 1257033600
    month_days: int = 30
    rng_seed: int = 0

    def __post_init__(self):
        if isinstance(self.planted_w, dict):
            unknown = set(self.planted_w) - set(FEATURE_NAMES)
            if unknown:
                raise SynthSpecError('Unknown planted weight(s): {}.'.format(', '.join(sorted(unknown))))
            object.__setattr__(self, 'planted_w', tuple(float(self.planted_w.get(n, 0.0)) for n in FEATURE_NAMES))
        else:
            object.__setattr__(self, 'planted_w', tuple(float(v) for v in self.planted_w))

        problems = []
        if self.n_users < 2:
            problems.append('n_users must be >= 2')
        if self.degree_exponent <= 1.0:
            problems.append('degree_exponent must be > 1')
        if not 1 <= self.min_degree <= self.max_degree:
            problems.append('need 1 <= min_degree <= max_degree')
        if self.max_degree > self.n_users - 1:
            problems.append('max_degree {} exceeds n_users - 1 = {}'.format(self.max_degree, self.n_users - 1))
        if self.tweet_rate < 0 or self.engaged_rate < 0 or self.rate_spread < 0:
            problems.append('tweet rates must be >= 0')
        if not 0.0 <= self.engaged_share <= 1.0:
            problems.append('engaged_share must be in [0, 1]')
        if self.mention_alpha <= 0 or self.mention_beta <= 0:
            problems.append('mention_alpha and mention_beta must be > 0')
        if not (0.0 <= self.keyword_prior <= 1.0 and 0.0 <= self.casual_keyword_prior <= 1.0):
            problems.append('keyword priors must be in [0, 1]')
        if self.n_topics < 0:
            problems.append('n_topics must be >= 0')
        if not 1 <= self.n_seeds <= self.n_users:
            problems.append('n_seeds must be in [1, n_users]')
        if not 0.0 <= self.seed_window_hours < self.cascade_days * 24:
            problems.append('seed_window_hours must be in [0, cascade_days * 24)')
        if not 1 <= self.cascade_days <= self.month_days:
            problems.append('cascade_days must be in [1, month_days]')
        if not 0.0 < self.sigma <= MAX_SIGMA:
            problems.append('sigma must be in (0, {}]'.format(MAX_SIGMA))
        if len(self.planted_w) != len(FEATURE_NAMES):
            problems.append('planted_w needs {} weights'.format(len(FEATURE_NAMES)))
        if problems:
            raise SynthSpecError('Infeasible synthetic corpus spec: {}.'.format('; '.join(problems)))

    @property
    def planted_model(self):
        return DiffusionModel(w0=self.planted_w0, w=self.planted_w, sigma=self.sigma)

    @property
    def learning_period(self):
        return self.learn_start, self.learn_start + self.month_days * _DAY

    @property
    def test_period(self):
        return self.learning_period[1], self.learning_period[1] + self.month_days * _DAY

    def degree_distribution(self):
        """``(degrees, probabilities)`` of the number of followees per user."""
        degrees = np.arange(self.min_degree, self.max_degree + 1)
        weights = degrees.astype(float) ** -self.degree_exponent
        return degrees, weights / weights.sum()

    def expected_passive_density(self):
        degrees, p = self.degree_distribution()
        return float(np.dot(degrees, p)) / (self.n_users - 1)

    def to_dict(self):
        data = dataclasses.asdict(self)
        data['planted_w'] = dict(zip(FEATURE_NAMES, self.planted_w))
        return data

    @classmethod
    def from_dict(cls, data):
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise SynthSpecError('Unknown spec field(s): {}.'.format(', '.join(sorted(unknown))))
        try:
            return cls(**data)
        except TypeError as err:
            raise SynthSpecError('Invalid spec: {}'.format(err))


def load_spec(path):
    """
    Read a JSON generator spec; missing fields take their defaults.

    :raises: :py:exc:`SynthSpecError` for an invalid document.
    """
    with open(path, encoding='utf-8') as f:
        try:
            data = json.load(f)
        except ValueError as err:
            raise SynthSpecError('"{}" is not valid JSON: {}'.format(path, err))
    if not isinstance(data, dict):
        raise SynthSpecError('"{}" must hold a JSON object.'.format(path))
    return SynthSpec.from_dict(data)


@dataclass(frozen=True)
class SynthCorpus:
    """
    A generated corpus.

    .. py:attribute:: cascades

        True :py:class:`tbasic.cascade.SpreadingCascade` of every planted topic, epoch times.
    """

    spec: SynthSpec
    graph: SocialGraph
    tweets: tuple
    topics: tuple
    cascades: tuple
    profiles: dict
    paths: dict


def _user_ids(n):
    width = len(str(n - 1))
    return tuple('u{:0{}d}'.format(i, width) for i in range(n))


def _follow_graph(spec, users, rng):
    graph = SocialGraph()
    for user in users:
        graph.add_user(user)

    degrees, p = spec.degree_distribution()
    popularity = rng.pareto(spec.degree_exponent - 1.0, size=len(users)) + 1.0
    indices = np.arange(len(users))

    for i, user in enumerate(users):
        k = int(rng.choice(degrees, p=p))
        if k == 0:
            continue
        others = indices[indices != i]
        weights = popularity[others] / popularity[others].sum()
        for j in np.sort(rng.choice(others, size=k, replace=False, p=weights)):
            graph.add_follow(user, users[j])

    return graph


def _tweet_time(day_start, template, rng):
    bin_index = int(rng.choice(len(template), p=template))
    return day_start + bin_index * 4 * 3600 + int(rng.integers(0, 4 * 3600))


def _user_tweets(user, followees, start, days, rate, template, mention_prob, rng):
    count = int(rng.poisson(rate * days))
    if count == 0:
        return []

    timestamps = (start
                  + rng.integers(days, size=count) * _DAY
                  + rng.choice(len(template), size=count, p=template) * 4 * 3600
                  + rng.integers(0, 4 * 3600, size=count))
    directed = rng.random(count) < mention_prob if followees else np.zeros(count, dtype=bool)
    targets = rng.integers(max(len(followees), 1), size=count)
    lengths = rng.integers(3, 7, size=count)
    words = rng.choice(_VOCABULARY, size=(count, 6))

    tweets = []
    for k in range(count):
        text = ' '.join(words[k, :lengths[k]])
        if directed[k]:
            text = '@{} {}'.format(followees[targets[k]], text)
        tweets.append(TweetRecord.create(user, int(timestamps[k]), text))
    return tweets


def _background_tweets(spec, graph, users, topics, rng):
    """Background tweets over both months, plus each user's past topic tweets."""
    n = len(users)
    engaged = rng.random(n) < spec.engaged_share
    rates = np.where(engaged, spec.engaged_rate, spec.tweet_rate) * rng.lognormal(0.0, spec.rate_spread, size=n)
    mention_probs = np.where(engaged,
                             rng.beta(spec.mention_beta, spec.mention_alpha, size=n),
                             rng.beta(spec.mention_alpha, spec.mention_beta, size=n))
    keyword_priors = np.where(engaged, spec.keyword_prior, spec.casual_keyword_prior)
    templates = rng.integers(len(DIURNAL_TEMPLATES), size=n)

    learning_start, test_start = spec.learning_period[0], spec.test_period[0]

    tweets = []
    for i, user in enumerate(users):
        template = DIURNAL_TEMPLATES[templates[i]]
        followees = graph.followees(user)

        learning = _user_tweets(user, followees, learning_start, spec.month_days, rates[i],
                                template, mention_probs[i], rng)
        tweets.extend(learning)
        tweets.extend(_user_tweets(user, followees, test_start, spec.month_days,
                                   min(rates[i], spec.tweet_rate), template, mention_probs[i], rng))

        if not learning:
            continue
        for topic in topics:
            if rng.random() < keyword_priors[i]:
                day_start = learning_start + int(rng.integers(spec.month_days)) * _DAY
                ts = _tweet_time(day_start, template, rng)
                words = ' '.join(rng.choice(_VOCABULARY, size=2))
                tweets.append(TweetRecord.create(user, ts, '{} {}'.format(' '.join(topic.keywords), words)))

    _log.debug('%d of %d users are engaged.', int(engaged.sum()), n)
    return tweets


def _planted_topics(spec):
    topics = []
    for i in range(spec.n_topics):
        keywords = _TOPIC_KEYWORDS[i % len(_TOPIC_KEYWORDS)]
        suffix = '' if i < len(_TOPIC_KEYWORDS) else str(i // len(_TOPIC_KEYWORDS))
        keywords = tuple(k + suffix for k in keywords)
        topics.append(Topic(id='-'.join(keywords), keywords=keywords, window=spec.test_period))
    return topics


def _plant_cascade(spec, graph, profiles, topic, index, users, rng):
    seeded = [u for u in users if graph.followers(u)] or list(users)
    picks = rng.choice(len(seeded), size=min(spec.n_seeds, len(seeded)), replace=False)
    offsets = np.sort(rng.uniform(0.0, spec.seed_window_hours, size=picks.size))
    offsets -= offsets[0]

    # the whole horizon stays inside the test month
    start = spec.test_period[0] + int(rng.integers((spec.month_days - spec.cascade_days) * 24 + 1)) * 3600

    config = SimulationConfig(seeds=tuple((seeded[p], float(o)) for p, o in zip(picks, offsets)),
                              horizon_days=spec.cascade_days,
                              runs=1,
                              rng_seed=spec.rng_seed,
                              clock_origin=hour_of_day(start))
    trace = Simulator(graph, DiffusionEdges(spec.planted_model, profiles, topic), config).run(index)

    times = {user: start + int(round(t * 3600)) for t, user in trace.activations}
    activations = sorted(ActivationEvent(ts, user) for user, ts in times.items())
    edges = tuple(CascadeEdge(a.sender, a.receiver, times[a.receiver]) for a in trace.attempts if a.success)
    influencers = trace.influencers()

    cascade = SpreadingCascade(topic_id=topic.id,
                               roots=tuple(u for _, u in trace.activations if u not in influencers),
                               edges=edges,
                               activations=tuple(activations))

    tweets = [TweetRecord.create(e.user_id, e.time, '{} {}'.format(' '.join(topic.keywords), 'now'))
              for e in activations]
    return cascade, tweets, config


def generate(spec, out_dir=None, helper=None):
    """
    Generate a corpus.

    :param spec: :py:class:`SynthSpec`
    :param out_dir: Optional directory to write the corpus files to.
    :param helper: Optional :py:class:`tbasic.filehelper.FileHelper`.

    :return: :py:class:`SynthCorpus`
    """
    from tbasic.filehelper import FileHelper

    rng = np.random.default_rng(spec.rng_seed)
    users = _user_ids(spec.n_users)

    graph = _follow_graph(spec, users, rng)
    topics = _planted_topics(spec)
    tweets = _background_tweets(spec, graph, users, topics, rng)

    profiles = build_profiles(tweets, graph, spec.learning_period)

    cascades = []
    seeds = []
    for index, topic in enumerate(topics):
        cascade, topic_tweets, config = _plant_cascade(spec, graph, profiles, topic, index, users, rng)
        cascades.append(cascade)
        seeds.append(config)
        tweets.extend(topic_tweets)

    tweets.sort(key=lambda t: (t.timestamp, t.author_id))

    _log.info('Generated %d users, %d follow edges, %d tweets and %d planted topic(s).',
              len(graph), graph.follow_edge_count, len(tweets), len(topics))

    paths = {}
    if out_dir is not None:
        helper = helper or FileHelper()
        helper.makedirs(out_dir, silent=True)
        paths = {name: os.path.join(out_dir, file_name) for name, file_name in
                 (('edges', 'edges.tsv'), ('tweets', 'tweets.txt'),
                  ('topics', 'topics.json'), ('truth', 'truth.json'))}

        write_follow_edges(paths['edges'], graph, helper)
        write_tweets(paths['tweets'], tweets, helper)
        save_topics(paths['topics'], topics, helper)
        helper.write_json(paths['truth'], {
            'spec': spec.to_dict(),
            'model': spec.planted_model.to_dict(),
            'topics': [dict(cascade.to_dict(),
                            seeds=[[u, o] for u, o in config.seeds],
                            clock_origin=config.clock_origin)
                       for cascade, config in zip(cascades, seeds)]
        })

    return SynthCorpus(spec=spec,
                       graph=graph,
                       tweets=tuple(tweets),
                       topics=tuple(topics),
                       cascades=tuple(cascades),
                       profiles=profiles,
                       paths=paths)
