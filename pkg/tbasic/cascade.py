# Copyright (c) 2024, the tbasic developers
# All rights reserved.
#
# tbasic is distributed under the BSD 3-Clause License, see LICENSE.

"""
Activation sequences, spreading cascades and labeled learning instances.

A user is activated on a topic by their first matching tweet.  Each activated
user is attributed to the followee that adopted the topic most recently before
them (Last Influence); users with no earlier activated followee are roots.
"""

import csv
import json
import logging
from dataclasses import dataclass

import numpy as np

from tbasic.topics import match_tweet
from tbasic.util import InputError

__all__ = [
    'DIFFUSION',
    'NON_DIFFUSION',
    'INSTANCE_HEADER',
    'ActivationEvent',
    'CascadeEdge',
    'SpreadingCascade',
    'LabeledInstance',
    'activation_sequence',
    'reconstruct_cascade',
    'generate_instances',
    'balance_instances',
    'delay_samples',
    'save_cascade',
    'load_cascade',
    'write_instances',
    'read_instances'
]

_log = logging.getLogger(__name__)

DIFFUSION = 'diffusion'
NON_DIFFUSION = 'non-diffusion'

INSTANCE_HEADER = ('sender', 'receiver', 'topic_id', 'epoch', 'label')


@dataclass(frozen=True, order=True)
class ActivationEvent:
    """First adoption of a topic by a user.  Orders by ``(time, user_id)``."""

    time: int
    user_id: str


@dataclass(frozen=True)
class CascadeEdge:
    """Influence of **src** on **dst**, who adopted the topic at **time**."""

    src: str
    dst: str
    time: int


@dataclass(frozen=True)
class SpreadingCascade:
    """
    Influence forest over the activated users of a topic.

    .. py:attribute:: roots

        Users with no earlier activated followee, in activation order.

    .. py:attribute:: edges

        :py:class:`CascadeEdge` tuple in adopter activation order.

    .. py:attribute:: activations

        The activation sequence the cascade was built from.
    """

    topic_id: str
    roots: tuple
    edges: tuple
    activations: tuple = ()

    def activation_times(self):
        """dict mapping each activated user to their activation time."""
        return {e.user_id: e.time for e in self.activations}

    def influencer(self, user):
        """The user that activated **user**, or **None** for a root or an unknown user."""
        for edge in self.edges:
            if edge.dst == user:
                return edge.src
        return None

    def to_dict(self):
        return {
            'topic_id': self.topic_id,
            'roots': list(self.roots),
            'edges': [{'src': e.src, 'dst': e.dst, 't': e.time} for e in self.edges],
            'activations': [{'user': e.user_id, 't': e.time} for e in self.activations]
        }

    @classmethod
    def from_dict(cls, data):
        return cls(topic_id=data['topic_id'],
                   roots=tuple(data['roots']),
                   edges=tuple(CascadeEdge(e['src'], e['dst'], int(e['t'])) for e in data['edges']),
                   activations=tuple(ActivationEvent(int(e['t']), e['user'])
                                     for e in data.get('activations', ())))


@dataclass(frozen=True)
class LabeledInstance:
    """A ``(sender, receiver, time)`` triple labeled diffusion or non-diffusion for a topic."""

    sender: str
    receiver: str
    topic_id: str
    time: int
    label: str

    def __post_init__(self):
        if self.sender == self.receiver:
            raise ValueError('Instance sender and receiver are both "{}".'.format(self.sender))
        if self.label not in (DIFFUSION, NON_DIFFUSION):
            raise ValueError('Unknown instance label "{}".'.format(self.label))

    @property
    def is_diffusion(self):
        return self.label == DIFFUSION


def activation_sequence(topic, tweets):
    """
    Users ordered by their first tweet about **topic**.

    :param topic: :py:class:`tbasic.topics.Topic`
    :param tweets: Iterable of :py:class:`tbasic.corpus.TweetRecord`.

    :return: List of :py:class:`ActivationEvent`, sorted by time then user id.
    """
    first = {}
    for tweet in tweets:
        if match_tweet(topic, tweet):
            seen = first.get(tweet.author_id)
            if seen is None or tweet.timestamp < seen:
                first[tweet.author_id] = tweet.timestamp

    return sorted(ActivationEvent(t, u) for u, t in first.items())


def reconstruct_cascade(sequence, graph, topic_id=''):
    """
    Build the spreading cascade of an activation sequence with the Last Influence rule.

    The influencer of an activated user is the followee with the latest activation
    strictly before theirs; equal times go to the smaller user id.

    :param sequence: :py:class:`ActivationEvent` list sorted ascending.
    :param graph: :py:class:`tbasic.corpus.SocialGraph`
    :param topic_id: Recorded on the cascade.

    :return: :py:class:`SpreadingCascade`
    """
    times = {e.user_id: e.time for e in sequence}
    roots = []
    edges = []

    for event in sequence:
        best = None
        for followee in graph.followees(event.user_id):
            t = times.get(followee)
            if t is None or t >= event.time:
                continue
            # followees are sorted, so a strict comparison keeps the smaller id on ties
            if best is None or t > best[0]:
                best = (t, followee)

        if best is None:
            roots.append(event.user_id)
        else:
            edges.append(CascadeEdge(best[1], event.user_id, event.time))

    return SpreadingCascade(topic_id=topic_id,
                            roots=tuple(roots),
                            edges=tuple(edges),
                            activations=tuple(sequence))


def balance_instances(instances, seed):
    """
    Subsample the majority class uniformly down to the minority class size.

    The kept instances stay in their original order.  Equal inputs and seeds give
    equal outputs.

    :return: List of :py:class:`LabeledInstance` with equal class counts.
    """
    positive = [i for i in instances if i.is_diffusion]
    negative = [i for i in instances if not i.is_diffusion]

    size = min(len(positive), len(negative))
    rng = np.random.default_rng(seed)

    def sample(items):
        if len(items) == size:
            return items
        keep = np.sort(rng.choice(len(items), size=size, replace=False))
        return [items[k] for k in keep]

    return sample(positive) + sample(negative)


def generate_instances(cascade, sequence, graph, topic, balance_seed):
    """
    Label the exposures of a topic.

    Diffusion instances are the cascade edges, timed at the adopter's activation.
    Non-diffusion instances are pairs ``(u, w)`` where **w** follows the activated
    user **u** and never activated, timed at **u**'s activation.

    :return: Balanced list of :py:class:`LabeledInstance`, diffusion first; empty
             when the cascade has no edges.
    """
    if not cascade.edges:
        _log.warning('Topic "%s" has no diffusion edges, no instances generated.', topic.id)
        return []

    activated = {e.user_id for e in sequence}

    instances = [LabeledInstance(e.src, e.dst, topic.id, e.time, DIFFUSION) for e in cascade.edges]
    for event in sequence:
        for follower in graph.followers(event.user_id):
            if follower not in activated:
                instances.append(LabeledInstance(event.user_id, follower, topic.id,
                                                 event.time, NON_DIFFUSION))

    balanced = balance_instances(instances, balance_seed)
    if not balanced:
        _log.warning('Topic "%s" has no non-diffusion pairs, balanced set is empty.', topic.id)

    return balanced


def delay_samples(cascades, profiles):
    """
    Observed diffusion delays of cascade edges.

    :param cascades: Iterable of :py:class:`SpreadingCascade`.
    :param profiles: dict of :py:class:`tbasic.corpus.UserProfile`; missing users count as inactive.

    :return: List of ``(delay_hours, activity_of_receiver)``.
    """
    from tbasic.features import activity

    samples = []
    for cascade in cascades:
        times = cascade.activation_times()
        for edge in cascade.edges:
            profile = profiles.get(edge.dst)
            samples.append(((edge.time - times[edge.src]) / 3600.0,
                            activity(profile) if profile is not None else 0.0))
    return samples


def save_cascade(path, cascade, helper=None):
    """Write a cascade as JSON ``{topic_id, roots, edges: [{src, dst, t}], activations}``."""
    from tbasic.filehelper import FileHelper

    helper = helper or FileHelper()
    helper.write_json(path, cascade.to_dict())


def load_cascade(path):
    """
    Read a cascade written by :py:func:`save_cascade`.

    :raises: :py:exc:`tbasic.util.InputError` if the document is not a cascade.
    """
    with open(path, encoding='utf-8') as f:
        try:
            return SpreadingCascade.from_dict(json.load(f))
        except (ValueError, KeyError, TypeError) as err:
            raise InputError('"{}" is not a valid cascade file: {}'.format(path, err))


def write_instances(path, instances, helper=None):
    """Write instances as CSV ``sender,receiver,topic_id,epoch,label``."""
    from tbasic.filehelper import FileHelper

    helper = helper or FileHelper()
    helper.write_csv(path, INSTANCE_HEADER,
                     ((i.sender, i.receiver, i.topic_id, i.time, i.label) for i in instances))


def read_instances(path):
    """
    Read an instance CSV written by :py:func:`write_instances`.

    :raises: :py:exc:`tbasic.util.InputError` on a bad header or row.
    """
    instances = []
    with open(path, encoding='utf-8', newline='') as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if tuple(header or ()) != INSTANCE_HEADER:
            raise InputError('"{}" does not start with the header {}.'.format(path, ','.join(INSTANCE_HEADER)))
        for row_number, row in enumerate(reader, start=2):
            try:
                sender, receiver, topic_id, epoch, label = row
                instances.append(LabeledInstance(sender, receiver, topic_id, int(epoch), label))
            except ValueError as err:
                raise InputError('{}:{}: {}'.format(path, row_number, err))
    return instances
