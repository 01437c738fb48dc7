# Copyright (c) 2024, the tbasic developers
# All rights reserved.
#
# tbasic is distributed under the BSD 3-Clause License, see LICENSE.

"""
Corpus ingestion: tweet and follow-edge files, the social multi-graph, and
per-user behavioural profiles over a learning period.

Tweet file format, one record per line::

    author_id|epoch_seconds|text

``|`` may not appear in **author_id** and is escaped as ``\\|`` inside **text**.

Edge file format, one pair per line::

    follower<TAB>followee

User identifiers are case insensitive and are lowercased at ingest, so that a
mention of ``@Bob`` refers to the user ``bob``.
"""

import json
import logging
import math
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from tbasic.util import InputError, format_time, hour_of_day

__all__ = [
    'CorpusFormatError',
    'TweetRecord',
    'SocialGraph',
    'UserProfile',
    'NetworkStats',
    'RECEPTIVITY_BINS',
    'tokenize',
    'extract_mentions',
    'load_tweets',
    'write_tweets',
    'load_follow_edges',
    'write_follow_edges',
    'build_profiles',
    'save_profiles',
    'load_profiles',
    'term_occurrence_vector',
    'network_stats',
    'ego_network'
]

_log = logging.getLogger(__name__)

RECEPTIVITY_BINS = 6

_MENTION_RE = re.compile(r'@([A-Za-z0-9_]+)')

# '@', '#', '.' and '-' stay inside a token, so "bit.ly" and "twitpic.com" are one term.
_TOKEN_RE = re.compile(r'[\w@#]+(?:[.\-][\w@#]+)*')


class CorpusFormatError(InputError):
    """Raised when a line of a tweet or edge file cannot be parsed.

    .. py:attribute:: path

        The file being read.

    .. py:attribute:: line_number

        1 based line number of the offending line.
    """

    def __init__(self, path, line_number, reason):
        super().__init__('{}:{}: {}'.format(path, line_number, reason))
        self.path = path
        self.line_number = line_number
        self.reason = reason


def tokenize(text):
    """
    Lowercase a message and split it into terms.

    Splits on whitespace and punctuation, except that ``@``, ``#``, ``.`` and ``-``
    are kept when they sit inside a token.

    :return: frozenset of terms.
    """
    return frozenset(_TOKEN_RE.findall(text.lower()))


def extract_mentions(text):
    """
    Ordered, duplicate free, lowercased list of the users mentioned in **text**
    with the ``@username`` convention.
    """
    return tuple(dict.fromkeys(m.lower() for m in _MENTION_RE.findall(text)))


@dataclass(frozen=True)
class TweetRecord:
    """A single timestamped message.

    Use :py:meth:`TweetRecord.create` to derive **mentions**, **is_directed** and **tokens** from the text.
    """

    author_id: str
    timestamp: int
    text: str
    mentions: tuple = ()
    is_directed: bool = False
    tokens: frozenset = field(default=frozenset(), compare=False, repr=False)

    def __post_init__(self):
        if self.timestamp < 0:
            raise ValueError('Tweet timestamp must be >= 0, got {}.'.format(self.timestamp))
        if len(set(self.mentions)) != len(self.mentions):
            raise ValueError('Tweet mentions contain duplicates: {}.'.format(self.mentions))
        if self.is_directed != (len(self.mentions) > 0):
            raise ValueError('is_directed must be True exactly when the tweet mentions a user.')

    @classmethod
    def create(cls, author_id, timestamp, text):
        """Build a record, parsing mentions and terms from **text**.

        Retweets (``RT @user ...``) carry a mention and so count as directed.
        """
        mentions = extract_mentions(text)
        return cls(author_id=author_id.lower(),
                   timestamp=int(timestamp),
                   text=text,
                   mentions=mentions,
                   is_directed=len(mentions) > 0,
                   tokens=tokenize(text))

    @property
    def hour(self):
        """UTC hour of the day the message was published, in ``[0, 24)``."""
        return hour_of_day(self.timestamp)


def _parse_tweet_line(path, line_number, line):
    author_end = line.find('|')
    if author_end <= 0:
        raise CorpusFormatError(path, line_number, 'expected "author_id|epoch_seconds|text".')

    time_end = line.find('|', author_end + 1)
    if time_end < 0:
        raise CorpusFormatError(path, line_number, 'missing text field.')

    author_id = line[:author_end].strip()
    if not author_id:
        raise CorpusFormatError(path, line_number, 'empty author_id.')

    epoch = line[author_end + 1:time_end].strip()
    if not (epoch.isascii() and epoch.isdigit()):
        raise CorpusFormatError(path, line_number, 'epoch seconds "{}" is not a non-negative integer.'.format(epoch))

    text = line[time_end + 1:].replace('\\|', '|')
    return TweetRecord.create(author_id, int(epoch), text)


def _iter_lines(path):
    with open(path, 'rb') as f:
        for line_number, raw in enumerate(f, start=1):
            try:
                line = raw.decode('utf-8')
            except UnicodeDecodeError:
                raise CorpusFormatError(path, line_number, 'not valid UTF-8.')
            yield line_number, line.rstrip('\r\n')


def load_tweets(path, period=None):
    """
    Read a tweet file.

    :param path: Path of the tweet file.
    :param period: Optional ``(start, end)`` epoch seconds; only records with ``start <= timestamp < end`` are kept.

    :raises: :py:exc:`tbasic.corpus.CorpusFormatError` naming the line of a malformed record.
    :raises: :py:exc:`OSError` if the file cannot be read.

    :return: List of :py:class:`tbasic.corpus.TweetRecord` in file order.
    """
    tweets = []
    for line_number, line in _iter_lines(path):
        if not line.strip():
            continue
        tweet = _parse_tweet_line(path, line_number, line)
        if period is None or period[0] <= tweet.timestamp < period[1]:
            tweets.append(tweet)

    _log.info('Loaded %d tweets from "%s".', len(tweets), path)
    return tweets


def write_tweets(path, tweets, helper=None):
    """Write tweets in the tweet file format (inverse of :py:func:`load_tweets`)."""
    from tbasic.filehelper import FileHelper

    helper = helper or FileHelper()
    helper.write_lines(path, ('{}|{}|{}'.format(t.author_id, t.timestamp,
                                               t.text.replace('\n', ' ').replace('|', '\\|'))
                              for t in tweets))


class SocialGraph:
    """
    Directed multi-graph over users with two sets of edges.

    The passive part holds follow edges ``follower -> followee`` (a
    :py:class:`networkx.DiGraph`, no self loops).  The active part is a multiset of
    timestamped mention edges ``author -> mentioned user``.

    A graph is populated with the **add_** methods at ingest and treated as
    read only afterwards; it can then be shared across threads.

    .. py:attribute:: self_loops_skipped

        Number of self-follow edges rejected by :py:meth:`SocialGraph.add_follow`.
    """

    def __init__(self):
        self._follow = nx.DiGraph()
        self._mentions = []
        self._followers_cache = None
        self._followees_cache = None
        self.self_loops_skipped = 0

    def _invalidate(self):
        self._followers_cache = None
        self._followees_cache = None

    def add_user(self, user):
        """Add an isolated user."""
        self._follow.add_node(user)
        self._invalidate()

    def add_follow(self, follower, followee):
        """
        Add the passive edge **follower** -> **followee**.

        :return: False if the edge was a self loop and has been skipped, True otherwise.
        """
        if follower == followee:
            self.self_loops_skipped += 1
            return False
        self._follow.add_edge(follower, followee)
        self._invalidate()
        return True

    def add_mention(self, author, mentioned, timestamp):
        """Add the active edge **author** -> **mentioned** at **timestamp**."""
        self._follow.add_node(author)
        self._follow.add_node(mentioned)
        self._mentions.append((author, mentioned, timestamp))
        self._invalidate()

    def add_mentions_from(self, tweets):
        """Add every author of **tweets** as a user, and one active edge per mention."""
        for tweet in tweets:
            self._follow.add_node(tweet.author_id)
            for mentioned in tweet.mentions:
                self.add_mention(tweet.author_id, mentioned, tweet.timestamp)
        self._invalidate()

    @property
    def users(self):
        """frozenset of all users (V)."""
        return frozenset(self._follow.nodes)

    @property
    def follow_graph(self):
        """Read only view of the passive part as a :py:class:`networkx.DiGraph`."""
        return self._follow.copy(as_view=True)

    @property
    def follow_edges(self):
        """frozenset of ``(follower, followee)`` pairs."""
        return frozenset(self._follow.edges)

    @property
    def mention_edges(self):
        """Tuple of ``(author, mentioned, timestamp)`` triples, in insertion order."""
        return tuple(self._mentions)

    @property
    def follow_edge_count(self):
        return self._follow.number_of_edges()

    def has_user(self, user):
        return user in self._follow

    def follows(self, follower, followee):
        """True if **follower** follows **followee**."""
        return self._follow.has_edge(follower, followee)

    def followers(self, user):
        """Sorted tuple of the users following **user** (who see the user's posts)."""
        if self._followers_cache is None:
            self._followers_cache = {u: tuple(sorted(self._follow.predecessors(u))) for u in self._follow}
        return self._followers_cache.get(user, ())

    def followees(self, user):
        """Sorted tuple of the users **user** follows."""
        if self._followees_cache is None:
            self._followees_cache = {u: tuple(sorted(self._follow.successors(u))) for u in self._follow}
        return self._followees_cache.get(user, ())

    def subgraph(self, users):
        """A new :py:class:`SocialGraph` restricted to **users**, keeping edges among them."""
        users = set(users)
        sub = SocialGraph()
        sub._follow = self._follow.subgraph(users).copy()
        sub._mentions = [m for m in self._mentions if m[0] in users and m[1] in users]
        return sub

    def __len__(self):
        return self._follow.number_of_nodes()


def load_follow_edges(path):
    """
    Read a follower edge file into a :py:class:`SocialGraph` holding only passive edges.

    Duplicate lines are collapsed.  Self-follow lines are skipped and counted in
    :py:attr:`SocialGraph.self_loops_skipped`.  Blank lines and lines starting with
    ``#`` are ignored.

    :raises: :py:exc:`tbasic.corpus.CorpusFormatError` for a line that is not two tab separated ids.
    :raises: :py:exc:`OSError` if the file cannot be read.
    """
    graph = SocialGraph()
    for line_number, line in _iter_lines(path):
        if not line.strip() or line.startswith('#'):
            continue
        parts = line.split('\t')
        if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
            raise CorpusFormatError(path, line_number, 'expected "follower<TAB>followee".')
        graph.add_follow(parts[0].strip().lower(), parts[1].strip().lower())

    if graph.self_loops_skipped:
        _log.warning('Skipped %d self-follow edge(s) in "%s".', graph.self_loops_skipped, path)

    _log.info('Loaded %d follow edges over %d users from "%s".',
              graph.follow_edge_count, len(graph), path)
    return graph


def write_follow_edges(path, graph, helper=None):
    """Write the passive edges of **graph** in the edge file format, sorted."""
    from tbasic.filehelper import FileHelper

    helper = helper or FileHelper()
    helper.write_lines(path, ('{}\t{}'.format(a, b) for a, b in sorted(graph.follow_edges)))


def _uniform_receptivity():
    return (1.0 / RECEPTIVITY_BINS,) * RECEPTIVITY_BINS


@dataclass(frozen=True)
class UserProfile:
    """
    Monthly behavioural aggregate of one user.

    .. py:attribute:: message_terms

        One frozenset of terms per message of the user, used to test whether a
        single past message held every keyword of a topic.
    """

    user_id: str
    message_count: int = 0
    directed_count: int = 0
    mentioned_users: frozenset = frozenset()
    mention_received_count: int = 0
    keyword_set: frozenset = frozenset()
    receptivity: tuple = field(default_factory=_uniform_receptivity)
    message_terms: tuple = field(default=(), repr=False)

    def __post_init__(self):
        if self.message_count < 0 or self.directed_count < 0 or self.mention_received_count < 0:
            raise ValueError('Profile counts must be >= 0 for user "{}".'.format(self.user_id))
        if self.directed_count > self.message_count:
            raise ValueError('directed_count > message_count for user "{}".'.format(self.user_id))
        if len(self.receptivity) != RECEPTIVITY_BINS:
            raise ValueError('receptivity must have {} bins.'.format(RECEPTIVITY_BINS))
        if any(v < 0.0 or v > 1.0 for v in self.receptivity) or abs(sum(self.receptivity) - 1.0) > 1e-9:
            raise ValueError('receptivity of user "{}" is not a distribution: {}.'
                             .format(self.user_id, self.receptivity))

    @classmethod
    def empty(cls, user_id):
        """Profile of a user with no activity in the period."""
        return cls(user_id=user_id)

    def to_dict(self):
        return {
            'user_id': self.user_id,
            'message_count': self.message_count,
            'directed_count': self.directed_count,
            'mentioned_users': sorted(self.mentioned_users),
            'mention_received_count': self.mention_received_count,
            'keyword_set': sorted(self.keyword_set),
            'receptivity': list(self.receptivity),
            'message_terms': [sorted(terms) for terms in self.message_terms]
        }

    @classmethod
    def from_dict(cls, data):
        return cls(user_id=data['user_id'],
                   message_count=int(data['message_count']),
                   directed_count=int(data['directed_count']),
                   mentioned_users=frozenset(data['mentioned_users']),
                   mention_received_count=int(data['mention_received_count']),
                   keyword_set=frozenset(data['keyword_set']),
                   receptivity=tuple(float(v) for v in data['receptivity']),
                   message_terms=tuple(frozenset(terms) for terms in data.get('message_terms', ())))


def _receptivity(timestamps):
    if not timestamps:
        return _uniform_receptivity()
    bins = np.bincount([int(hour_of_day(ts) // 4) for ts in timestamps], minlength=RECEPTIVITY_BINS)
    return tuple(float(v) for v in bins / bins.sum())


def build_profiles(tweets, graph, period=None):
    """
    Aggregate per-user behaviour over a learning period.

    Every user of **graph**, every author and every mentioned user gets a profile; users
    with no messages get zero counts and a uniform receptivity.

    :param tweets: Iterable of :py:class:`TweetRecord`.
    :param graph: :py:class:`SocialGraph` whose users must all be profiled.
    :param period: Optional ``(start, end)`` epoch seconds restricting the tweets used.

    :return: dict mapping user id to :py:class:`UserProfile`.
    """
    by_author = defaultdict(list)
    received = Counter()

    for tweet in tweets:
        if period is not None and not (period[0] <= tweet.timestamp < period[1]):
            continue
        by_author[tweet.author_id].append(tweet)
        for mentioned in tweet.mentions:
            received[mentioned] += 1

    users = set(graph.users) | set(by_author) | set(received)

    profiles = {}
    for user in sorted(users):
        messages = by_author.get(user, ())
        if not messages and not received[user]:
            profiles[user] = UserProfile.empty(user)
            continue

        mentioned = set()
        keywords = set()
        for message in messages:
            mentioned.update(message.mentions)
            keywords.update(message.tokens)

        profiles[user] = UserProfile(
            user_id=user,
            message_count=len(messages),
            directed_count=sum(1 for m in messages if m.is_directed),
            mentioned_users=frozenset(mentioned),
            mention_received_count=received[user],
            keyword_set=frozenset(keywords),
            receptivity=_receptivity([m.timestamp for m in messages]),
            message_terms=tuple(m.tokens for m in messages))

    if period is not None:
        _log.info('Built %d user profiles from %d authors between %s and %s.',
                  len(profiles), len(by_author), format_time(period[0]), format_time(period[1]))
    else:
        _log.info('Built %d user profiles from %d authors.', len(profiles), len(by_author))
    return profiles


def save_profiles(path, profiles, period=None, helper=None):
    """Write profiles as a JSON snapshot, users in sorted order."""
    from tbasic.filehelper import FileHelper

    helper = helper or FileHelper()
    helper.write_json(path, {
        'period': None if period is None else {'from': period[0], 'to': period[1]},
        'profiles': [profiles[u].to_dict() for u in sorted(profiles)]
    })


def load_profiles(path):
    """
    Read a JSON profile snapshot written by :py:func:`save_profiles`.

    :raises: :py:exc:`tbasic.util.InputError` if the document is not a profile snapshot.
    :return: dict mapping user id to :py:class:`UserProfile`.
    """
    with open(path, encoding='utf-8') as f:
        try:
            document = json.load(f)
            return {p['user_id']: UserProfile.from_dict(p) for p in document['profiles']}
        except (ValueError, KeyError, TypeError) as err:
            raise InputError('"{}" is not a valid profile snapshot: {}'.format(path, err))


def _bin_count(period, bin_hours):
    if bin_hours <= 0 or 24 % bin_hours != 0:
        raise ValueError('bin_hours must divide 24, got {}.'.format(bin_hours))
    span = period[1] - period[0]
    if span <= 0:
        raise ValueError('Empty period {}.'.format(period))
    return int(math.ceil(span / (bin_hours * 3600.0)))


def term_occurrence_vector(tweets, term, period, bin_hours=4):
    """
    Count, per time bin, the tweets containing **term** (O_term).

    Bins are **bin_hours** long, aligned to the period start, in UTC.

    :raises: :py:exc:`ValueError` if the period is empty or **bin_hours** does not divide 24.
    :return: numpy int array of length ``ceil(period_span / bin_hours)``.
    """
    counts = np.zeros(_bin_count(period, bin_hours), dtype=np.int64)
    bin_seconds = bin_hours * 3600
    term = term.lower()

    for tweet in tweets:
        if period[0] <= tweet.timestamp < period[1] and term in tweet.tokens:
            counts[(tweet.timestamp - period[0]) // bin_seconds] += 1

    return counts


@dataclass(frozen=True)
class NetworkStats:
    """Size and density description of a social network."""

    users: int
    tweets: int
    follow_edges: int
    active_density: float
    passive_density: float

    def to_dict(self):
        return {
            'users': self.users,
            'tweets': self.tweets,
            'follow_edges': self.follow_edges,
            'active_density': self.active_density,
            'passive_density': self.passive_density
        }


def network_stats(graph, tweets=()):
    """
    Describe a network: user, tweet and follow edge counts, and the densities of the
    active part (distinct mention pairs) and of the passive part (follow edges).

    Densities are relative to the ``n(n-1)`` possible directed pairs.
    """
    tweets = list(tweets)
    users = set(graph.users) | {t.author_id for t in tweets}
    active_pairs = {(t.author_id, m) for t in tweets for m in t.mentions if m != t.author_id}
    active_pairs.update((a, b) for a, b, _ in graph.mention_edges if a != b)
    users.update(p for pair in active_pairs for p in pair)

    n = len(users)
    pairs = n * (n - 1)

    return NetworkStats(users=n,
                        tweets=len(tweets),
                        follow_edges=graph.follow_edge_count,
                        active_density=len(active_pairs) / pairs if pairs else 0.0,
                        passive_density=graph.follow_edge_count / pairs if pairs else 0.0)


def ego_network(graph, user, hops=2):
    """
    The sub-network of every user at most **hops** follow links away from **user**,
    whatever the direction of the links.

    :raises: :py:exc:`tbasic.util.InputError` if **user** is not in the graph.
    :return: :py:class:`SocialGraph`
    """
    if not graph.has_user(user):
        raise InputError('User "{}" is not in the graph.'.format(user))
    members = nx.ego_graph(graph.follow_graph, user, radius=hops, undirected=True).nodes
    return graph.subgraph(members)
