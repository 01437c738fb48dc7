# Copyright (c) 2024, the tbasic developers
# All rights reserved.
#
# tbasic is distributed under the BSD 3-Clause License, see LICENSE.

"""
Continuous time cascade simulation.

Activating a user at time ``t`` schedules one delivery attempt to each of their
followers at ``t + delay``.  At delivery, a follower that is still inactive
activates with the edge probability for the time of day.  Each directed edge is
attempted at most once per run, activated users never deactivate, and every
activation accounts for one tweet.

Time is measured in hours from the start of the simulation.  The time of day of
a simulation time ``t`` is ``(clock_origin + t) mod 24``.
"""

import concurrent.futures
import dataclasses
import heapq
import logging
from dataclasses import dataclass

import numpy as np

from tbasic.corpus import UserProfile
from tbasic.evaluation import SeriesError, compare
from tbasic.features import assemble
from tbasic.learn import estimate_delay, predict_probability
from tbasic.util import InputError, hour_of_day

__all__ = [
    'EVALUATE_AT',
    'RESULT_HEADER',
    'UnknownSeedError',
    'SimulationConfig',
    'EdgeModel',
    'DiffusionEdges',
    'ConstantEdges',
    'PendingAttempt',
    'Attempt',
    'ActivationTrace',
    'RoleCount',
    'SimulationResult',
    'Simulator',
    'simulate_once',
    'simulate',
    'classify_roles',
    'seeds_from_sequence',
    'sweep_seed_sizes',
    'SweepResult',
    'write_result'
]

_log = logging.getLogger(__name__)

EVALUATE_AT = ('delivery', 'send')

RESULT_HEADER = ('day', 'predicted_volume', 'transmitter_density', 'stifler_density')


class UnknownSeedError(InputError):
    """Raised when a seed user is not part of the social graph.

    .. py:attribute:: user

        The unknown seed user.
    """

    def __init__(self, user):
        super().__init__('Seed user "{}" is not in the social graph.'.format(user))
        self.user = user


@dataclass(frozen=True)
class SimulationConfig:
    """
    Parameters of a simulation.

    .. py:attribute:: seeds

        ``(user_id, offset_hours)`` pairs; each seed activates at its offset.

    .. py:attribute:: clock_origin

        Hour of the day (UTC) at simulation time 0.

    .. py:attribute:: evaluate_at

        ``'delivery'`` evaluates the edge probability at delivery time, ``'send'`` at
        the sender's activation time.
    """

    seeds: tuple = ()
    horizon_days: int = 10
    runs: int = 100
    rng_seed: int = 42
    clock_origin: float = 0.0
    evaluate_at: str = 'delivery'
    jobs: int = 1

    def __post_init__(self):
        object.__setattr__(self, 'seeds', tuple((str(u), float(o)) for u, o in self.seeds))
        if self.horizon_days < 1:
            raise ValueError('horizon_days must be >= 1, got {}.'.format(self.horizon_days))
        if self.runs < 1:
            raise ValueError('runs must be >= 1, got {}.'.format(self.runs))
        if self.jobs < 1:
            raise ValueError('jobs must be >= 1, got {}.'.format(self.jobs))
        if not 0.0 <= self.clock_origin < 24.0:
            raise ValueError('clock_origin must be in [0, 24), got {}.'.format(self.clock_origin))
        if self.evaluate_at not in EVALUATE_AT:
            raise ValueError('evaluate_at must be one of {}, got "{}".'.format(EVALUATE_AT, self.evaluate_at))
        for user, offset in self.seeds:
            if not 0.0 <= offset < self.horizon:
                raise ValueError('Seed "{}" offset {} h is outside [0, {}).'.format(user, offset, self.horizon))

    @property
    def horizon(self):
        """Horizon in hours."""
        return self.horizon_days * 24.0

    def time_of_day(self, t):
        """Hour of the day at simulation time **t**."""
        return (self.clock_origin + t) % 24.0


class EdgeModel:
    """
    Probability and delay of the delivery attempts along follow edges.

    Implementations must be safe to call from several threads.
    """

    def probability(self, sender, receiver, hour):
        """Probability that **receiver** activates when reached by **sender** at **hour** of the day."""
        raise NotImplementedError()

    def delay(self, sender, receiver):
        """Hours between the activation of **sender** and the attempt on **receiver**."""
        raise NotImplementedError()


class DiffusionEdges(EdgeModel):
    """Edge model driven by a trained :py:class:`tbasic.learn.DiffusionModel` on one topic."""

    def __init__(self, model, profiles, topic, keyword_mode='all'):
        self._model = model
        self._profiles = profiles
        self._topic = topic
        self._keyword_mode = keyword_mode
        self._cache = {}

    def _profile(self, user):
        profile = self._profiles.get(user)
        return profile if profile is not None else UserProfile.empty(user)

    def probability(self, sender, receiver, hour):
        # only the receptivity features depend on the hour, and only through its 4 hour bin
        key = (sender, receiver, int(hour // 4))
        p = self._cache.get(key)
        if p is None:
            features = assemble(self._profile(sender), self._profile(receiver),
                                self._topic, hour, self._keyword_mode)
            p = predict_probability(self._model, features)
            self._cache[key] = p
        return p

    def delay(self, sender, receiver):
        return estimate_delay(self._model, self._profile(receiver))


class ConstantEdges(EdgeModel):
    """
    Edge model with fixed probabilities and delays.

    :param p: Probability of every edge not listed in **edges**.
    :param delay: Delay of every edge, in hours.
    :param edges: Optional dict mapping ``(sender, receiver)`` to a probability.
    """

    def __init__(self, p, delay=0.0, edges=None):
        self._p = p
        self._delay = delay
        self._edges = dict(edges or {})

    def probability(self, sender, receiver, hour):
        return self._edges.get((sender, receiver), self._p)

    def delay(self, sender, receiver):
        return self._delay


@dataclass(frozen=True, order=True)
class PendingAttempt:
    """A scheduled delivery.  Orders by delivery time, then scheduling order."""

    delivery_time: float
    sequence: int
    sender: str = dataclasses.field(compare=False)
    receiver: str = dataclasses.field(compare=False)
    sent_at: float = dataclasses.field(compare=False)


@dataclass(frozen=True)
class Attempt:
    """
    A delivered attempt.

    **success** is **None** when the receiver was already active at delivery and no
    draw took place.
    """

    sender: str
    receiver: str
    time: float
    success: object


@dataclass(frozen=True)
class ActivationTrace:
    """
    Outcome of one run.

    .. py:attribute:: activations

        ``(time, user_id)`` pairs in activation order.

    .. py:attribute:: attempts

        :py:class:`Attempt` tuple in delivery order.
    """

    activations: tuple
    attempts: tuple
    horizon_days: int

    def daily_counts(self):
        """Activations per day over the horizon, as a float array."""
        counts = np.zeros(self.horizon_days, dtype=float)
        for t, _ in self.activations:
            counts[int(t // 24.0)] += 1
        return counts

    def influencers(self):
        """dict mapping each user activated by an attempt to the attempt sender."""
        return {a.receiver: a.sender for a in self.attempts if a.success}


@dataclass(frozen=True)
class RoleCount:
    """Transmitters and stiflers among the users activated before the end of a day."""

    day: int
    transmitters: int
    stiflers: int

    @property
    def activated(self):
        return self.transmitters + self.stiflers

    @property
    def transmitter_density(self):
        return self.transmitters / self.activated if self.activated else 0.0

    @property
    def stifler_density(self):
        return self.stiflers / self.activated if self.activated else 0.0


@dataclass(frozen=True)
class SimulationResult:
    """
    Aggregate of the Monte-Carlo runs.

    .. py:attribute:: daily_volume

        Mean number of tweets per day, the predicted volume.

    .. py:attribute:: transmitter_density

        Per day, transmitters over activated users, pooled over runs.
    """

    daily_volume: np.ndarray
    transmitter_density: np.ndarray
    stifler_density: np.ndarray
    traces: tuple

    def rows(self):
        """Rows of the result file, days numbered from 1."""
        return [(d + 1, repr(float(v)), repr(float(t)), repr(float(s)))
                for d, (v, t, s) in enumerate(zip(self.daily_volume,
                                                  self.transmitter_density,
                                                  self.stifler_density))]


class Simulator:
    """
    Runs the cascade process for one configuration.

    :param graph: :py:class:`tbasic.corpus.SocialGraph`
    :param edges: :py:class:`EdgeModel`
    :param config: :py:class:`SimulationConfig`

    :raises: :py:exc:`UnknownSeedError` if a seed user is not in **graph**.
    """

    def __init__(self, graph, edges, config):
        for user, _ in config.seeds:
            if not graph.has_user(user):
                raise UnknownSeedError(user)

        self._graph = graph
        self._edges = edges
        self._config = config

        # fills the follower cache before runs share the graph across threads
        graph.followers(None)

    @property
    def config(self):
        return self._config

    def run(self, run_index):
        """
        One independent run, with a generator seeded from ``(rng_seed, run_index)``.

        :return: :py:class:`ActivationTrace`
        """
        config = self._config
        horizon = config.horizon
        rng = np.random.default_rng([config.rng_seed, run_index])

        active = {}
        activations = []
        attempts = []
        queue = []
        scheduled = set()
        counter = 0

        for user, offset in config.seeds:
            heapq.heappush(queue, PendingAttempt(offset, counter, None, user, offset))
            counter += 1

        while queue:
            pending = heapq.heappop(queue)
            t = pending.delivery_time
            receiver = pending.receiver

            if pending.sender is None:
                if receiver in active:
                    continue
            elif receiver in active:
                attempts.append(Attempt(pending.sender, receiver, t, None))
                continue
            else:
                hour = config.time_of_day(t if config.evaluate_at == 'delivery' else pending.sent_at)
                success = bool(rng.random() < self._edges.probability(pending.sender, receiver, hour))
                attempts.append(Attempt(pending.sender, receiver, t, success))
                if not success:
                    continue

            active[receiver] = t
            activations.append((t, receiver))

            for follower in self._graph.followers(receiver):
                if follower in active or (receiver, follower) in scheduled:
                    continue
                delivery = t + self._edges.delay(receiver, follower)
                if delivery >= horizon:
                    continue
                scheduled.add((receiver, follower))
                heapq.heappush(queue, PendingAttempt(delivery, counter, receiver, follower, t))
                counter += 1

        return ActivationTrace(activations=tuple(activations),
                               attempts=tuple(attempts),
                               horizon_days=config.horizon_days)

    def simulate(self):
        """
        Run the configured number of runs and aggregate them.

        Runs execute on **config.jobs** threads; the result does not depend on it.

        :return: :py:class:`SimulationResult`
        """
        config = self._config
        if config.jobs > 1:
            with concurrent.futures.ThreadPoolExecutor(max_workers=config.jobs) as executor:
                traces = tuple(executor.map(self.run, range(config.runs)))
        else:
            traces = tuple(self.run(i) for i in range(config.runs))

        volume = np.zeros(config.horizon_days, dtype=float)
        transmitters = np.zeros(config.horizon_days, dtype=float)
        activated = np.zeros(config.horizon_days, dtype=float)

        for trace in traces:
            volume += trace.daily_counts()
            for role in classify_roles(trace):
                transmitters[role.day] += role.transmitters
                activated[role.day] += role.activated

        transmitter_density = np.divide(transmitters, activated,
                                        out=np.zeros_like(transmitters), where=activated > 0)
        stifler_density = np.where(activated > 0, 1.0 - transmitter_density, 0.0)

        _log.info('Simulated %d runs over %d days, mean volume %.3f.',
                  config.runs, config.horizon_days, volume.sum() / config.runs)

        return SimulationResult(daily_volume=volume / config.runs,
                                transmitter_density=transmitter_density,
                                stifler_density=stifler_density,
                                traces=traces)


def simulate_once(graph, profiles, model, topic, config, run_seed, keyword_mode='all'):
    """One run of the process driven by **model** on **topic**.  See :py:meth:`Simulator.run`."""
    return Simulator(graph, DiffusionEdges(model, profiles, topic, keyword_mode), config).run(run_seed)


def simulate(graph, profiles, model, topic, config, keyword_mode='all'):
    """Monte-Carlo prediction of the daily volume of **topic**.  See :py:meth:`Simulator.simulate`."""
    return Simulator(graph, DiffusionEdges(model, profiles, topic, keyword_mode), config).simulate()


def classify_roles(source, days=None, start=None):
    """
    Transmitters and stiflers at the end of every day.

    A user activated before the end of a day is a transmitter if they activated
    someone before the end of that day, and a stifler otherwise.

    :param source: :py:class:`ActivationTrace`, or a :py:class:`tbasic.cascade.SpreadingCascade`
                   whose epoch times are counted in hours from **start**.
    :param days: Number of days; defaults to the trace horizon, or to the last
                 activation day of a cascade.
    :param start: Epoch seconds of simulation time 0 for a cascade, default its first activation.

    :return: List of :py:class:`RoleCount`, one per day.
    """
    if isinstance(source, ActivationTrace):
        activations = list(source.activations)
        transmissions = [(a.time, a.sender) for a in source.attempts if a.success]
        if days is None:
            days = source.horizon_days
    else:
        times = source.activation_times()
        if not times:
            return [] if days is None else [RoleCount(d, 0, 0) for d in range(days)]
        if start is None:
            start = min(times.values())
        activations = [((t - start) / 3600.0, u) for u, t in times.items()]
        transmissions = [((e.time - start) / 3600.0, e.src) for e in source.edges]
        if days is None:
            days = int(max(t for t, _ in activations) // 24.0) + 1

    roles = []
    for day in range(days):
        boundary = 24.0 * (day + 1)
        users = {u for t, u in activations if t < boundary}
        senders = {u for t, u in transmissions if t < boundary} & users
        roles.append(RoleCount(day, len(senders), len(users) - len(senders)))
    return roles


def seeds_from_sequence(sequence, s):
    """
    The first **s** users of an observed activation sequence as simulation seeds.

    :param sequence: :py:class:`tbasic.cascade.ActivationEvent` list sorted ascending.
    :return: ``(seeds, clock_origin)``: ``(user_id, offset_hours)`` pairs with the earliest
             at offset 0, and the UTC hour of the day of the earliest activation.
    """
    if s < 1:
        raise ValueError('s must be >= 1, got {}.'.format(s))
    if not sequence:
        return (), 0.0

    first = sequence[0].time
    seeds = tuple((e.user_id, (e.time - first) / 3600.0) for e in sequence[:s])
    return seeds, hour_of_day(first)


@dataclass(frozen=True)
class SweepResult:
    """
    Outcome of :py:func:`sweep_seed_sizes`.

    .. py:attribute:: gains

        dict mapping each tried seed set size to its overall gain, or to **None** when
        the observed series cannot be scored.

    .. py:attribute:: report

        :py:class:`tbasic.evaluation.Report` of the best size, **None** when
        no size could be scored.
    """

    best_size: int
    best: SimulationResult
    report: object
    gains: dict


def sweep_seed_sizes(graph, edges, sequence, real, sizes, config, fallback=None):
    """
    Simulate with the first **s** observed users as seeds for every **s** in **sizes**
    and keep the size with the highest overall gain over the 1-time-lag predictor.

    Seeds beyond the horizon are dropped.  Ties go to the smaller size.  When **real**
    cannot be scored for any size, the result is the one of **fallback** seeds, or
    of the smallest size without a fallback.

    :param edges: :py:class:`EdgeModel`
    :param real: Observed daily volume, one value per day of the horizon.
    :param config: Template :py:class:`SimulationConfig`; its seeds and clock origin are replaced.
    :param fallback: Seed set size used when no size can be scored.

    :return: :py:class:`SweepResult`
    """
    sizes = sorted(set(sizes))
    if not sizes:
        raise ValueError('No seed set size to try.')

    def run(s):
        seeds, origin = seeds_from_sequence(sequence, s)
        seeds = tuple(seed for seed in seeds if seed[1] < config.horizon)
        run_config = dataclasses.replace(config, seeds=seeds, clock_origin=origin)
        return Simulator(graph, edges, run_config).simulate()

    best = None
    gains = {}
    results = {}
    for s in sizes:
        result = results[s] = run(s)
        try:
            report = compare(result.daily_volume, real)
        except SeriesError as err:
            _log.warning('Seed set size %d cannot be scored: %s', s, err)
            gains[s] = None
            continue
        gains[s] = report.overall_gain
        _log.info('Seed set size %d: overall gain %.2f%%.', s, report.overall_gain)
        if best is None or report.overall_gain > best[0]:
            best = (report.overall_gain, s, result, report)

    if best is None:
        size = sizes[0] if fallback is None else fallback
        _log.warning('No seed set size could be scored, keeping %d seed(s).', size)
        result = results.get(size)
        return SweepResult(best_size=size, best=result if result is not None else run(size),
                           report=None, gains=gains)

    return SweepResult(best_size=best[1], best=best[2], report=best[3], gains=gains)


def write_result(path, result, helper=None):
    """Write a result as CSV ``day,predicted_volume,transmitter_density,stifler_density``."""
    from tbasic.filehelper import FileHelper

    helper = helper or FileHelper()
    helper.write_csv(path, RESULT_HEADER, result.rows())
