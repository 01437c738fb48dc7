# Copyright (c) 2024, the tbasic developers
# All rights reserved.
#
# tbasic is distributed under the BSD 3-Clause License, see LICENSE.

"""
Pipeline configuration file.

Example:

.. code-block:: json

   {
     "tweets": "tweets.txt",
     "edges": "edges.tsv",
     "topics": "topics.json",
     "out_dir": "out",
     "learning_period": {"from": "2009-11-01T00:00:00", "to": "2009-12-01T00:00:00"},
     "test_period": {"from": "2009-12-01T00:00:00", "to": "2010-01-01T00:00:00"},
     "lambda": 1.0,
     "simulation": {"seeds": 5, "days": 10, "runs": 100, "rng": 42}
   }

Relative paths are resolved against the directory holding the configuration file.
"""

import dataclasses
import json
import os
from dataclasses import dataclass

from tbasic.engine import EVALUATE_AT
from tbasic.features import KEYWORD_MODES
from tbasic.util import InputError, parse_period

__all__ = [
    'JOBS_ENV',
    'COUNT_MODES',
    'ConfigError',
    'SimulationSettings',
    'PipelineConfig',
    'default_jobs',
    'load_config'
]

JOBS_ENV = 'TBASIC_JOBS'

COUNT_MODES = ('all', 'adoptions')


class ConfigError(InputError):
    """Raised for an invalid pipeline configuration."""
    pass


def default_jobs():
    """
    Worker thread count from the ``TBASIC_JOBS`` environment variable, 1 if unset.

    :raises: :py:exc:`ConfigError` if the variable is not a positive integer.
    """
    value = os.environ.get(JOBS_ENV)
    if value is None or not value.strip():
        return 1
    try:
        jobs = int(value)
    except ValueError:
        jobs = 0
    if jobs < 1:
        raise ConfigError('{} must be a positive integer, got "{}".'.format(JOBS_ENV, value))
    return jobs


def _check_fields(section, data, allowed):
    if not isinstance(data, dict):
        raise ConfigError('"{}" must be a JSON object.'.format(section))
    unknown = set(data) - set(allowed)
    if unknown:
        raise ConfigError('Unknown field(s) in "{}": {}.'.format(section, ', '.join(sorted(unknown))))


def _positive_int(section, name, value):
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ConfigError('"{}.{}" must be a positive integer, got {!r}.'.format(section, name, value))
    return value


@dataclass(frozen=True)
class SimulationSettings:
    """
    The ``simulation`` section.

    .. py:attribute:: seeds

        Number of observed users used as seeds (s).

    .. py:attribute:: seed_sizes

        When not empty, every size is tried and the best one kept.
    """

    seeds: int = 5
    days: int = 10
    runs: int = 100
    rng: int = 42
    evaluate_at: str = 'delivery'
    jobs: int = 1
    seed_sizes: tuple = ()

    @classmethod
    def from_dict(cls, data, jobs=None):
        _check_fields('simulation', data, [f.name for f in dataclasses.fields(cls)])
        values = dict(data)
        for name in ('seeds', 'days', 'runs', 'jobs'):
            if name in values:
                _positive_int('simulation', name, values[name])
        if values.get('evaluate_at', 'delivery') not in EVALUATE_AT:
            raise ConfigError('"simulation.evaluate_at" must be one of {}.'.format(', '.join(EVALUATE_AT)))
        if 'rng' in values and (isinstance(values['rng'], bool) or not isinstance(values['rng'], int)):
            raise ConfigError('"simulation.rng" must be an integer.')
        values['seed_sizes'] = tuple(_positive_int('simulation', 'seed_sizes', s)
                                     for s in values.get('seed_sizes', ()))
        if 'jobs' not in values:
            values['jobs'] = default_jobs() if jobs is None else jobs
        return cls(**values)


@dataclass(frozen=True)
class PipelineConfig:
    """Everything :py:func:`tbasic.pipeline.run_pipeline` needs."""

    tweets: str
    edges: str
    topics: str
    out_dir: str
    learning_period: tuple
    test_period: tuple
    lam: float = 1.0
    folds: int = 5
    balance_seed: int = 0
    keyword_mode: str = 'all'
    top_terms: int = 20
    ablation: bool = False
    simulation: SimulationSettings = SimulationSettings()
    count: str = 'all'

    def __post_init__(self):
        if self.learning_period[1] > self.test_period[0]:
            raise ConfigError('The learning period must end before the test period starts.')
        if self.lam < 0:
            raise ConfigError('"lambda" must be >= 0, got {}.'.format(self.lam))
        if self.folds < 2:
            raise ConfigError('"folds" must be >= 2, got {}.'.format(self.folds))
        if self.keyword_mode not in KEYWORD_MODES:
            raise ConfigError('"keyword_mode" must be one of {}.'.format(', '.join(KEYWORD_MODES)))
        if self.count not in COUNT_MODES:
            raise ConfigError('"evaluation.count" must be one of {}.'.format(', '.join(COUNT_MODES)))

    def stage_parameters(self):
        """Parameter values hashed by the stage cache; the worker count does not change results."""
        parameters = dataclasses.asdict(self)
        del parameters['simulation']['jobs']
        return parameters

    @classmethod
    def from_dict(cls, data, base_dir='.', jobs=None):
        """
        Build a configuration from a parsed JSON document.

        :param base_dir: Directory relative paths are resolved against.
        :param jobs: Worker count used when the document does not set ``simulation.jobs``.
        """
        _check_fields('config', data, ('tweets', 'edges', 'topics', 'out_dir', 'learning_period',
                                       'test_period', 'lambda', 'folds', 'balance_seed', 'keyword_mode',
                                       'top_terms', 'ablation', 'simulation', 'evaluation'))

        missing = [k for k in ('tweets', 'edges', 'topics', 'out_dir', 'learning_period', 'test_period')
                   if k not in data]
        if missing:
            raise ConfigError('Missing config field(s): {}.'.format(', '.join(missing)))

        def path(key):
            value = data[key]
            if not isinstance(value, str) or not value:
                raise ConfigError('"{}" must be a path.'.format(key))
            return os.path.normpath(os.path.join(base_dir, value))

        def period(key):
            value = data[key]
            _check_fields(key, value, ('from', 'to'))
            try:
                return parse_period(value['from'], value['to'])
            except KeyError as err:
                raise ConfigError('"{}" is missing {}.'.format(key, err))

        evaluation = data.get('evaluation', {})
        _check_fields('evaluation', evaluation, ('count',))

        try:
            return cls(tweets=path('tweets'),
                       edges=path('edges'),
                       topics=path('topics'),
                       out_dir=path('out_dir'),
                       learning_period=period('learning_period'),
                       test_period=period('test_period'),
                       lam=float(data.get('lambda', 1.0)),
                       folds=_positive_int('config', 'folds', data.get('folds', 5)),
                       balance_seed=int(data.get('balance_seed', 0)),
                       keyword_mode=data.get('keyword_mode', 'all'),
                       top_terms=_positive_int('config', 'top_terms', data.get('top_terms', 20)),
                       ablation=bool(data.get('ablation', False)),
                       simulation=SimulationSettings.from_dict(data.get('simulation', {}), jobs=jobs),
                       count=evaluation.get('count', 'all'))
        except (TypeError, ValueError) as err:
            raise ConfigError('Invalid config value: {}'.format(err))


def load_config(path, jobs=None):
    """
    Read a JSON pipeline configuration.

    :raises: :py:exc:`ConfigError` if the file is not a valid configuration.
    :raises: :py:exc:`OSError` if the file cannot be read.
    """
    with open(path, encoding='utf-8') as f:
        try:
            data = json.load(f)
        except ValueError as err:
            raise ConfigError('"{}" is not valid JSON: {}'.format(path, err))
    if not isinstance(data, dict):
        raise ConfigError('"{}" must hold a JSON object.'.format(path))
    return PipelineConfig.from_dict(data, base_dir=os.path.dirname(os.path.abspath(path)), jobs=jobs)
