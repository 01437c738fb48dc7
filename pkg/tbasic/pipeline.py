# Copyright (c) 2024, the tbasic developers
# All rights reserved.
#
# tbasic is distributed under the BSD 3-Clause License, see LICENSE.

"""
Cached stage runner and the end-to-end pipeline.

Stages are registered with :py:meth:`Pipeline.stage` and run in dependency
order.  A stage is skipped when its outputs exist and the content hash of its
inputs and parameters matches the one recorded after its last successful run.
"""

import json
import logging
import os
import threading
import traceback
from functools import wraps

import numpy as np

import tbasic.conf
import tbasic.graph
import tbasic.util
from tbasic import cascade as cascades_mod
from tbasic import corpus, engine, evaluation, features, learn, topics as topics_mod
from tbasic.filehelper import FileHelper

__all__ = [
    'CACHE_FILE',
    'STAGES',
    'StageException',
    'InputNotFoundException',
    'UndefinedStageException',
    'RedefinedStageException',
    'StageContext',
    'Pipeline',
    'topic_file_name',
    'build_pipeline',
    'run_pipeline'
]

_log = logging.getLogger(__name__)

CACHE_FILE = '.tbasic-cache.json'

STAGES = ('profiles', 'topics', 'cascades', 'features', 'train', 'calibrate', 'simulate', 'evaluate')


class StageException(Exception):
    """
    Raised by :py:meth:`Pipeline.run` if an exception is raised while running a stage.

    .. py:attribute:: stage_name

        The name of the stage the exception was raised in.

    .. py:attribute:: exception

        The exception raised.

    .. py:attribute:: exception_name

        The fully qualified name of the exception object.
    """

    def __init__(self, stage_name, exception):
        self.exception_name = tbasic.util.qualified_name(exception)

        super().__init__('Stage "{stage}" failed with "{exc}": {msg}'
                         .format(stage=stage_name, exc=self.exception_name, msg=exception))

        self.stage_name = stage_name
        self.exception = exception

    def print_traceback(self, file=None):
        """
        Print the traceback of the exception raised inside the stage.

        :param file: The file object to print to.  Default value is :py:attr:`tbasic.conf.stderr`.
        """
        traceback.print_exception(
            type(self.exception),
            self.exception,
            self.exception.__traceback__,
            file=tbasic.conf.stderr if file is None else file)


class InputNotFoundException(tbasic.util.InputError):
    """
    Raised by :py:meth:`Pipeline.run` if an input file or directory of a stage does not exist.

    .. py:attribute:: path

        The missing path.
    """

    def __init__(self, stage_name, path):
        super().__init__('Error: Could not find input file/directory "{}" used by stage "{}".'
                         .format(path, stage_name))
        self.stage_name = stage_name
        self.path = path


class UndefinedStageException(Exception):
    """Raised on lookup of an unregistered stage.

    .. py:attribute:: stage_name

        The name of the referenced stage.
    """

    def __init__(self, stage_name):
        super().__init__('Error: Stage "{}" is undefined.'.format(stage_name))
        self.stage_name = stage_name


class RedefinedStageException(Exception):
    """Raised on registering a duplicate stage.

    .. py:attribute:: stage_name

        The name of the redefined stage.
    """

    def __init__(self, stage_name):
        super().__init__('Error: Stage "{}" has already been defined.'.format(stage_name))
        self.stage_name = stage_name


class _StageNode(tbasic.graph.Graph):
    def __init__(self, name, func):
        super().__init__()
        self.name = name
        self.func = func

    def __call__(self):
        return self.func()

    def __str__(self):
        return self.name


class StageContext:
    """
    Contextual object passed to each stage function.

    .. py:attribute:: inputs

        The input paths of the stage.

    .. py:attribute:: outputs

        The output paths of the stage.

    .. py:attribute:: parameters

        The parameter value hashed together with the inputs.
    """

    def __init__(self, pipeline, node, inputs, outputs, parameters):
        self._pipeline = pipeline
        self._node = node
        self.inputs = list(inputs)
        self.outputs = list(outputs)
        self.parameters = parameters

    @property
    def name(self):
        """The stage name."""
        return self._node.name

    @property
    def node(self):
        return self._node

    @property
    def pipeline(self):
        return self._pipeline

    @property
    def dependencies(self):
        """Contexts of the stages this stage depends on."""
        return [self._pipeline.get_stage_context(n.name) for n in self._node.edges]

    @property
    def helper(self):
        """A :py:class:`tbasic.filehelper.FileHelper` reporting to this stage's output."""
        return FileHelper(self)

    def print(self, *args, **kwargs):
        """Print to the pipeline output stream, one stage at a time."""
        kwargs.pop('file', None)
        with self._pipeline.output_lock:
            print(*args, file=self._pipeline.stdout, **kwargs)


class Pipeline:
    """
    A set of stages with dependencies and a content hash cache.

    :param cache_dir: Directory holding the cache file, usually the output directory.
    :param stdout: Stream stage output is printed to, defaults to :py:attr:`tbasic.conf.stdout`.
    :param show_stage_headers: Print an **Executing Stage:** header before each stage runs.
    :param force: Run every stage even when it is up to date.
    """

    def __init__(self, cache_dir, stdout=None, show_stage_headers=True, force=False):
        self.stdout = stdout if stdout is not None else tbasic.conf.stdout
        self.show_stage_headers = show_stage_headers
        self.force = force
        self.output_lock = threading.RLock()

        self._cache_path = os.path.join(cache_dir, CACHE_FILE)
        self._cache = None
        self._contexts = dict()
        self._executed = []
        self._skipped = []

    @property
    def stage_count(self):
        return len(self._contexts)

    @property
    def executed(self):
        """Names of the stages that ran in the last :py:meth:`Pipeline.run`."""
        return list(self._executed)

    @property
    def skipped(self):
        """Names of the stages skipped as up to date in the last :py:meth:`Pipeline.run`."""
        return list(self._skipped)

    def _load_cache(self):
        if self._cache is None:
            try:
                with open(self._cache_path, encoding='utf-8') as f:
                    self._cache = json.load(f)
            except (OSError, ValueError):
                self._cache = {}
        return self._cache

    def _store_cache(self, name, digest):
        cache = self._load_cache()
        cache[name] = digest
        FileHelper().write_json(self._cache_path, cache, silent=True)

    @staticmethod
    def _digest(ctx):
        for path in ctx.inputs:
            if not os.path.exists(path):
                raise InputNotFoundException(ctx.name, path)

        return tbasic.util.value_digest([ctx.name,
                                         [tbasic.util.path_digest(p) for p in ctx.inputs],
                                         tbasic.util.value_digest(ctx.parameters)])

    def _is_current(self, ctx, digest):
        return (not self.force
                and self._load_cache().get(ctx.name) == digest
                and all(os.path.exists(p) for p in ctx.outputs))

    def stage(self, *dependencies, i=None, o=None, parameters=None, name=None):
        """
        Decorator registering a stage function taking a :py:class:`StageContext`.

        Example:

        .. code-block:: python

           pl = tbasic.pipeline.Pipeline('out')

           @pl.stage(i='tweets.txt', o='out/terms.json', parameters={'top': 20})
           def terms(ctx):
               ...

           @pl.stage(terms, i='out/terms.json', o='out/report.json')
           def report(ctx):
               ...

        :param dependencies: Stages that must run first, by function or by name.
        :param i: Input path or list of paths.
        :param o: Output path or list of paths.
        :param parameters: Value hashed with the inputs.
        :param name: Stage name, defaults to the function name.
        """

        def decorator(func):
            self.add_stage(name or func.__name__, func, dependencies=dependencies,
                           inputs=i, outputs=o, parameters=parameters)
            return func

        return decorator

    def add_stage(self, name, func, dependencies=None, inputs=None, outputs=None, parameters=None):
        """
        Register a stage.

        :raises: :py:exc:`RedefinedStageException` if **name** is already registered.
        :raises: :py:exc:`UndefinedStageException` if a dependency is not registered.
        :return: The :py:class:`StageContext` of the new stage.
        """
        if name in self._contexts:
            raise RedefinedStageException(name)

        def paths(value):
            if value is None:
                return []
            if tbasic.util.is_iterable_not_str(value):
                return list(tbasic.util.flatten_non_str(value))
            return [value]

        @wraps(func)
        def stage_wrapper():
            ctx = self._contexts[name]
            try:
                digest = Pipeline._digest(ctx)
                if self._is_current(ctx, digest):
                    _log.info('Stage "%s" is up to date, skipped.', name)
                    self._skipped.append(name)
                    return None

                if self.show_stage_headers:
                    ctx.print('===== Executing Stage: "{}"'.format(name))
                _log.info('Running stage "%s".', name)

                result = func(ctx)

                self._store_cache(name, digest)
                self._executed.append(name)
                return result
            except InputNotFoundException:
                raise
            except Exception as err:
                raise StageException(name, err)

        node = _StageNode(name, stage_wrapper)
        ctx = StageContext(self, node, paths(inputs), paths(outputs), parameters)
        self._contexts[name] = ctx

        for dependency in dependencies or ():
            node.add_edge(self.get_stage_context(dependency).node)

        return ctx

    def get_stage_context(self, stage):
        """
        Look up the context of a stage by name or by function.

        :raises: :py:exc:`UndefinedStageException` if the stage is not registered.
        """
        name = stage if isinstance(stage, str) else getattr(stage, '__name__', None)
        context = self._contexts.get(name)
        if context is None:
            raise UndefinedStageException(name if name is not None else repr(stage))
        return context

    def run(self, stages):
        """
        Run stages and everything they depend on, each at most once.

        :param stages: Stage or list of stages, by name or by function.

        :raises: :py:exc:`StageException` wrapping an exception raised inside a stage.
        :raises: :py:exc:`InputNotFoundException` if a stage input is missing.
        :raises: :py:exc:`UndefinedStageException` for an unknown stage.
        :raises: :py:exc:`ValueError` if **stages** is empty.
        """
        if not stages:
            raise ValueError('Stages parameter may not be None or an empty list.')
        if not tbasic.util.is_iterable_not_str(stages):
            stages = [stages]

        self._executed = []
        self._skipped = []
        visited = set()

        for stage in stages:
            for node in self.get_stage_context(stage).node.topological_sort():
                if node.name not in visited:
                    visited.add(node.name)
                    node()


def topic_file_name(topic_id, suffix):
    """File name of a per topic artifact, characters other than letters, digits and ``-_.`` replaced by ``_``."""
    safe = ''.join(c if c.isalnum() or c in '-_.' else '_' for c in topic_id)
    return safe + suffix


def _load_graph(config, tweets):
    graph = corpus.load_follow_edges(config.edges)
    graph.add_mentions_from(tweets)
    return graph


def build_pipeline(config, stdout=None, force=False):
    """
    Register the stages of the end-to-end pipeline for **config**.

    Output directory layout::

        profiles.json          learning period user profiles
        terms.json             term ranking of the test period
        cascades/<topic>.json  spreading cascade of every topic
        instances.csv          balanced labeled instances
        features.csv           feature matrix of the instances
        model.json             trained diffusion function
        train_report.json      cross validation accuracy and weights
        calibrated_model.json  model with a fitted delay scale
        predictions/<topic>.csv, real/<topic>.csv
        report.json            error metrics per topic

    :param config: :py:class:`tbasic.config.PipelineConfig`
    :return: :py:class:`Pipeline`
    """
    out = config.out_dir
    join = os.path.join

    profiles_path = join(out, 'profiles.json')
    terms_path = join(out, 'terms.json')
    cascades_dir = join(out, 'cascades')
    instances_path = join(out, 'instances.csv')
    features_path = join(out, 'features.csv')
    model_path = join(out, 'model.json')
    train_report_path = join(out, 'train_report.json')
    calibrated_path = join(out, 'calibrated_model.json')
    predictions_dir = join(out, 'predictions')
    real_dir = join(out, 'real')
    report_path = join(out, 'report.json')

    pl = Pipeline(out, stdout=stdout, force=force)

    @pl.stage(i=[config.tweets, config.edges], o=profiles_path,
              parameters=config.learning_period)
    def profiles(ctx):
        tweets = corpus.load_tweets(config.tweets, config.learning_period)
        graph = _load_graph(config, tweets)
        corpus.save_profiles(profiles_path,
                             corpus.build_profiles(tweets, graph, config.learning_period),
                             period=config.learning_period, helper=ctx.helper)

    @pl.stage(i=[config.tweets, config.topics], o=terms_path,
              parameters=(config.test_period, config.top_terms))
    def topics(ctx):
        defined = topics_mod.load_topics(config.topics)
        tweets = corpus.load_tweets(config.tweets, config.test_period)
        ranking = topics_mod.rank_terms(tweets, config.test_period, config.top_terms)
        ctx.helper.write_json(terms_path, {
            'period': {'from': config.test_period[0], 'to': config.test_period[1]},
            'terms': [s.to_dict() for s in ranking],
            'topics': [t.id for t in defined]
        })

    @pl.stage(topics, i=[config.tweets, config.edges, config.topics],
              o=[cascades_dir, instances_path],
              parameters=(config.test_period, config.balance_seed))
    def cascades(ctx):
        tweets = corpus.load_tweets(config.tweets, config.test_period)
        graph = _load_graph(config, tweets)
        helper = ctx.helper
        helper.rmtree(cascades_dir, silent=True)
        helper.makedirs(cascades_dir, silent=True)

        instances = []
        for topic in topics_mod.load_topics(config.topics):
            sequence = cascades_mod.activation_sequence(topic, tweets)
            cascade = cascades_mod.reconstruct_cascade(sequence, graph, topic.id)
            cascades_mod.save_cascade(join(cascades_dir, topic_file_name(topic.id, '.json')), cascade, helper)
            instances.extend(cascades_mod.generate_instances(cascade, sequence, graph, topic,
                                                             config.balance_seed))

        cascades_mod.write_instances(instances_path, instances, helper)

    @pl.stage(profiles, cascades, i=[instances_path, profiles_path, config.topics], o=features_path,
              parameters=config.keyword_mode, name='features')
    def feature_matrix(ctx):
        topic_map = {t.id: t for t in topics_mod.load_topics(config.topics)}
        X, y = features.instance_matrix(cascades_mod.read_instances(instances_path),
                                        corpus.load_profiles(profiles_path),
                                        topic_map, config.keyword_mode)
        features.write_feature_matrix(features_path, X, y, ctx.helper)

    @pl.stage('features', i=features_path, o=[model_path, train_report_path],
              parameters=(config.lam, config.folds, config.balance_seed, config.ablation,
                          config.learning_period))
    def train(ctx):
        X, y = features.read_feature_matrix(features_path)
        model = learn.train(X, y, lam=config.lam, seed=config.balance_seed,
                            trained_on={'from': config.learning_period[0], 'to': config.learning_period[1]})
        learn.save_model(model_path, model, ctx.helper)

        report = {
            'instances': int(y.shape[0]),
            'accuracy': learn.cross_validate(X, y, folds=config.folds, lam=config.lam, seed=config.balance_seed),
            'normalized_weights': dict(zip(features.FEATURE_NAMES, learn.normalized_weights(model))),
            'feature_summary': features.feature_summary(X)
        }
        if config.ablation:
            report['ablation'] = learn.dimension_ablation(X, y, folds=config.folds,
                                                          lam=config.lam, seed=config.balance_seed)
        ctx.helper.write_json(train_report_path, report)

    @pl.stage(train, i=[model_path, cascades_dir, profiles_path], o=calibrated_path)
    def calibrate(ctx):
        loaded = [cascades_mod.load_cascade(join(cascades_dir, f)) for f in sorted(os.listdir(cascades_dir))]
        samples = cascades_mod.delay_samples(loaded, corpus.load_profiles(profiles_path))
        sigma = learn.calibrate_sigma([d for d, _ in samples], [a for _, a in samples])
        learn.save_model(calibrated_path, learn.load_model(model_path).with_sigma(sigma), ctx.helper)

    @pl.stage(calibrate, i=[calibrated_path, profiles_path, config.edges, config.tweets, config.topics],
              o=[predictions_dir, real_dir],
              parameters=(config.test_period, config.keyword_mode, config.count,
                          config.stage_parameters()['simulation']))
    def simulate(ctx):
        settings = config.simulation
        model = learn.load_model(calibrated_path)
        profile_map = corpus.load_profiles(profiles_path)
        tweets = corpus.load_tweets(config.tweets, config.test_period)
        graph = _load_graph(config, tweets)

        helper = ctx.helper
        for directory in (predictions_dir, real_dir):
            helper.rmtree(directory, silent=True)
            helper.makedirs(directory, silent=True)

        for topic in topics_mod.load_topics(config.topics):
            sequence = cascades_mod.activation_sequence(topic, tweets)
            if not sequence:
                _log.warning('Topic "%s" has no activation in the test period, not simulated.', topic.id)
                continue

            real = topics_mod.real_volume(topic, tweets, sequence[0].time, settings.days,
                                          adoptions_only=config.count == 'adoptions')
            edges = engine.DiffusionEdges(model, profile_map, topic, config.keyword_mode)
            template = engine.SimulationConfig(horizon_days=settings.days,
                                               runs=settings.runs,
                                               rng_seed=settings.rng,
                                               evaluate_at=settings.evaluate_at,
                                               jobs=settings.jobs)

            if settings.seed_sizes:
                result = engine.sweep_seed_sizes(graph, edges, sequence, real,
                                                 settings.seed_sizes, template,
                                                 fallback=settings.seeds).best
            else:
                seeds, origin = engine.seeds_from_sequence(sequence, settings.seeds)
                run_config = engine.SimulationConfig(
                    seeds=tuple(s for s in seeds if s[1] < template.horizon),
                    horizon_days=settings.days,
                    runs=settings.runs,
                    rng_seed=settings.rng,
                    clock_origin=origin,
                    evaluate_at=settings.evaluate_at,
                    jobs=settings.jobs)
                result = engine.Simulator(graph, edges, run_config).simulate()

            engine.write_result(join(predictions_dir, topic_file_name(topic.id, '.csv')), result, helper)
            evaluation.write_series(join(real_dir, topic_file_name(topic.id, '.csv')), real, helper=helper)

    @pl.stage(simulate, i=[predictions_dir, real_dir], o=report_path)
    def evaluate(ctx):
        reports = {}
        gains = []
        for file_name in sorted(os.listdir(predictions_dir)):
            predicted = evaluation.read_series(join(predictions_dir, file_name), 'predicted_volume')
            real = evaluation.read_series(join(real_dir, file_name), 'volume')
            topic_id = os.path.splitext(file_name)[0]
            try:
                report = evaluation.compare(predicted, real)
            except evaluation.SeriesError as err:
                _log.warning('Topic "%s" cannot be scored: %s', topic_id, err)
                reports[topic_id] = {'error': str(err)}
                continue
            reports[topic_id] = report.to_dict()
            gains.append(report.overall_gain)

        ctx.helper.write_json(report_path, {
            'topics': reports,
            'mean_overall_gain': float(np.mean(gains)) if gains else None
        })

    return pl


def run_pipeline(config, stdout=None, stages=('evaluate',), force=False):
    """
    Run the end-to-end pipeline.

    :param config: :py:class:`tbasic.config.PipelineConfig`
    :param stdout: Stream for stage output.
    :param stages: Stages to bring up to date, with their dependencies.
    :param force: Ignore the stage cache.

    :raises: :py:exc:`StageException` or :py:exc:`InputNotFoundException` as :py:meth:`Pipeline.run`.
    :return: The :py:class:`Pipeline` that ran.
    """
    os.makedirs(config.out_dir, exist_ok=True)
    pl = build_pipeline(config, stdout=stdout, force=force)
    pl.run(list(stages))
    return pl
