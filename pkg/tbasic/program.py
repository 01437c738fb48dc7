# Copyright (c) 2024, the tbasic developers
# All rights reserved.
#
# tbasic is distributed under the BSD 3-Clause License, see LICENSE.

"""
The ``tbasic`` command line program.

Every sub command returns one of the codes in :py:mod:`tbasic.returncodes`.
"""

import dataclasses
import json
import logging
import os

import tbasic.arguments
import tbasic.conf
import tbasic.returncodes as returncodes
from tbasic import cascade, config, corpus, engine, evaluation, features, learn, pipeline, synth, topics
from tbasic.filehelper import FileHelper
from tbasic.util import InputError

__all__ = ['main', 'read_seeds']

_log = logging.getLogger(__name__)


def _print_err(*args):
    print(*args, file=tbasic.conf.stderr)


def _print(*args):
    print(*args, file=tbasic.conf.stdout)


def _helper():
    return FileHelper(_Printer())


class _Printer:
    def print(self, *args):
        _print(*args)


def _period(args):
    if args.start is None:
        return None
    return args.start, args.end


def read_seeds(path):
    """
    Read a seed file: one ``user_id`` per line, optionally followed by a tab and
    an activation offset in hours.  Blank lines and ``#`` comments are ignored.

    :raises: :py:exc:`tbasic.util.InputError` for a malformed line.
    :return: ``(user_id, offset_hours)`` tuple.
    """
    seeds = []
    with open(path, encoding='utf-8') as f:
        for line_number, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith('#'):
                continue
            fields = line.split('\t')
            if len(fields) > 2:
                raise InputError('{}:{}: expected "user_id[<TAB>offset_hours]".'.format(path, line_number))
            offset = 0.0
            if len(fields) == 2:
                try:
                    offset = float(fields[1])
                except ValueError:
                    raise InputError('{}:{}: offset "{}" is not a number.'.format(path, line_number, fields[1]))
            seeds.append((fields[0].strip().lower(), offset))
    if not seeds:
        raise InputError('Seed file "{}" lists no seed.'.format(path))
    return tuple(seeds)


def _load_graph(edges_path, tweets=()):
    graph = corpus.load_follow_edges(edges_path)
    graph.add_mentions_from(tweets)
    return graph


def _profiles(args):
    tweets = corpus.load_tweets(args.tweets, _period(args))
    graph = _load_graph(args.edges, tweets)
    profiles = corpus.build_profiles(tweets, graph, _period(args))
    corpus.save_profiles(args.out, profiles, period=_period(args), helper=_helper())
    return returncodes.SUCCESS


def _score_terms(args):
    period = _period(args)
    tweets = corpus.load_tweets(args.tweets, period)
    ranking = topics.rank_terms(tweets, period, args.top,
                                min_total_count=args.min_count, bin_hours=args.bin_hours)
    if args.out:
        _helper().write_json(args.out, [s.to_dict() for s in ranking])
    else:
        for s in ranking:
            _print('{}\t{:.4f}\t{}'.format(s.term, s.score, s.total))
    return returncodes.SUCCESS


def _cooccur(args):
    tweets = corpus.load_tweets(args.tweets, _period(args))
    for term, count in topics.cooccurring_terms(tweets, args.term, _period(args), top=args.top):
        _print('{}\t{}'.format(term, count))
    return returncodes.SUCCESS


def _cascades(args):
    tweets = corpus.load_tweets(args.tweets, _period(args))
    graph = _load_graph(args.edges, tweets)
    helper = _helper()
    helper.makedirs(args.out, silent=True)

    instances = []
    for topic in topics.load_topics(args.topics):
        sequence = cascade.activation_sequence(topic, tweets)
        spreading = cascade.reconstruct_cascade(sequence, graph, topic.id)
        cascade.save_cascade(os.path.join(args.out, pipeline.topic_file_name(topic.id, '.json')),
                             spreading, helper)
        instances.extend(cascade.generate_instances(spreading, sequence, graph, topic, args.balance_seed))

    cascade.write_instances(os.path.join(args.out, 'instances.csv'), instances, helper)
    return returncodes.SUCCESS


def _features(args):
    topic_map = {t.id: t for t in topics.load_topics(args.topics)}
    X, y = features.instance_matrix(cascade.read_instances(args.instances),
                                    corpus.load_profiles(args.profiles),
                                    topic_map, args.keyword_mode)
    features.write_feature_matrix(args.out, X, y, _helper())
    return returncodes.SUCCESS


def _train(args):
    X, y = features.read_feature_matrix(args.features)
    model = learn.train(X, y, lam=args.lam, seed=args.seed)
    learn.save_model(args.out, model, _helper())

    accuracy = learn.cross_validate(X, y, folds=args.folds, lam=args.lam, seed=args.seed)
    _print('Cross validation accuracy: {:.4f}'.format(accuracy))
    for name, weight in zip(features.FEATURE_NAMES, learn.normalized_weights(model)):
        _print('{}\t{:+.4f}'.format(name, weight))

    if args.ablation:
        for group, group_accuracy in learn.dimension_ablation(X, y, folds=args.folds,
                                                              lam=args.lam, seed=args.seed).items():
            _print('{}\t{:.4f}'.format(group, group_accuracy))
    return returncodes.SUCCESS


def _calibrate(args):
    loaded = [cascade.load_cascade(os.path.join(args.cascades, f))
              for f in sorted(os.listdir(args.cascades)) if f.endswith('.json')]
    samples = cascade.delay_samples(loaded, corpus.load_profiles(args.profiles))
    sigma = learn.calibrate_sigma([d for d, _ in samples], [a for _, a in samples])

    model = learn.load_model(args.model).with_sigma(sigma)
    learn.save_model(args.out or args.model, model, _helper())
    _print('sigma = {:.4f} h'.format(sigma))
    return returncodes.SUCCESS


def _simulate(args):
    topic_map = {t.id: t for t in topics.load_topics(args.topics)}
    topic = topic_map.get(args.topic)
    if topic is None:
        raise InputError('Topic "{}" is not defined in "{}".'.format(args.topic, args.topics))

    jobs = args.jobs if args.jobs is not None else config.default_jobs()
    try:
        sim_config = engine.SimulationConfig(seeds=read_seeds(args.seeds),
                                             horizon_days=args.days,
                                             runs=args.runs,
                                             rng_seed=args.rng,
                                             clock_origin=args.clock_origin,
                                             evaluate_at=args.evaluate_at,
                                             jobs=jobs)
    except ValueError as err:
        raise InputError(str(err))

    graph = _load_graph(args.edges)
    result = engine.simulate(graph, corpus.load_profiles(args.profiles),
                             learn.load_model(args.model), topic, sim_config)
    engine.write_result(args.out, result, _helper())
    return returncodes.SUCCESS


def _evaluate(args):
    report = evaluation.compare(evaluation.read_series(args.pred), evaluation.read_series(args.real))
    if args.out:
        evaluation.save_report(args.out, report, _helper())
    else:
        _print(json.dumps(report.to_dict(), indent=2))
    return returncodes.SUCCESS


def _synth(args):
    spec = synth.load_spec(args.spec) if args.spec else synth.SynthSpec()
    if args.rng is not None:
        spec = dataclasses.replace(spec, rng_seed=args.rng)
    synth.generate(spec, out_dir=args.out, helper=_helper())
    return returncodes.SUCCESS


def _run(args):
    pipeline_config = config.load_config(args.config, jobs=args.jobs)
    pl = pipeline.run_pipeline(pipeline_config, stages=(args.stage,), force=args.force)
    if not pl.executed:
        _print('Nothing to do, all stages up to date.')
    return returncodes.SUCCESS


def _stats(args):
    graph = _load_graph(args.edges)
    tweets = corpus.load_tweets(args.tweets, _period(args)) if args.tweets else ()
    if args.user is not None:
        graph = corpus.ego_network(graph, args.user.lower(), hops=args.hops)
        tweets = [t for t in tweets if graph.has_user(t.author_id)]
    _print(json.dumps(corpus.network_stats(graph, tweets).to_dict(), indent=2))
    return returncodes.SUCCESS


_COMMANDS = {
    'profiles': _profiles,
    'score-terms': _score_terms,
    'cooccur': _cooccur,
    'cascades': _cascades,
    'features': _features,
    'train': _train,
    'calibrate': _calibrate,
    'simulate': _simulate,
    'evaluate': _evaluate,
    'synth': _synth,
    'run': _run,
    'stats': _stats
}


def main(args=None):
    """
    Parse **args** (default **sys.argv[1:]**) and run the sub command.

    Argument errors exit through **argparse** with :py:attr:`tbasic.returncodes.INPUT_ERROR`.

    :return: A return code from :py:mod:`tbasic.returncodes`.
    """
    parsed_args = tbasic.arguments.parse_args(args)
    tbasic.conf.configure_logging(parsed_args.verbose)

    try:
        return _COMMANDS[parsed_args.command](parsed_args)
    except pipeline.StageException as err:
        _print_err('\n{}\n'.format(err))
        if parsed_args.verbose:
            err.print_traceback(file=tbasic.conf.stderr)
        if isinstance(err.exception, (InputError, OSError)):
            return returncodes.INPUT_ERROR
        return returncodes.STAGE_FAILURE
    except (InputError, OSError) as err:
        _print_err('Error: {}'.format(err))
        _log.debug('Input error.', exc_info=True)
        return returncodes.INPUT_ERROR
    except Exception as err:
        _print_err('Error: {}: {}'.format(type(err).__name__, err))
        _log.debug('Unexpected error.', exc_info=True)
        return returncodes.ERROR
