# Copyright (c) 2024, the tbasic developers
# All rights reserved.
#
# tbasic is distributed under the BSD 3-Clause License, see LICENSE.

import argparse

import tbasic
import tbasic.util
from tbasic.engine import EVALUATE_AT
from tbasic.features import KEYWORD_MODES
from tbasic.pipeline import STAGES

__all__ = ['parse_args', 'get_parser', 'args_are_parsed', 'get_args', 'clear_args']

_ARG_PARSER = argparse.ArgumentParser(
    prog='tbasic',
    description='Learn, simulate and evaluate the diffusion of topics in a social network.')


def _create_gt_int(minimum, less_message):
    def _gt_int(val):
        try:
            val = int(val)
        except ValueError:
            raise argparse.ArgumentTypeError('"{}" is not an integer.'.format(val))
        if val < minimum:
            raise argparse.ArgumentTypeError(less_message)
        return val

    return _gt_int


def _non_negative_float(val):
    try:
        val = float(val)
    except ValueError:
        raise argparse.ArgumentTypeError('"{}" is not a number.'.format(val))
    if val < 0:
        raise argparse.ArgumentTypeError('value must be >= 0, got {}.'.format(val))
    return val


def _hour_of_day(val):
    val = _non_negative_float(val)
    if val >= 24:
        raise argparse.ArgumentTypeError('hour of the day must be in [0, 24), got {}.'.format(val))
    return val


def _time(val):
    try:
        return tbasic.util.parse_time(val)
    except tbasic.util.InputError as err:
        raise argparse.ArgumentTypeError(str(err))


_positive = _create_gt_int(1, 'value must be greater than zero.')
_at_least_two = _create_gt_int(2, 'value must be at least 2.')

_ARG_PARSER.add_argument('--version', action='version', version='tbasic ' + tbasic.__version__)

_ARG_PARSER.add_argument('-v', '--verbose', action='count', default=0,
                         help='Log progress to stderr, repeat for debug output.')

_SUBPARSERS = _ARG_PARSER.add_subparsers(dest='command', metavar='command')
_SUBPARSERS.required = True


def _add_period(parser, required=False, what='tweets'):
    parser.add_argument('--from', dest='start', type=_time, required=required,
                        help='Start of the period of {} to use (ISO-8601 or epoch seconds).'.format(what))
    parser.add_argument('--to', dest='end', type=_time, required=required,
                        help='End of the period, excluded.')


def _add_jobs(parser):
    parser.add_argument('-j', '--jobs', type=_positive,
                        help='Worker threads for the simulation runs.  '
                             'Defaults to the TBASIC_JOBS environment variable, or 1.')


_profiles = _SUBPARSERS.add_parser('profiles', help='Build user profiles over a learning period.')
_profiles.add_argument('--tweets', required=True, help='Tweet file.')
_profiles.add_argument('--edges', required=True, help='Follower edge file.')
_add_period(_profiles)
_profiles.add_argument('--out', required=True, help='Profile snapshot (JSON) to write.')

_score_terms = _SUBPARSERS.add_parser('score-terms', help='Rank the terms of a period by interestingness.')
_score_terms.add_argument('--tweets', required=True, help='Tweet file.')
_add_period(_score_terms, required=True)
_score_terms.add_argument('--top', type=_positive, default=20, help='Number of terms to list (default 20).')
_score_terms.add_argument('--min-count', dest='min_count', type=_positive, default=1,
                          help='Minimum total occurrences of a listed term (default 1).')
_score_terms.add_argument('--bin-hours', dest='bin_hours', type=_positive, default=4,
                          choices=(1, 2, 3, 4, 6, 8, 12, 24), help='Width of the time bins (default 4).')
_score_terms.add_argument('--out', help='Write the ranking as JSON instead of printing it.')

_cooccur = _SUBPARSERS.add_parser('cooccur', help='List the terms found with a term.')
_cooccur.add_argument('--tweets', required=True, help='Tweet file.')
_cooccur.add_argument('--term', required=True, help='The term.')
_add_period(_cooccur)
_cooccur.add_argument('--top', type=_positive, default=10, help='Number of terms to list (default 10).')

_cascades = _SUBPARSERS.add_parser('cascades', help='Reconstruct topic cascades and label instances.')
_cascades.add_argument('--topics', required=True, help='Topic file.')
_cascades.add_argument('--tweets', required=True, help='Tweet file.')
_cascades.add_argument('--edges', required=True, help='Follower edge file.')
_add_period(_cascades)
_cascades.add_argument('--balance-seed', dest='balance_seed', type=int, default=0,
                       help='Seed of the class balancing sample (default 0).')
_cascades.add_argument('--out', required=True,
                       help='Directory receiving one cascade per topic and instances.csv.')

_features = _SUBPARSERS.add_parser('features', help='Compute the feature matrix of labeled instances.')
_features.add_argument('--instances', required=True, help='Instance CSV.')
_features.add_argument('--profiles', required=True, help='Profile snapshot.')
_features.add_argument('--topics', required=True, help='Topic file.')
_features.add_argument('--keyword-mode', dest='keyword_mode', choices=KEYWORD_MODES, default='all',
                       help='hK semantics: every keyword in one past tweet, or the first keyword (default all).')
_features.add_argument('--out', required=True, help='Feature matrix CSV to write.')

_train = _SUBPARSERS.add_parser('train', help='Train the diffusion function.')
_train.add_argument('--features', required=True, help='Feature matrix CSV.')
_train.add_argument('--lambda', dest='lam', type=_non_negative_float, default=1.0,
                    help='L2 strength (default 1.0).')
_train.add_argument('--folds', type=_at_least_two, default=5, help='Cross validation folds (default 5).')
_train.add_argument('--seed', type=int, default=0, help='Seed of the folds and initial weights (default 0).')
_train.add_argument('--ablation', action='store_true',
                    help='Also report accuracy per feature dimension subset.')
_train.add_argument('--out', required=True, help='Model file to write.')

_calibrate = _SUBPARSERS.add_parser('calibrate', help='Fit the delay scale sigma on observed cascades.')
_calibrate.add_argument('--cascades', required=True, help='Directory of cascade files.')
_calibrate.add_argument('--profiles', required=True, help='Profile snapshot.')
_calibrate.add_argument('--model', required=True, help='Model file.')
_calibrate.add_argument('--out', help='Calibrated model file to write, defaults to --model.')

_simulate = _SUBPARSERS.add_parser('simulate', help='Predict the daily volume of a topic.')
_simulate.add_argument('--model', required=True, help='Model file.')
_simulate.add_argument('--edges', required=True, help='Follower edge file.')
_simulate.add_argument('--profiles', required=True, help='Profile snapshot.')
_simulate.add_argument('--topics', required=True, help='Topic file.')
_simulate.add_argument('--topic', required=True, help='Id of the topic to simulate.')
_simulate.add_argument('--seeds', required=True,
                       help='Seed file, one "user_id[<TAB>offset_hours]" per line.')
_simulate.add_argument('--days', type=_positive, default=10, help='Horizon in days (default 10).')
_simulate.add_argument('--runs', type=_positive, default=100, help='Monte-Carlo runs (default 100).')
_simulate.add_argument('--rng', type=int, default=42, help='Random seed (default 42).')
_simulate.add_argument('--clock-origin', dest='clock_origin', type=_hour_of_day, default=0.0,
                       help='UTC hour of the day at simulation start (default 0).')
_simulate.add_argument('--evaluate-at', dest='evaluate_at', choices=EVALUATE_AT, default='delivery',
                       help='Time of day used for the edge probability (default delivery).')
_add_jobs(_simulate)
_simulate.add_argument('--out', required=True, help='Result CSV to write.')

_evaluate = _SUBPARSERS.add_parser('evaluate', help='Score a prediction against the real series.')
_evaluate.add_argument('--pred', required=True, help='Predicted series CSV.')
_evaluate.add_argument('--real', required=True, help='Real series CSV.')
_evaluate.add_argument('--out', help='Report JSON to write, printed when omitted.')

_synth = _SUBPARSERS.add_parser('synth', help='Generate a synthetic corpus with planted diffusion.')
_synth.add_argument('--spec', help='Generator spec (JSON), defaults apply to missing fields.')
_synth.add_argument('--rng', type=int, help='Override the spec random seed.')
_synth.add_argument('--out', required=True, help='Output directory.')

_run = _SUBPARSERS.add_parser('run', help='Run the pipeline described by a config file.')
_run.add_argument('--config', required=True, help='Pipeline config (JSON).')
_run.add_argument('--stage', choices=STAGES, default='evaluate',
                  help='Last stage to bring up to date (default evaluate).')
_run.add_argument('--force', action='store_true', help='Ignore the stage cache.')
_add_jobs(_run)

_stats = _SUBPARSERS.add_parser('stats', help='Describe a social network.')
_stats.add_argument('--edges', required=True, help='Follower edge file.')
_stats.add_argument('--tweets', help='Tweet file, for the tweet count and active density.')
_add_period(_stats)
_stats.add_argument('--user', help='Restrict to the ego network of this user.')
_stats.add_argument('--hops', type=_positive, default=2, help='Ego network radius (default 2).')

_PARSED_ARGS = None


def _validate_arguments(parsed_args):
    """
    Cross-argument checks argparse cannot express.

    :return: An error message, or **None**.
    """
    start = getattr(parsed_args, 'start', None)
    end = getattr(parsed_args, 'end', None)
    if (start is None) != (end is None):
        return '--from and --to must be given together.'
    if start is not None and end <= start:
        return '--from must be before --to.'
    return None


def parse_args(args=None):
    """
    Parse a command line.  Exits with :py:attr:`tbasic.returncodes.INPUT_ERROR` on bad arguments.
    """
    global _PARSED_ARGS
    parsed = _ARG_PARSER.parse_args(args=args)

    message = _validate_arguments(parsed)
    if message:
        _ARG_PARSER.error(message)

    _PARSED_ARGS = parsed
    return _PARSED_ARGS


def get_parser():  # pragma: no cover
    return _ARG_PARSER


def args_are_parsed():
    return _PARSED_ARGS is not None


def get_args():
    return _PARSED_ARGS


def clear_args():
    global _PARSED_ARGS
    _PARSED_ARGS = None
