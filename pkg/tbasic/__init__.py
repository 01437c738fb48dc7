# Copyright (c) 2024, the tbasic developers
# All rights reserved.
#
# tbasic is distributed under the BSD 3-Clause License, see LICENSE.

"""
Prediction of the temporal dynamics of information diffusion in social networks.

The pipeline learns, from one month of activity, the probability that a user
passes a topic on to a follower at a given time of day, then simulates the
spread of the topic over continuous time from a few seed users and scores the
predicted daily volume against the observed one.
"""

__author__ = 'the tbasic developers'
__copyright__ = 'Copyright (c) 2024, the tbasic developers'
__license__ = 'Three Clause BSD'
__version__ = '0.4.0'


from .filehelper import FileHelper

from .util import InputError

from .corpus import \
    CorpusFormatError, \
    TweetRecord, \
    SocialGraph, \
    UserProfile, \
    load_tweets, \
    load_follow_edges, \
    build_profiles

from .topics import \
    Topic, \
    NotRecurrentError, \
    TopicFormatError, \
    score_term, \
    rank_terms, \
    load_topics

from .cascade import \
    SpreadingCascade, \
    LabeledInstance, \
    activation_sequence, \
    reconstruct_cascade, \
    generate_instances

from .features import \
    FeatureVector, \
    ReceptivityRangeError, \
    assemble

from .learn import \
    DiffusionModel, \
    TrainingError, \
    DelayCalibrationError, \
    predict_probability, \
    train, \
    cross_validate, \
    calibrate_sigma

from .engine import \
    SimulationConfig, \
    SimulationResult, \
    Simulator, \
    UnknownSeedError, \
    simulate

from .evaluation import \
    SeriesError, \
    Report, \
    compare

from .synth import \
    SynthSpec, \
    SynthSpecError, \
    generate

from .config import \
    PipelineConfig, \
    ConfigError, \
    load_config

from .pipeline import \
    Pipeline, \
    StageContext, \
    StageException, \
    InputNotFoundException, \
    UndefinedStageException, \
    RedefinedStageException, \
    run_pipeline

__all__ = [
    'FileHelper',
    'InputError',
    'CorpusFormatError',
    'TweetRecord',
    'SocialGraph',
    'UserProfile',
    'load_tweets',
    'load_follow_edges',
    'build_profiles',
    'Topic',
    'NotRecurrentError',
    'TopicFormatError',
    'score_term',
    'rank_terms',
    'load_topics',
    'SpreadingCascade',
    'LabeledInstance',
    'activation_sequence',
    'reconstruct_cascade',
    'generate_instances',
    'FeatureVector',
    'ReceptivityRangeError',
    'assemble',
    'DiffusionModel',
    'TrainingError',
    'DelayCalibrationError',
    'predict_probability',
    'train',
    'cross_validate',
    'calibrate_sigma',
    'SimulationConfig',
    'SimulationResult',
    'Simulator',
    'UnknownSeedError',
    'simulate',
    'SeriesError',
    'Report',
    'compare',
    'SynthSpec',
    'SynthSpecError',
    'generate',
    'PipelineConfig',
    'ConfigError',
    'load_config',
    'Pipeline',
    'StageContext',
    'StageException',
    'InputNotFoundException',
    'UndefinedStageException',
    'RedefinedStageException',
    'run_pipeline'
]
