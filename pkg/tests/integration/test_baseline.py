#!/usr/bin/python3

import sys
import unittest

import os

script_dir = os.path.dirname(os.path.realpath(__file__))

sys.path.insert(1, os.path.abspath(
                   os.path.join(script_dir, os.path.join('..', '..'))))

from tbasic import cascade, engine, features, learn, synth, topics


class BaselineTest(unittest.TestCase):
    """Predict the planted topics of a synthetic corpus and score them against the 1-time-lag predictor."""

    @classmethod
    def setUpClass(cls):
        cls.spec = synth.SynthSpec(n_users=1000, n_topics=10, rng_seed=5)
        cls.corpus = synth.generate(cls.spec)

        test_period = cls.spec.test_period
        cls.tweets = [t for t in cls.corpus.tweets if test_period[0] <= t.timestamp < test_period[1]]

        cls.sequences = {}
        rebuilt = []
        instances = []
        for topic in cls.corpus.topics:
            sequence = cascade.activation_sequence(topic, cls.tweets)
            cls.sequences[topic.id] = sequence
            rebuilt.append(cascade.reconstruct_cascade(sequence, cls.corpus.graph, topic.id))
            instances.extend(cascade.generate_instances(rebuilt[-1], sequence, cls.corpus.graph, topic, 0))

        X, y = features.instance_matrix(instances, cls.corpus.profiles, {t.id: t for t in cls.corpus.topics})
        samples = cascade.delay_samples(rebuilt, cls.corpus.profiles)
        sigma = learn.calibrate_sigma([d for d, _ in samples], [a for _, a in samples])
        cls.model = learn.train(X, y, lam=1.0, seed=0).with_sigma(sigma)

    def test_gain_over_one_time_lag(self):
        days = self.spec.cascade_days
        template = engine.SimulationConfig(horizon_days=days, runs=20, rng_seed=1)

        wins = 0
        for topic in self.corpus.topics:
            sequence = self.sequences[topic.id]
            self.assertTrue(sequence, msg=topic.id)

            real = topics.real_volume(topic, self.tweets, sequence[0].time, days)
            self.assertGreater(real[1:].sum(), 0.0, msg=topic.id)

            edges = engine.DiffusionEdges(self.model, self.corpus.profiles, topic)
            sweep = engine.sweep_seed_sizes(self.corpus.graph, edges, sequence, real,
                                            (1, 3, 5, 10), template, fallback=3)
            if sweep.report is not None and sweep.report.overall_gain > 0.0:
                wins += 1

        self.assertGreaterEqual(wins, 7)


if __name__ == '__main__':
    unittest.main()
