import math
import sys
import tempfile
import unittest

import os

script_dir = os.path.dirname(os.path.realpath(__file__))

sys.path.insert(1, os.path.abspath(
    os.path.join(script_dir, os.path.join('..', '..'))))

import numpy as np

import tbasic
import tbasic.learn as learn
from tbasic.corpus import UserProfile
from tbasic.learn import ABLATION_GROUPS, DelayCalibrationError, DiffusionModel, TrainingError

ZEROS = (0.0,) * 13


def _planted_set(w0, w, n, seed):
    rng = np.random.default_rng(seed)
    X = rng.uniform(0.0, 1.0, size=(n, 13))
    p = 1.0 / (1.0 + np.exp(w0 + X @ np.asarray(w)))
    y = (rng.uniform(size=n) < p).astype(int)
    return X, y


class ModelTest(unittest.TestCase):
    def test_validation(self):
        with self.assertRaises(ValueError):
            DiffusionModel(0.0, (0.0,) * 12)

        with self.assertRaises(ValueError):
            DiffusionModel(float('nan'), ZEROS)

        with self.assertRaises(ValueError):
            DiffusionModel(0.0, ZEROS, sigma=0.0)

        with self.assertRaises(ValueError):
            DiffusionModel(0.0, ZEROS, sigma=24.5)

        model = DiffusionModel(1, [0] * 13)
        self.assertTupleEqual(ZEROS, model.w)
        self.assertEqual(24.0, model.with_sigma(24).sigma)
        self.assertListEqual([1.0] + [0.0] * 13, model.theta.tolist())

    def test_model_file(self):
        model = DiffusionModel(-0.25, tuple(range(13)), sigma=6.5, lam=0.5, trained_on='2009-11', n_instances=40)

        with tempfile.TemporaryDirectory() as temp_dir:
            path = os.path.join(temp_dir, 'model.json')
            learn.save_model(path, model)
            self.assertEqual(model, learn.load_model(path))

            with open(path, 'w', encoding='utf-8') as f:
                f.write('{"w0": 0, "w": [1, 2], "sigma": 10, "lambda": 1}')

            with self.assertRaises(tbasic.InputError):
                learn.load_model(path)

            with open(path, 'w', encoding='utf-8') as f:
                f.write('{"w0": 0')

            with self.assertRaises(tbasic.InputError):
                learn.load_model(path)


class PredictTest(unittest.TestCase):
    def test_examples(self):
        self.assertAlmostEqual(0.5, learn.predict_probability(DiffusionModel(0.0, ZEROS), [0.3] * 13))
        self.assertAlmostEqual(0.8808, learn.predict_probability(DiffusionModel(-2.0, ZEROS), ZEROS), places=4)

        with self.assertRaises(ValueError):
            learn.predict_probability(DiffusionModel(0.0, ZEROS), [0.0] * 12)

    def test_oracle(self):
        rng = np.random.default_rng(12)
        for _ in range(50):
            w0 = float(rng.normal(0.0, 2.0))
            w = rng.normal(0.0, 2.0, size=13)
            f = rng.uniform(0.0, 1.0, size=13)
            model = DiffusionModel(w0, tuple(w), sigma=float(rng.uniform(0.1, 24.0)))

            z = w0 + sum(a * b for a, b in zip(w, f))
            self.assertAlmostEqual(1.0 / (1.0 + math.exp(z)), learn.predict_probability(model, f), delta=1e-9)

            profile = UserProfile('a', message_count=int(rng.integers(0, 1500)))
            expected = (1.0 - min(profile.message_count / 729.6, 1.0)) * model.sigma
            self.assertAlmostEqual(expected, learn.estimate_delay(model, profile), delta=1e-9)

    def test_monotone_and_open_interval(self):
        w = [0.0] * 13
        w[0] = 2.0
        model = DiffusionModel(0.0, w)

        low = [0.0] * 13
        high = [0.0] * 13
        high[0] = 1.0

        # A larger linear term gives a smaller probability
        self.assertLess(learn.predict_probability(model, high), learn.predict_probability(model, low))

        extreme = DiffusionModel(1000.0, ZEROS)
        self.assertGreater(learn.predict_probability(extreme, ZEROS), 0.0)
        extreme = DiffusionModel(-1000.0, ZEROS)
        self.assertLess(learn.predict_probability(extreme, ZEROS), 1.0)

    def test_predict_matrix(self):
        model = DiffusionModel(0.3, tuple(np.linspace(-1, 1, 13)))
        X = np.random.default_rng(1).uniform(size=(5, 13))

        expected = [learn.predict_probability(model, row) for row in X]
        np.testing.assert_allclose(expected, learn.predict_matrix(model, X))


class LikelihoodTest(unittest.TestCase):
    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(4)
        h = 1e-5

        for _ in range(20):
            X, y = _planted_set(float(rng.normal()), rng.normal(0.0, 2.0, size=13), 50, int(rng.integers(1000)))
            theta = rng.normal(size=14)
            lam = float(rng.uniform(0.0, 2.0))

            g = learn.gradient(theta, X, y, lam)
            numeric = np.zeros(14)
            for j in range(14):
                e = np.zeros(14)
                e[j] = h
                numeric[j] = (learn.log_likelihood(theta + e, X, y, lam)
                              - learn.log_likelihood(theta - e, X, y, lam)) / (2 * h)

            self.assertLessEqual(np.linalg.norm(numeric - g) / max(np.linalg.norm(g), 1.0), 1e-5)

    def test_zero_weights(self):
        X = np.zeros((4, 13))
        y = np.array([1, 0, 1, 0])
        self.assertAlmostEqual(4 * math.log(0.5), learn.log_likelihood(np.zeros(14), X, y, 1.0))


class TrainTest(unittest.TestCase):
    def test_recover_planted_weights(self):
        w = [0.0] * 13
        w[0] = 3.0
        w[1] = -3.0
        X, y = _planted_set(0.5, w, 4000, 11)

        model = learn.train(X, y, lam=1.0, trained_on='synthetic', tol=1e-6)

        self.assertEqual(4000, model.n_instances)
        self.assertEqual('synthetic', model.trained_on)
        self.assertAlmostEqual(3.0, model.w[0], delta=0.6)
        self.assertAlmostEqual(-3.0, model.w[1], delta=0.6)
        for j in range(2, 13):
            self.assertLess(abs(model.w[j]), 0.6)

        self.assertGreater(learn.log_likelihood(model.theta, X, y, 1.0),
                           learn.log_likelihood(np.zeros(14), X, y, 1.0))

    def test_deterministic(self):
        X, y = _planted_set(0.0, np.linspace(-1, 1, 13), 200, 5)
        self.assertEqual(learn.train(X, y, seed=3), learn.train(X, y, seed=3))

    def test_bad_training_sets(self):
        X = np.zeros((4, 13))

        with self.assertRaises(TrainingError):
            learn.train(X, [1, 1, 1, 1])

        with self.assertRaises(TrainingError):
            learn.train(X, [1, 0, 1])

        with self.assertRaises(TrainingError):
            learn.train(np.zeros((4, 12)), [1, 0, 1, 0])

        X[2, 5] = float('inf')
        with self.assertRaises(TrainingError) as cm:
            learn.train(X, [1, 0, 1, 0])
        self.assertEqual(2, cm.exception.row)

        with self.assertRaises(ValueError):
            learn.train(np.zeros((4, 13)), [1, 0, 1, 0], lam=-1)

        # Training errors are input errors
        self.assertTrue(issubclass(TrainingError, tbasic.InputError))


class CrossValidationTest(unittest.TestCase):
    def setUp(self):
        w = [0.0] * 13
        w[0] = 20.0
        w[1] = -20.0
        self.X, self.y = _planted_set(0.0, w, 1000, 21)

    def test_accuracy(self):
        accuracy = learn.cross_validate(self.X, self.y, folds=5, tol=1e-6)
        self.assertGreater(accuracy, 0.85)
        self.assertLessEqual(accuracy, 1.0)

        self.assertEqual(accuracy, learn.cross_validate(self.X, self.y, folds=5, tol=1e-6))

        # Without the informative columns the model cannot do much better than chance
        uninformative = learn.cross_validate(self.X, self.y, folds=5, columns=range(2, 13), tol=1e-6)
        self.assertLess(uninformative, accuracy)

    def test_ablation(self):
        result = learn.dimension_ablation(self.X, self.y, folds=3)

        self.assertListEqual(list(ABLATION_GROUPS), list(result))
        for accuracy in result.values():
            self.assertGreaterEqual(accuracy, 0.0)
            self.assertLessEqual(accuracy, 1.0)

        # Both informative columns are social features
        self.assertGreater(result['social'], 0.85)

    def test_bad_arguments(self):
        with self.assertRaises(ValueError):
            learn.cross_validate(self.X, self.y, folds=1)

        with self.assertRaises(TrainingError):
            learn.cross_validate(np.zeros((3, 13)), [1, 0, 1], folds=5)


class WeightTest(unittest.TestCase):
    def test_normalized_weights(self):
        w = [0.0] * 13
        w[0] = 2.0
        w[1] = -4.0
        self.assertTupleEqual((0.5, 1.0) + (0.0,) * 11, learn.normalized_weights(DiffusionModel(0.0, w)))

        self.assertTupleEqual(ZEROS, learn.normalized_weights(DiffusionModel(3.0, ZEROS)))


class DelayTest(unittest.TestCase):
    def test_estimate_delay(self):
        model = DiffusionModel(0.0, ZEROS, sigma=10.0)

        self.assertEqual(10.0, learn.estimate_delay(model, UserProfile('a')))
        self.assertEqual(0.0, learn.estimate_delay(model, UserProfile('a', message_count=1000)))
        self.assertAlmostEqual(10.0 * (1 - 365 / 729.6), learn.estimate_delay(model, UserProfile('a', message_count=365)))

    def test_calibrate_example(self):
        self.assertAlmostEqual(10.0, learn.calibrate_sigma([5.0], [0.5]))

    def test_calibrate_planted(self):
        rng = np.random.default_rng(17)
        activities = rng.uniform(0.0, 0.9, size=300)
        delays = (1.0 - activities) * 7.0

        self.assertAlmostEqual(7.0, learn.calibrate_sigma(delays, activities), delta=0.01)

        noisy = delays + rng.normal(0.0, 0.5, size=300)
        sigma = learn.calibrate_sigma(noisy, activities)
        self.assertAlmostEqual(7.0, sigma, delta=0.2)

        # sigma minimizes the delay error
        best = learn.sigma_error(sigma, noisy, activities)
        for other in (sigma - 0.5, sigma + 0.5):
            self.assertLess(best, learn.sigma_error(other, noisy, activities))

    def test_grid_agrees_with_closed_form(self):
        rng = np.random.default_rng(23)
        for _ in range(50):
            n = int(rng.integers(1, 200))
            activities = rng.uniform(0.0, 0.95, size=n)
            delays = (1.0 - activities) * rng.uniform(0.1, 30.0) + rng.normal(0.0, 1.0, size=n)

            coarse = learn.grid_sigma(delays, activities)
            sigma = learn.calibrate_sigma(delays, activities)

            self.assertAlmostEqual(round(coarse / learn.SIGMA_STEP) * learn.SIGMA_STEP, coarse, places=9)
            self.assertLessEqual(abs(coarse - sigma), learn.SIGMA_STEP + 1e-9)
            self.assertLessEqual(learn.sigma_error(sigma, delays, activities),
                                 learn.sigma_error(coarse, delays, activities) + 1e-9)

    def test_calibrate_clamped(self):
        self.assertEqual(24.0, learn.calibrate_sigma([100.0, 80.0], [0.0, 0.1]))
        self.assertEqual(0.01, learn.calibrate_sigma([0.0, 0.0], [0.0, 0.5]))

    def test_calibrate_errors(self):
        with self.assertRaises(DelayCalibrationError):
            learn.calibrate_sigma([], [])

        with self.assertRaises(DelayCalibrationError):
            learn.calibrate_sigma([1.0, 2.0], [1.0, 1.0])

        with self.assertRaises(DelayCalibrationError):
            learn.calibrate_sigma([1.0, 2.0], [0.5])


if __name__ == '__main__':
    unittest.main()
