import contextlib
import io
import json
import sys
import tempfile
import unittest

import os

script_dir = os.path.dirname(os.path.realpath(__file__))

sys.path.insert(1, os.path.abspath(
    os.path.join(script_dir, os.path.join('..', '..'))))

import tbasic
import tbasic.conf
import tbasic.program
import tbasic.returncodes as returncodes
from tbasic import evaluation, learn, topics
from tbasic.learn import DiffusionModel
from tbasic.topics import Topic

DAY0 = 1259625600
HOUR = 3600


def _write(path, text):
    with open(path, 'w', encoding='utf-8') as f:
        f.write(text)


class ProgramTest(unittest.TestCase):
    def setUp(self):
        self._temp = tempfile.TemporaryDirectory()
        self.dir = self._temp.name

        self.stdout = io.StringIO()
        self.stderr = io.StringIO()
        self._saved = tbasic.conf.stdout, tbasic.conf.stderr
        tbasic.conf.stdout = self.stdout
        tbasic.conf.stderr = self.stderr

    def tearDown(self):
        tbasic.conf.reset()
        tbasic.conf.stdout, tbasic.conf.stderr = self._saved
        self._temp.cleanup()

    def path(self, name):
        return os.path.join(self.dir, name)

    def main(self, *args):
        return tbasic.program.main(list(args))

    def assert_argument_error(self, *args):
        with contextlib.redirect_stderr(io.StringIO()):
            with self.assertRaises(SystemExit) as cm:
                self.main(*args)
        self.assertEqual(returncodes.INPUT_ERROR, cm.exception.code)

    def _small_network(self):
        # a <- b <- c
        _write(self.path('edges.tsv'), 'b\ta\nc\tb\n')
        _write(self.path('tweets.txt'),
               'a|{}|iphone release tonight\n'
               'b|{}|@a iphone release\n'
               'c|{}|iPhone case\n'
               'd|{}|weather\n'.format(DAY0, DAY0 + HOUR, DAY0 + 2 * HOUR, DAY0 + 3 * HOUR))
        topics.save_topics(self.path('topics.json'),
                           [Topic('iphone', ('iphone', 'release'), (DAY0, DAY0 + 24 * HOUR))])

    def test_argument_errors(self):
        self.assert_argument_error()
        self.assert_argument_error('simulate', '--model', 'm.json')
        self.assert_argument_error('bogus')
        self.assert_argument_error('cooccur', '--tweets', 't', '--term', 'a', '--from', '2009-12-01T00:00:00')
        self.assert_argument_error('cooccur', '--tweets', 't', '--term', 'a',
                                   '--from', '2009-12-02T00:00:00', '--to', '2009-12-01T00:00:00')
        self.assert_argument_error('cooccur', '--tweets', 't', '--term', 'a', '--from', 'soon', '--to', 'later')
        self.assert_argument_error('train', '--features', 'f', '--out', 'm', '--folds', '1')
        self.assert_argument_error('train', '--features', 'f', '--out', 'm', '--lambda', '-1')
        self.assert_argument_error('score-terms', '--tweets', 't', '--from', '0', '--to', '10', '--bin-hours', '5')
        self.assert_argument_error('simulate', '--model', 'm', '--edges', 'e', '--profiles', 'p', '--topics', 't',
                                   '--topic', 'x', '--seeds', 's', '--out', 'o', '--clock-origin', '24')
        self.assert_argument_error('run', '--config', 'c.json', '--stage', 'deploy')
        self.assert_argument_error('run', '--config', 'c.json', '--jobs', '0')

        with contextlib.redirect_stdout(io.StringIO()) as out:
            with self.assertRaises(SystemExit) as cm:
                self.main('--version')
        self.assertEqual(0, cm.exception.code)
        self.assertEqual('tbasic {}'.format(tbasic.__version__), out.getvalue().strip())

    def test_parsed_arguments(self):
        args = tbasic.arguments.parse_args(['score-terms', '--tweets', 't.txt',
                                            '--from', '2009-12-01T00:00:00', '--to', str(DAY0 + 10)])
        self.assertTrue(tbasic.arguments.args_are_parsed())
        self.assertIs(args, tbasic.arguments.get_args())

        self.assertEqual('score-terms', args.command)
        self.assertEqual(DAY0, args.start)
        self.assertEqual(DAY0 + 10, args.end)
        self.assertEqual(20, args.top)
        self.assertEqual(4, args.bin_hours)
        self.assertEqual(0, args.verbose)

        args = tbasic.arguments.parse_args(['-vv', 'run', '--config', 'c.json'])
        self.assertEqual(2, args.verbose)
        self.assertEqual('evaluate', args.stage)
        self.assertIsNone(args.jobs)
        self.assertFalse(args.force)

        tbasic.arguments.clear_args()
        self.assertFalse(tbasic.arguments.args_are_parsed())

    def test_read_seeds(self):
        _write(self.path('seeds.txt'), '# seeds\nAlice\n\nbob\t2.5\n')
        self.assertTupleEqual((('alice', 0.0), ('bob', 2.5)), tbasic.program.read_seeds(self.path('seeds.txt')))

        for content in ('a\t1\t2\n', 'a\tsoon\n', '# nothing\n'):
            _write(self.path('seeds.txt'), content)
            with self.assertRaises(tbasic.InputError, msg=content):
                tbasic.program.read_seeds(self.path('seeds.txt'))

    def test_missing_file(self):
        code = self.main('evaluate', '--pred', self.path('nothing.csv'), '--real', self.path('nothing.csv'))

        self.assertEqual(returncodes.INPUT_ERROR, code)
        self.assertTrue(self.stderr.getvalue().startswith('Error: '))

    def test_evaluate(self):
        evaluation.write_series(self.path('real.csv'), [1, 3, 6, 4, 2])
        evaluation.write_prediction(self.path('pred.csv'), [1, 3, 6, 4, 2])

        self.assertEqual(returncodes.SUCCESS, self.main('evaluate', '--pred', self.path('pred.csv'),
                                                        '--real', self.path('real.csv')))
        report = json.loads(self.stdout.getvalue())
        self.assertEqual(0.0, report['volume_error'])
        self.assertAlmostEqual(100.0, report['overall_gain'])

        self.assertEqual(returncodes.SUCCESS, self.main('evaluate', '--pred', self.path('pred.csv'),
                                                        '--real', self.path('real.csv'),
                                                        '--out', self.path('report.json')))
        with open(self.path('report.json'), encoding='utf-8') as f:
            self.assertEqual(report, json.load(f))

        # Too short to be compared
        evaluation.write_series(self.path('real.csv'), [1, 3])
        evaluation.write_prediction(self.path('pred.csv'), [1, 3])
        self.assertEqual(returncodes.INPUT_ERROR, self.main('evaluate', '--pred', self.path('pred.csv'),
                                                            '--real', self.path('real.csv')))

    def test_terms(self):
        self._small_network()

        self.assertEqual(returncodes.SUCCESS, self.main('cooccur', '--tweets', self.path('tweets.txt'),
                                                        '--term', 'iphone'))
        self.assertEqual('release\t2\n@a\t1\ncase\t1\ntonight\t1\n', self.stdout.getvalue())

        self.assertEqual(returncodes.SUCCESS,
                         self.main('score-terms', '--tweets', self.path('tweets.txt'),
                                   '--from', str(DAY0), '--to', str(DAY0 + 24 * HOUR),
                                   '--out', self.path('terms.json')))
        with open(self.path('terms.json'), encoding='utf-8') as f:
            terms = json.load(f)

        # Every term misses some 4 hour bin of the day
        self.assertListEqual([], terms)

    def test_stats(self):
        self._small_network()

        self.assertEqual(returncodes.SUCCESS, self.main('stats', '--edges', self.path('edges.tsv'),
                                                        '--tweets', self.path('tweets.txt')))
        stats = json.loads(self.stdout.getvalue())
        self.assertEqual(4, stats['users'])
        self.assertEqual(4, stats['tweets'])
        self.assertEqual(2, stats['follow_edges'])
        self.assertAlmostEqual(2 / 12, stats['passive_density'])
        self.assertAlmostEqual(1 / 12, stats['active_density'])

        self.stdout.seek(0)
        self.stdout.truncate()
        self.assertEqual(returncodes.SUCCESS, self.main('stats', '--edges', self.path('edges.tsv'),
                                                        '--tweets', self.path('tweets.txt'),
                                                        '--user', 'A', '--hops', '1'))
        stats = json.loads(self.stdout.getvalue())
        self.assertEqual(2, stats['users'])
        self.assertEqual(2, stats['tweets'])

    def test_simulate(self):
        self._small_network()
        self.assertEqual(returncodes.SUCCESS,
                         self.main('profiles', '--tweets', self.path('tweets.txt'),
                                   '--edges', self.path('edges.tsv'), '--out', self.path('profiles.json')))

        learn.save_model(self.path('model.json'), DiffusionModel(-50.0, (0.0,) * 13, sigma=10.0))
        _write(self.path('seeds.txt'), 'a\n')

        def simulate(*extra, topic='iphone'):
            return self.main('simulate', '--model', self.path('model.json'), '--edges', self.path('edges.tsv'),
                             '--profiles', self.path('profiles.json'), '--topics', self.path('topics.json'),
                             '--topic', topic, '--seeds', self.path('seeds.txt'), '--days', '2', '--runs', '3',
                             '--out', self.path('result.csv'), *extra)

        self.assertEqual(returncodes.SUCCESS, simulate('--jobs', '2'))

        # b and c are reached a little later on the first day
        self.assertListEqual([3.0, 0.0], evaluation.read_series(self.path('result.csv')).tolist())

        self.assertEqual(returncodes.INPUT_ERROR, simulate(topic='android'))

        _write(self.path('seeds.txt'), 'zed\n')
        self.assertEqual(returncodes.INPUT_ERROR, simulate())

        _write(self.path('seeds.txt'), 'a\t48\n')
        self.assertEqual(returncodes.INPUT_ERROR, simulate())

    def test_train_single_class(self):
        _write(self.path('features.csv'),
               ','.join(tbasic.features.FEATURE_NAMES + ('label',)) + '\n' +
               ','.join(['0.0'] * 13 + ['diffusion']) + '\n')

        code = self.main('train', '--features', self.path('features.csv'), '--out', self.path('model.json'))
        self.assertEqual(returncodes.INPUT_ERROR, code)
        self.assertFalse(os.path.exists(self.path('model.json')))

    def test_run_errors(self):
        _write(self.path('config.json'), '{"tweets": "t.txt"}')
        self.assertEqual(returncodes.INPUT_ERROR, self.main('run', '--config', self.path('config.json')))

        _write(self.path('config.json'), json.dumps({
            'tweets': 'missing.txt', 'edges': 'missing.tsv', 'topics': 'missing.json', 'out_dir': 'out',
            'learning_period': {'from': 0, 'to': 10}, 'test_period': {'from': 10, 'to': 20}}))
        self.assertEqual(returncodes.INPUT_ERROR, self.main('run', '--config', self.path('config.json')))
        self.assertIn('missing', self.stderr.getvalue())

    def test_synth(self):
        _write(self.path('spec.json'), json.dumps({'n_users': 30, 'max_degree': 5, 'tweet_rate': 0.5,
                                                    'cascade_days': 3}))
        out = self.path('corpus')

        self.assertEqual(returncodes.SUCCESS, self.main('synth', '--spec', self.path('spec.json'),
                                                        '--rng', '3', '--out', out))
        for name in ('edges.tsv', 'tweets.txt', 'topics.json', 'truth.json'):
            self.assertTrue(os.path.isfile(os.path.join(out, name)), msg=name)

        with open(os.path.join(out, 'truth.json'), encoding='utf-8') as f:
            self.assertEqual(3, json.load(f)['spec']['rng_seed'])

        _write(self.path('spec.json'), '{"n_users": 1}')
        self.assertEqual(returncodes.INPUT_ERROR, self.main('synth', '--spec', self.path('spec.json'),
                                                            '--out', out))


if __name__ == '__main__':
    unittest.main()
