import sys
import tempfile
import unittest

import os

script_dir = os.path.dirname(os.path.realpath(__file__))

sys.path.insert(1, os.path.abspath(
    os.path.join(script_dir, os.path.join('..', '..'))))

import tbasic.util


class UtilTest(unittest.TestCase):
    def test_flatten_non_str(self):
        val = list(tbasic.util.flatten_non_str(['this', ['is', ('an',), 'example']]))
        self.assertListEqual(val, ['this', 'is', 'an', 'example'])

        val = list(tbasic.util.flatten_non_str(['this', {'is', ('an',), 'example'}]))
        self.assertCountEqual(val, {'this', 'is', 'an', 'example'})

    def test_is_iterable(self):
        self.assertTrue(tbasic.util.is_iterable([1, 2, 3]))
        self.assertTrue(tbasic.util.is_iterable((1, 2, 3)))
        self.assertTrue(tbasic.util.is_iterable('abc'))
        self.assertFalse(tbasic.util.is_iterable(1))

        self.assertTrue(tbasic.util.is_iterable_not_str([1, 2, 3]))
        self.assertFalse(tbasic.util.is_iterable_not_str('abc'))
        self.assertFalse(tbasic.util.is_iterable_not_str(b'abc'))

    def test_qualified_name(self):
        self.assertEqual('tbasic.util.InputError', tbasic.util.qualified_name(tbasic.util.InputError()))
        self.assertEqual('ValueError', tbasic.util.qualified_name(ValueError()))

    def test_parse_time(self):
        self.assertEqual(1259625600, tbasic.util.parse_time(1259625600))
        self.assertEqual(1259625600, tbasic.util.parse_time(1259625600.7))
        self.assertEqual(1259625600, tbasic.util.parse_time('1259625600'))

        # Without an offset, ISO-8601 is UTC
        self.assertEqual(1259625600, tbasic.util.parse_time('2009-12-01T00:00:00'))
        self.assertEqual(1259625600, tbasic.util.parse_time('2009-12-01T00:00:00Z'))
        self.assertEqual(1259625600, tbasic.util.parse_time('2009-12-01T01:00:00+01:00'))
        self.assertEqual(1259625600, tbasic.util.parse_time('2009-12-01'))

        for bad in ('yesterday', '', True, None, [1]):
            with self.assertRaises(tbasic.util.InputError, msg=repr(bad)):
                tbasic.util.parse_time(bad)

    def test_parse_period(self):
        self.assertTupleEqual((0, 3600), tbasic.util.parse_period(0, '3600'))

        with self.assertRaises(tbasic.util.InputError):
            tbasic.util.parse_period(3600, 3600)

        with self.assertRaises(tbasic.util.InputError):
            tbasic.util.parse_period('2009-12-02', '2009-12-01')

    def test_time_formatting(self):
        self.assertEqual('2009-12-01T00:00:00+00:00', tbasic.util.format_time(1259625600))
        self.assertEqual(0.0, tbasic.util.hour_of_day(1259625600))
        self.assertEqual(13.5, tbasic.util.hour_of_day(1259625600 + 13 * 3600 + 1800))

    def test_digests(self):
        with tempfile.TemporaryDirectory() as temp_dir:
            a = os.path.join(temp_dir, 'a.txt')
            with open(a, 'w') as f:
                f.write('hello')

            # sha256 of b'hello'
            self.assertEqual('2cf24dba5fb0a30e26e83b2ac5b9e29e1b161e5c1fa7425e73043362938b9824',
                             tbasic.util.file_digest(a))

            self.assertEqual(tbasic.util.file_digest(a), tbasic.util.path_digest(a))

            sub = os.path.join(temp_dir, 'sub')
            os.makedirs(os.path.join(sub, 'inner'))
            with open(os.path.join(sub, 'x.txt'), 'w') as f:
                f.write('x')
            with open(os.path.join(sub, 'inner', 'y.txt'), 'w') as f:
                f.write('y')

            before = tbasic.util.path_digest(sub)
            self.assertEqual(before, tbasic.util.path_digest(sub))

            with open(os.path.join(sub, 'inner', 'y.txt'), 'w') as f:
                f.write('z')

            self.assertNotEqual(before, tbasic.util.path_digest(sub))

            # A renamed file changes the digest of its directory
            with open(os.path.join(sub, 'inner', 'y.txt'), 'w') as f:
                f.write('y')
            os.rename(os.path.join(sub, 'x.txt'), os.path.join(sub, 'w.txt'))
            self.assertNotEqual(before, tbasic.util.path_digest(sub))

    def test_value_digest(self):
        self.assertEqual(tbasic.util.value_digest((1, 'a', [2.5])),
                         tbasic.util.value_digest((1, 'a', [2.5])))
        self.assertNotEqual(tbasic.util.value_digest((1, 'a')),
                            tbasic.util.value_digest((1, 'b')))


if __name__ == '__main__':
    unittest.main()
