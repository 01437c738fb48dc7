import json
import sys
import tempfile
import unittest

import os

script_dir = os.path.dirname(os.path.realpath(__file__))

sys.path.insert(1, os.path.abspath(
    os.path.join(script_dir, os.path.join('..', '..'))))

import tbasic


class _Printer:
    def __init__(self):
        self.lines = []

    def print(self, *args):
        self.lines.append(' '.join(str(a) for a in args))


class FileHelperTest(unittest.TestCase):
    def setUp(self):
        self._temp = tempfile.TemporaryDirectory()
        self.dir = self._temp.name

    def tearDown(self):
        self._temp.cleanup()

    def test_printer(self):
        printer = _Printer()
        self.assertIs(printer, tbasic.FileHelper(printer).printer)
        self.assertIsNone(tbasic.FileHelper().printer)

        with self.assertRaises(ValueError):
            tbasic.FileHelper(object())

    def test_makedirs(self):
        printer = _Printer()
        fh = tbasic.FileHelper(printer)

        path = os.path.join(self.dir, 'a', 'b')
        fh.makedirs(path)
        self.assertTrue(os.path.isdir(path))

        # Existing tree, nothing happens and nothing is reported
        fh.makedirs(path)
        self.assertListEqual(['Created Directory(s): "{}"'.format(path)], printer.lines)

    def test_write_json(self):
        printer = _Printer()
        fh = tbasic.FileHelper(printer)

        path = os.path.join(self.dir, 'sub', 'doc.json')
        fh.write_json(path, {'b': 1, 'a': ['é', 2.5]})

        with open(path, encoding='utf-8') as f:
            text = f.read()

        self.assertTrue(text.endswith('\n'))
        self.assertIn('é', text)
        self.assertEqual({'b': 1, 'a': ['é', 2.5]}, json.loads(text))
        self.assertLess(text.index('"b"'), text.index('"a"'))
        self.assertListEqual(['Wrote JSON: "{}"'.format(path)], printer.lines)

        with self.assertRaises(ValueError):
            fh.write_json(path, {'x': float('nan')}, silent=True)

        # The failed write leaves the previous document and no temporary file
        with open(path, encoding='utf-8') as f:
            self.assertEqual({'b': 1, 'a': ['é', 2.5]}, json.load(f))
        self.assertListEqual(['doc.json'], os.listdir(os.path.dirname(path)))

    def test_write_csv_and_lines(self):
        fh = tbasic.FileHelper()

        path = os.path.join(self.dir, 'rows.csv')
        fh.write_csv(path, ('day', 'volume'), [(1, '3.0'), (2, '4.5')])

        with open(path, encoding='utf-8', newline='') as f:
            self.assertEqual('day,volume\n1,3.0\n2,4.5\n', f.read())

        path = os.path.join(self.dir, 'lines.txt')
        fh.write_lines(path, iter(['a', 'b']))

        with open(path, encoding='utf-8', newline='') as f:
            self.assertEqual('a\nb\n', f.read())

    def test_remove(self):
        printer = _Printer()
        fh = tbasic.FileHelper(printer)

        path = os.path.join(self.dir, 'file.txt')
        fh.write_lines(path, ['x'], silent=True)

        fh.remove(path)
        self.assertFalse(os.path.exists(path))

        fh.remove(path, silent=True)

        with self.assertRaises(FileNotFoundError):
            fh.remove(path, silent=True, must_exist=True)

        tree = os.path.join(self.dir, 'tree')
        fh.makedirs(os.path.join(tree, 'sub'), silent=True)
        fh.write_lines(os.path.join(tree, 'sub', 'f.txt'), ['x'], silent=True)

        fh.rmtree(tree)
        self.assertFalse(os.path.exists(tree))

        fh.rmtree(tree, silent=True)

        with self.assertRaises(FileNotFoundError):
            fh.rmtree(tree, silent=True, must_exist=True)

        self.assertListEqual(['Removed File: "{}"'.format(path),
                              'Removed Directory(s): "{}"'.format(tree)], printer.lines)


if __name__ == '__main__':
    unittest.main()
