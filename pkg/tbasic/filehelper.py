# Copyright (c) 2024, the tbasic developers
# All rights reserved.
#
# tbasic is distributed under the BSD 3-Clause License, see LICENSE.

import csv
import json
import os
import shutil
import tempfile
from contextlib import contextmanager

__all__ = ['FileHelper']


class _DummyPrinter:
    def print(*args):
        pass


class FileHelper:
    """A helper class for writing pipeline artifacts.  Instantiating this class with the **printer**
    parameter set to a :py:class:`tbasic.pipeline.StageContext` instance will cause it to print information
    about the files it writes to the stage's output.  Each function can be silenced by setting the **silent**
    parameter of the function to **True**.

    Files are written to a temporary file in the destination directory and renamed into place.
    All text output is UTF-8 with ``\\n`` line endings.
    """

    def __init__(self, printer=None):
        """
        :param printer: An object implementing **print(\\*args)**

        :raises ValueError: If the object passed to the **printer** parameter does not implement a **print** function.
        """
        if printer:
            print_op = getattr(printer, "print", None)
            if not callable(print_op):
                raise ValueError('printer object does not implement print.')

            self._printer = printer
        else:
            self._printer = _DummyPrinter()

    @property
    def printer(self):
        """Return the printer object associated with this :py:class:`tbasic.FileHelper`.

        If one does not exist, return **None**.
        """
        if type(self._printer) is _DummyPrinter:
            return None
        return self._printer

    def _report(self, silent, message):
        if not silent:
            self._printer.print(message)

    def makedirs(self, path, silent=False):
        """Create a directory tree if it does not exist, if the directory tree exists already this function does nothing.

        :param path: The directory path/tree.
        :param silent: If True, don't print information to the stage output.
        """
        if not os.path.isdir(path):
            self._report(silent, 'Created Directory(s): "{}"'.format(path))
        os.makedirs(path, exist_ok=True)

    @contextmanager
    def open_atomic(self, path, newline=None):
        """Context manager yielding a text file object, which replaces **path** when the block exits without error."""
        directory = os.path.dirname(os.path.abspath(path))
        os.makedirs(directory, exist_ok=True)

        fd, temp_path = tempfile.mkstemp(dir=directory, prefix='.tmp-', suffix=os.path.basename(path))
        try:
            with open(fd, 'w', encoding='utf-8', newline=newline) as f:
                yield f
            os.replace(temp_path, path)
        except BaseException:
            try:
                os.remove(temp_path)
            except FileNotFoundError:
                pass
            raise

    def write_json(self, path, obj, silent=False):
        """Write a JSON document, keys in insertion order, two space indentation.

        :param path: Destination file.
        :param obj: JSON serializable object.
        :param silent: If True, don't print information to the stage output.
        """
        self._report(silent, 'Wrote JSON: "{}"'.format(path))
        with self.open_atomic(path, newline='\n') as f:
            json.dump(obj, f, indent=2, ensure_ascii=False, allow_nan=False)
            f.write('\n')

    def write_csv(self, path, header, rows, silent=False):
        """Write a CSV file with a header row.

        :param path: Destination file.
        :param header: Column names.
        :param rows: Iterable of row sequences.
        :param silent: If True, don't print information to the stage output.
        """
        self._report(silent, 'Wrote CSV: "{}"'.format(path))
        with self.open_atomic(path, newline='') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(header)
            writer.writerows(rows)

    def write_lines(self, path, lines, silent=False):
        """Write an iterable of strings, one per line.

        :param path: Destination file.
        :param lines: Iterable of strings without line terminators.
        :param silent: If True, don't print information to the stage output.
        """
        self._report(silent, 'Wrote File: "{}"'.format(path))
        with self.open_atomic(path, newline='\n') as f:
            for line in lines:
                f.write(line)
                f.write('\n')

    def remove(self, path, silent=False, must_exist=False):
        """Remove a file from disk if it exists, otherwise do nothing.

        :raise FileNotFoundError: If must_exist is True, and the file does not exist.

        :param path: The path of the file to remove.
        :param silent: If True, don't print information to the stage output.
        :param must_exist: If set to True, a FileNotFoundError will be raised if the file does not exist.
        """
        self._report(silent, 'Removed File: "{}"'.format(path))
        try:
            os.remove(path)
        except FileNotFoundError:
            if must_exist:
                raise

    def rmtree(self, path, silent=False, must_exist=False):
        """Remove a directory tree if it exists.

        :raises FileNotFoundError: Raised if must_exist is True and the given path does not exist.
        """
        self._report(silent, 'Removed Directory(s): "{}"'.format(path))
        try:
            shutil.rmtree(path)
        except FileNotFoundError:
            if must_exist:
                raise
