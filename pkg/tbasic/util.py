# Copyright (c) 2024, the tbasic developers
# All rights reserved.
#
# tbasic is distributed under the BSD 3-Clause License, see LICENSE.

import datetime
import hashlib
import os

__all__ = [
    'InputError',
    'is_iterable',
    'is_iterable_not_str',
    'flatten_non_str',
    'qualified_name',
    'parse_time',
    'parse_period',
    'format_time',
    'hour_of_day',
    'file_digest',
    'path_digest',
    'value_digest'
]


class InputError(Exception):
    """
    Base class for every error caused by bad user input (malformed files, bad
    configuration values, unknown identifiers).

    The command line maps these to :py:attr:`tbasic.returncodes.INPUT_ERROR`.
    """
    pass


def is_iterable(obj):
    """
    Test if an object is iterable.

    :param obj: The object to test.
    :return: True if the object is iterable, False otherwise.
    """
    try:
        iter(obj)
        return True
    except TypeError:
        return False


def is_iterable_not_str(obj):
    """
    Test if an object is iterable, and not a string.

    :param obj: The object to test.
    :return: True if the object is an iterable non string, False otherwise.
    """
    return not isinstance(obj, (str, bytes)) and is_iterable(obj)


def flatten_non_str(iterable):
    """Flatten a nested iterable without affecting strings.

    Example:

    .. code-block:: python

       val = list(flatten_non_str(['profiles.json', ['cascades', ('features.csv',)]]))

       # val == ['profiles.json', 'cascades', 'features.csv']

    :returns: A generator that iterates over the flattened iterable.
    """
    for x in iterable:
        if is_iterable_not_str(x):
            yield from flatten_non_str(x)
        else:
            yield x


def qualified_name(object_instance):
    """Return the fully qualified type name of an object.

    :param object_instance: Object instance.
    :return: Fully qualified name string.
    """
    cls = type(object_instance)
    if cls.__module__ and cls.__module__ != 'builtins':
        return cls.__module__ + '.' + cls.__name__
    return cls.__name__


def parse_time(value):
    """
    Parse a point in time into integer epoch seconds (UTC).

    Accepts integers/floats (already epoch seconds), numeric strings, and ISO-8601
    strings.  ISO-8601 values without an explicit offset are taken to be UTC.

    :raises: :py:exc:`tbasic.util.InputError` if the value cannot be interpreted.
    :param value: The value to parse.
    :return: Epoch seconds as an int.
    """
    if isinstance(value, bool):
        raise InputError('Boolean is not a valid time value: {!r}'.format(value))

    if isinstance(value, (int, float)):
        return int(value)

    if not isinstance(value, str):
        raise InputError('Unsupported time value: {!r}'.format(value))

    text = value.strip()
    try:
        return int(float(text))
    except ValueError:
        pass

    if text.endswith('Z'):
        text = text[:-1] + '+00:00'

    try:
        parsed = datetime.datetime.fromisoformat(text)
    except ValueError:
        raise InputError('Could not parse time value "{}", expected ISO-8601 '
                         'or epoch seconds.'.format(value))

    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=datetime.timezone.utc)

    return int(parsed.timestamp())


def parse_period(start, end):
    """
    Parse a half open ``[start, end)`` period.

    :raises: :py:exc:`tbasic.util.InputError` if either bound is unparsable or the period is empty.
    :return: Tuple of epoch seconds ``(start, end)``.
    """
    period = parse_time(start), parse_time(end)
    if period[1] <= period[0]:
        raise InputError('Empty period: "{}" is not before "{}".'.format(start, end))
    return period


def format_time(epoch):
    """Format epoch seconds as an ISO-8601 UTC string."""
    return datetime.datetime.fromtimestamp(epoch, tz=datetime.timezone.utc).isoformat()


def hour_of_day(epoch):
    """UTC hour of the day of an epoch timestamp, as a float in ``[0, 24)``."""
    return (epoch % 86400) / 3600.0


def file_digest(path, chunk_size=64 * 1024):
    """SHA-256 hex digest of a file's content."""
    digest = hashlib.sha256()
    with open(path, 'rb') as f:
        for chunk in iter(lambda: f.read(chunk_size), b''):
            digest.update(chunk)
    return digest.hexdigest()


def path_digest(path):
    """
    SHA-256 hex digest of a file, or of every file below a directory.

    Directory digests cover relative file names and contents, walked in sorted order,
    so they do not depend on file system enumeration order.
    """
    if not os.path.isdir(path):
        return file_digest(path)

    digest = hashlib.sha256()
    for root, dirs, files in os.walk(path):
        dirs.sort()
        for name in sorted(files):
            full = os.path.join(root, name)
            digest.update(os.path.relpath(full, path).replace(os.sep, '/').encode('utf-8'))
            digest.update(file_digest(full).encode('ascii'))
    return digest.hexdigest()


def value_digest(value):
    """SHA-256 hex digest of the ``repr`` of a (parameter) value."""
    return hashlib.sha256(repr(value).encode('utf-8')).hexdigest()
