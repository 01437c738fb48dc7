# Copyright (c) 2024, the tbasic developers
# All rights reserved.
#
# tbasic is distributed under the BSD 3-Clause License, see LICENSE.

"""
Global configuration module.

.. py:attribute:: tbasic.conf.stdout

    (set-able) Default file object used by the command line to print results, defaults to **sys.stdout**

.. py:attribute:: tbasic.conf.stderr

    (set-able) Default file object used for error output and log records, defaults to **sys.stderr**.

.. py:attribute:: tbasic.conf.log_level

    (set-able) Level of the ``tbasic`` package logger installed by :py:func:`tbasic.conf.configure_logging`,
    defaults to **logging.WARNING**.
"""

import logging
import sys

LOG_FORMAT = '%(levelname)s %(name)s: %(message)s'

stderr = sys.stderr
stdout = sys.stdout
log_level = logging.WARNING

_handler = None


def configure_logging(verbosity=0):
    """
    Install a single stream handler on the ``tbasic`` logger writing to :py:attr:`tbasic.conf.stderr`.

    Calling this again replaces the previous handler, so it picks up a reassigned **stderr**.

    :param verbosity: 0 for warnings, 1 for info, 2 or more for debug output.
    """
    global _handler, log_level

    log_level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)

    logger = logging.getLogger('tbasic')
    if _handler is not None:
        logger.removeHandler(_handler)

    _handler = logging.StreamHandler(stderr)
    _handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logger.addHandler(_handler)
    logger.setLevel(log_level)


def reset():  # pragma: no cover
    """Reset all configuration to its default state."""

    global stderr, stdout, log_level, _handler

    stderr = sys.stderr
    stdout = sys.stdout
    log_level = logging.WARNING

    if _handler is not None:
        logging.getLogger('tbasic').removeHandler(_handler)
        _handler = None
