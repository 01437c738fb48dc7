# Copyright (c) 2024, the tbasic developers
# All rights reserved.
#
# tbasic is distributed under the BSD 3-Clause License, see LICENSE.

"""
tbasic return codes.

.. data:: SUCCESS

    0. The command ran successfully.

.. data:: ERROR

    1. Generic error, an exception nobody anticipated.

.. data:: INPUT_ERROR

    2. Bad input: a missing or malformed input file, an invalid configuration
       value, bad command line arguments, or an unknown user/topic identifier.

.. data:: STAGE_FAILURE

    3. A pipeline stage raised an exception while processing valid inputs.
"""

SUCCESS = 0
ERROR = 1
INPUT_ERROR = 2
STAGE_FAILURE = 3
