# Copyright (c) 2024, the tbasic developers
# All rights reserved.
#
# tbasic is distributed under the BSD 3-Clause License, see LICENSE.

from tbasic.entry_points.tbasic_command import main

main()
