# Copyright (c) 2024, the tbasic developers
# All rights reserved.
#
# tbasic is distributed under the BSD 3-Clause License, see LICENSE.

import sys

import tbasic.program


def main():
    sys.exit(tbasic.program.main())


if __name__ == "__main__":
    main()
