#!/usr/bin/env python
# coding: utf-8

"""
Runs project tests.

This script is a substitute for running--

    python -m tandemdelay.commands.test

that also checks the files of the source directory (README.md doctests
and the setup.py version).

"""

import sys

from tandemdelay.commands import test
from tandemdelay.tests.main import FROM_SOURCE_OPTION


def main(sys_argv=sys.argv):
    sys.argv.insert(1, FROM_SOURCE_OPTION)
    test.main()


if __name__=='__main__':
    main()
