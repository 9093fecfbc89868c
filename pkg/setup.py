#!/usr/bin/env python
# coding: utf-8

"""
This script installs tandemdelay.

This docstring contains instructions to maintainers on how to release a
new version.

(1) Prepare the release.

Make sure the code is finalized and the tests pass, including the slow
statistical ones:

    $ TANDEMDELAY_SLOW_TESTS=1 python test_tandemdelay.py

Bump the version number in setup.py and tandemdelay/__init__.py and update
the release date in the HISTORY file.

(2) Build the distribution.

    $ python setup.py sdist

(3) Tag the release.

Create an annotated tag:

    git tag -a -m "Version 0.1.0" "v0.1.0"

"""

import sys

import setuptools as dist
setup = dist.setup


VERSION = '0.1.0'  # Also change in tandemdelay/__init__.py.

FILE_ENCODING = 'utf-8'

README_PATH = 'README.md'
HISTORY_PATH = 'HISTORY.md'

CLASSIFIERS = (
    'Development Status :: 3 - Alpha',
    'Intended Audience :: Science/Research',
    'Programming Language :: Python',
    'Programming Language :: Python :: 3',
    'Topic :: Scientific/Engineering :: Mathematics',
    'Topic :: System :: Networking',
)


def read(path):
    """
    Read and return the contents of a text file as a unicode string.

    """
    with open(path, 'rb') as f:
        b = f.read()
    return b.decode(FILE_ENCODING)


def strip_html_comments(text):
    """Strip HTML comments from a unicode string."""
    lines = text.splitlines(True)  # preserve line endings.

    # Remove HTML comments (which we only allow to take a special form).
    new_lines = [line for line in lines if not line.startswith("<!--")]

    return "".join(new_lines)


def make_long_description():
    """
    Return the Markdown long_description for setup() from source files.

    """
    sections = [strip_html_comments(read(README_PATH)),
                strip_html_comments(read(HISTORY_PATH))]
    return '\n\n'.join(sections)


INSTALL_REQUIRES = [
    'numpy>=1.17',
    'scipy>=1.4',
]

EXTRAS_REQUIRE = {
    # Reading scenario files written in YAML.
    'yaml': ['PyYAML'],
}

PACKAGES = [
    'tandemdelay',
    'tandemdelay.commands',
    # The following packages are only for testing.
    'tandemdelay.tests',
]


def main(sys_argv):

    sys.stderr.write("tandemdelay: using: version %s of %s\n" % (repr(dist.__version__), repr(dist)))

    setup(name='tandemdelay',
          version=VERSION,
          description='End-to-end delay of offloaded tasks in a transmission and '
                      'computation queue tandem',
          long_description=make_long_description(),
          long_description_content_type='text/markdown',
          python_requires='>=3.6',
          install_requires=INSTALL_REQUIRES,
          extras_require=EXTRAS_REQUIRE,
          packages=PACKAGES,
          package_data = {
              # Include scenario files so tests can be run.
              'tandemdelay.tests': ['data/*.json', 'data/*.yaml'],
          },
          entry_points = {
            'console_scripts': [
                'tandemdelay=tandemdelay.commands.main:main',
                'tandemdelay-test=tandemdelay.commands.test:main',
            ],
          },
          classifiers = CLASSIFIERS,
    )


if __name__=='__main__':
    main(sys.argv)
