#!/usr/bin/env python

import os
import subprocess
import sys

from setuptools import setup, find_packages, Command

PACKAGES = find_packages(include=("oplab", "oplab.*"))

README_FILE = os.path.join(os.path.dirname(__file__), 'README.md')
LONG_DESCRIPTION = open(README_FILE, "rt", encoding="utf8").read()

ENTRY_POINTS = {
    'console_scripts': (
        'oplab = oplab.cli:main',
    ),
}

KEYWORDS = [
    'operator lipschitz',
    'schatten class',
    'schur multipliers',
    'double operator integrals',
]


class CoverageCommand(Command):
    """A setup.py coverage subcommand developers can run locally."""
    description = "run code coverage"
    user_options = []
    initialize_options = finalize_options = lambda self: None

    def run(self):
        """Check coverage on current workdir"""
        sys.exit(subprocess.call(r'''
        coverage run -m unittest oplab.tests
        echo; echo
        coverage report
        coverage html &&
            { echo; echo "See also: file://$(pwd)/htmlcov/index.html"; echo; }
        ''', shell=True, cwd=os.path.dirname(os.path.abspath(__file__))))


class BenchmarkCommand(Command):
    """Run the slow growth and verify timings (python setup.py benchmark)."""
    description = "time the growth studies and verify suites"
    user_options = []
    initialize_options = finalize_options = lambda self: None

    def run(self):
        sys.exit(subprocess.call([sys.executable, "-m", "oplab.tests.time_growth"],
                                 cwd=os.path.dirname(os.path.abspath(__file__))))


TEST_SUITE = "oplab.tests.suite"


if __name__ == '__main__':

    cmdclass = {
        'coverage': CoverageCommand,
        'benchmark': BenchmarkCommand,
    }

    setup(
        name="oplab",
        python_requires='>3.8.0',
        description='Numerical experiments on operator Lipschitz estimates in Schatten classes.',
        long_description=LONG_DESCRIPTION,
        long_description_content_type='text/markdown',
        version="0.1.0",
        packages=PACKAGES,
        install_requires=[
            'setuptools>=36.3',
            'numpy>=1.20.0',
            'scipy>=1.9.0',
            'bottleneck',
            'pebble',
        ],
        extras_require={
            'test': ['coverage'],
            'doc': ['sphinx', 'recommonmark'],
        },
        entry_points=ENTRY_POINTS,
        keywords=KEYWORDS,
        test_suite=TEST_SUITE,
        include_package_data=True,
        zip_safe=False,
        license='GPLv3+',
    )
