#!/usr/bin/env python
# -*- coding: utf-8 -*-
import sys

from setuptools import find_packages, setup

_MMBO_VERSION = '0.1.0'

if sys.version_info < (3, 7):
  raise RuntimeError("Sorry, we only support Python>=3.7!")

# ===========================================================================
# Main
# ===========================================================================
with open('README.rst') as readme_file:
  readme = readme_file.read()

requirements = [
    "numpy>=1.17",
    "scipy>=1.4",
    "pandas",
    "tqdm",
    "omegaconf>=2.0",
]

setup(
    classifiers=[
        'Development Status :: 3 - Alpha',
        'License :: OSI Approved :: MIT License',
        'Natural Language :: English',
        'Programming Language :: Python :: 3',
        'Operating System :: MacOS :: MacOS X',
        'Operating System :: Microsoft :: Windows',
        'Operating System :: POSIX :: Linux',
        'Topic :: Scientific/Engineering :: Mathematics',
        'Intended Audience :: Science/Research',
    ],
    description="Maximal monotone boundary relations for the 1D wave "
    "operator, with numerical verification",
    long_description=readme,
    long_description_content_type='text/x-rst',
    scripts=['bin/mmbo-verify'],
    install_requires=requirements,
    license="MIT license",
    include_package_data=True,
    keywords='mmbo',
    name='mmbo',
    packages=find_packages(exclude=['tests']),
    test_suite='tests',
    version=_MMBO_VERSION,
    zip_safe=False,
)
