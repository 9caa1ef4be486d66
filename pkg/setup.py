"""Setup script used for package installation."""

# This file is part of cdnsla.
# cdnsla Copyright (C) 2026 cdnsla developers
# See the "licenses" directory for full license information.


import os
from setuptools import setup, find_packages


def read(fname):
    return open(os.path.join(os.path.dirname(__file__), fname)).read()


setup(
    name='cdnsla',
    version='1.0',
    description='Price competition among CDNs and latency-bounded request routing.',
    long_description=read('README.rst'),
    packages=find_packages(exclude=['cdnsla_tests', 'cdnsla_tests.*']),
    scripts=['bin/cdnsla'],
    install_requires=['numpy', 'scipy'],
    extras_require={'test': ['pytest', 'mock']},
    author="cdnsla developers",
    classifiers=['Development Status :: 4 - Beta'],
    license='MIT'
)
