# -*- coding: utf-8 -*-

from setuptools import setup, find_packages
from os import path


setup(
    name="stride",
    version='0.1.0',
    description="Variable-frequency legged locomotion MPC",
    author="",
    url="",
    install_requires=[
        'numpy',
        'scipy',
        'torch',
        'matplotlib',
        'termcolor',
    ],
    package_dir={"": "src"},
    packages=find_packages(where='src'),
    package_data={
        'stride': [
            'data/models/*.json',
            'data/scenarios/*.json',
            'data/weights/*.json',
            'data/datasets/*.csv',
        ],
    },
    entry_points={
        'console_scripts': [
                'stride=stride.tool:main'
        ],
    },
    classifiers=[
    ],
)
