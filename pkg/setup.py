#!/usr/bin/env python
from setuptools import setup, find_packages
from dcqo import __version__


with open('README.md') as fh:
    long_description = fh.read()


setup_args = dict(
    name='dcqo',
    version=__version__,
    license='Apache License 2.0',
    packages=find_packages(exclude=['docs', 'examples', 'examples.*']),
    include_package_data=True,
    package_data={'dcqo': ['data/*.json']},
    description='Digitized counterdiabatic quantum optimisation: circuit '
                'synthesis, compression and simulation',
    long_description=long_description,
    long_description_content_type='text/markdown',
    python_requires='>=3.8',
    install_requires=['numpy>=1.21', 'scipy>=1.7'],
    tests_require=[
        'pytest>=7.2',
        'hypothesis>=6.0',
    ],
    entry_points={
        'console_scripts': ['dcqo = dcqo.cli:main'],
    },
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: Apache Software License',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Programming Language :: Python :: 3.12',
        'Operating System :: OS Independent',
        'Topic :: Scientific/Engineering :: Physics',
        'Topic :: Scientific/Engineering :: Mathematics'])


if __name__ == '__main__':
    setup(**setup_args)
