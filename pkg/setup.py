#!/usr/bin/env python3
"""
setup script for miespec
"""

from setuptools import setup, find_namespace_packages

# read the readme file for the long description
with open("readme.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

# read requirements from requirements.txt, skip comments and empty lines
with open("requirements.txt", "r", encoding="utf-8") as fh:
    requirements = [line.split("#")[0].strip() for line in fh if line.strip() and not line.startswith("#")]

# configure the package setup
setup(
    name="miespec",
    version="0.3.0",
    description="Analytic spectra, eigenstates and SU(1,1) ladder operators of the N-dimensional Mie-type potential",
    long_description=long_description,
    long_description_content_type="text/markdown",
    # the package lives under src/ and is imported as src.miespec
    packages=find_namespace_packages(include=["src", "src.*"]),
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Topic :: Scientific/Engineering :: Physics",
    ],
    python_requires=">=3.9",
    # install all the dependencies from requirements.txt
    install_requires=requirements,
    entry_points={
        "console_scripts": [
            "miespec=src.miespec.cli:main",
        ],
    },
)
