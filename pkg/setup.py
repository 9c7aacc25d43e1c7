# -*- coding: utf-8 -*-
# *************************************
# elastoslab: free-boundary elastodynamics laboratory
#
# Copyright (c) 2021 Calysto Developers
#
# *************************************

"""
elastoslab setup
"""
import io
import os

import setuptools

HERE = os.path.abspath(os.path.dirname(__file__))

# The name of the project
name = "elastoslab"


# Get our version
def get_version(file, name="__version__"):
    """Get the version of the package from the given file by
    executing it and extracting the given `name`.
    """
    path = os.path.realpath(file)
    version_ns = {}
    with io.open(path, encoding="utf8") as f:
        exec(f.read(), {}, version_ns)
    return version_ns[name]


version = get_version(os.path.join(HERE, "elastoslab/_version.py"))

with open("README.md", "r") as fh:
    long_description = fh.read()

setup_args = dict(
    name=name,
    version=version,
    author="Calysto Developers",
    description="A numerical laboratory for kappa-regularized free-boundary incompressible elastodynamics",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=setuptools.find_packages(exclude=["tests"]),
    package_data={"elastoslab": ["configs/*.cfg"]},
    install_requires=["numpy", "scipy>=1.12", "Pillow"],
    extras_require={"progress": ["tqdm"], "test": ["pytest"]},
    entry_points={"console_scripts": ["elastoslab=elastoslab.cli:main"]},
    python_requires=">=3.8",
    license="BSD-3-Clause",
    platforms="Linux, Mac OS X, Windows",
    keywords=["elastodynamics", "free boundary", "mollifier", "energy estimates", "python"],
    classifiers=[
        "License :: OSI Approved :: BSD License",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Topic :: Scientific/Engineering :: Physics",
    ],
)

if __name__ == "__main__":
    setuptools.setup(**setup_args)
