# -*- coding: utf-8 -*-
# *************************************
# elastoslab: free-boundary elastodynamics laboratory
#
# Copyright (c) 2021 Calysto Developers
#
# *************************************

from ._version import __version__  # noqa: F401
from .config import get_tolerance, set_tolerance, setup_tolerances  # noqa: F401
from .geometry import FlowMap, InitialDeformation  # noqa: F401
from .grid import Grid  # noqa: F401
from .initial_data import BoundaryPartition, assemble_initial_data, make_G0, make_velocity  # noqa: F401
from .mollifier import make_kernel, mollify  # noqa: F401
from .runconfig import RunConfig, build_initial_data, parse_config  # noqa: F401
from .simulation import Simulation, Trajectory, run  # noqa: F401
from .utils import load_config  # noqa: F401

setup_tolerances()  # checks os.environ
