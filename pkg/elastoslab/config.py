# -*- coding: utf-8 -*-
# *************************************
# elastoslab: free-boundary elastodynamics laboratory
#
# Copyright (c) 2021 Calysto Developers
#
# *************************************

import ast
import os

ELASTOSLABPATH = None
DEFAULT_TOLERANCES = {
    "tau_ell": 1e-10,  # relative elliptic residual
    "tau_con": 1e-8,  # constraint residuals of initial data
    "eps_j": 1e-8,  # nodewise determinant floor
    "spd_floor": 0.3,  # minimum eigenvalue of the pressure coefficients
    "max_iter": 500,  # Krylov iterations per pressure solve
    "ell_floor": 1e-14,  # absolute floor of the residual scale
}
TOLERANCES = dict(DEFAULT_TOLERANCES)


def get_search_paths():
    """
    Get the elastoslab configuration search paths
    """
    custom = os.environ.get("ELASTOSLABPATH", ELASTOSLABPATH)
    here = os.path.abspath(os.path.dirname(__file__))
    if custom is not None:
        if len(custom) > 0 and custom[-1] != "/":
            custom += "/"
        paths = [custom]
    else:
        paths = []
    paths += ["./configs/", os.path.join(here, "configs/")]
    return paths


def set_search_path(path):
    """
    Set a custom search path for run configurations
    """
    global ELASTOSLABPATH
    ELASTOSLABPATH = path


def setup_tolerances():
    """
    Override tolerances from $ELASTOSLAB_TOLERANCES, a dict literal
    such as "{'tau_ell': 1e-9}".
    """
    text = os.environ.get("ELASTOSLAB_TOLERANCES")
    if text:
        overrides = ast.literal_eval(text)
        set_tolerance(**overrides)


def set_tolerance(name=None, value=None, **kwargs):
    """
    Set one or more tolerances. With no arguments, return the valid names.
    """
    if name is None and not kwargs:
        return sorted(TOLERANCES)
    if name is not None:
        kwargs[name] = value
    for key, value in kwargs.items():
        if key not in TOLERANCES:
            raise ValueError("unknown tolerance: %r" % key)
        TOLERANCES[key] = type(DEFAULT_TOLERANCES[key])(value)


def get_tolerance(name):
    if name not in TOLERANCES:
        raise ValueError("unknown tolerance: %r" % name)
    return TOLERANCES[name]


def reset_tolerances():
    TOLERANCES.clear()
    TOLERANCES.update(DEFAULT_TOLERANCES)
