# -*- coding: utf-8 -*-
# *************************************
# elastoslab: free-boundary elastodynamics laboratory
#
# Copyright (c) 2021 Calysto Developers
#
# *************************************

"""
Run configurations: flat `key = value` files with `#` comments.

    # standard perturbed run
    n1 = 32
    kappa = 0.2, 0.1, 0.05, 0.025
    displacement = wave
    displacement_amplitude = 0.02
"""

from .errors import ParseError, ValidationError
from .grid import Grid, _is_power_of_two
from .initial_data import (
    DISPLACEMENT_RECIPES,
    G0_RECIPES,
    REGIMES,
    VELOCITY_RECIPES,
    BoundaryPartition,
    assemble_initial_data,
    make_displacement,
    make_velocity,
)

DEFAULTS = {
    "n1": 32,
    "n2": 32,
    "n3": 32,
    "kappa": [0.1],
    "T": 0.5,
    "dt": 1e-3,
    "cfl": 0.3,
    "velocity": "zero",
    "velocity_amplitude": 0.02,
    "displacement": "none",
    "displacement_amplitude": 0.0,
    "g0": "canonical",
    "g0_amplitude": 0.1,
    "bottom": "NC",
    "top": "NC",
    "lambda": 0.1,
    "delta": 0.1,
    "snapshot_every": 50,
    "record_every": 10,
    "track_deformation": True,
    "output": "runs",
    "seed": 12345,
    "quiet": False,
}

CHOICES = {
    "velocity": VELOCITY_RECIPES,
    "displacement": DISPLACEMENT_RECIPES,
    "g0": G0_RECIPES,
    "bottom": REGIMES,
    "top": REGIMES,
}


def _to_int(text):
    return int(text)


def _to_float(text):
    return float(text)


def _to_bool(text):
    lowered = text.lower()
    if lowered in ("true", "yes", "1"):
        return True
    if lowered in ("false", "no", "0"):
        return False
    raise ValueError("not a boolean: %r" % text)


def _to_kappa(text):
    return [float(item) for item in text.split(",")]


CONVERTERS = {
    "n1": _to_int,
    "n2": _to_int,
    "n3": _to_int,
    "kappa": _to_kappa,
    "T": _to_float,
    "dt": _to_float,
    "cfl": _to_float,
    "velocity": str,
    "velocity_amplitude": _to_float,
    "displacement": str,
    "displacement_amplitude": _to_float,
    "g0": str,
    "g0_amplitude": _to_float,
    "bottom": str,
    "top": str,
    "lambda": _to_float,
    "delta": _to_float,
    "snapshot_every": _to_int,
    "record_every": _to_int,
    "track_deformation": _to_bool,
    "output": str,
    "seed": _to_int,
    "quiet": _to_bool,
}


class RunConfig:
    """
    A validated run configuration; every key of DEFAULTS is an
    attribute (`lambda` is read as `lam`).
    """

    def __init__(self, **kwargs):
        values = dict(DEFAULTS)
        values["kappa"] = list(DEFAULTS["kappa"])
        unknown = [key for key in kwargs if key not in DEFAULTS and key != "lam"]
        if unknown:
            raise AttributeError("unknown arguments for RunConfig: %s" % unknown)
        if "lam" in kwargs:
            kwargs["lambda"] = kwargs.pop("lam")
        values.update(kwargs)
        if isinstance(values["kappa"], (int, float)):
            values["kappa"] = [values["kappa"]]
        self.filename = None
        self.values = values
        validate(values)

    def __getattr__(self, name):
        values = self.__dict__.get("values")
        if values is None:
            raise AttributeError(name)
        if name == "lam":
            return values["lambda"]
        if name in values:
            return values[name]
        raise AttributeError("RunConfig has no attribute %r" % (name,))

    def __repr__(self):
        return "<RunConfig %dx%dx%d kappa=%r T=%r>" % (self.n1, self.n2, self.n3, self.kappa, self.T)

    def __eq__(self, other):
        return isinstance(other, RunConfig) and self.values == other.values

    def partition(self):
        return BoundaryPartition(self.bottom, self.top, lam=self["lambda"], delta=self.delta)

    def __getitem__(self, key):
        return self.values[key]

    def replace(self, **kwargs):
        """
        A copy with some keys changed.
        """
        values = dict(self.values)
        values.update(kwargs)
        return RunConfig(**values)

    def to_json(self):
        values = dict(self.values)
        values["kappa"] = list(values["kappa"])
        return values


def validate(values):
    """
    Raise ValidationError naming the first field that is out of range.
    """
    for key in ("n1", "n2"):
        if not isinstance(values[key], int) or values[key] < 8 or not _is_power_of_two(values[key]):
            raise ValidationError("should be a power of two >= 8, got %r" % (values[key],), key)
    if not isinstance(values["n3"], int) or values["n3"] < 8:
        raise ValidationError("should be an integer >= 8, got %r" % (values["n3"],), "n3")
    kappa = values["kappa"]
    if len(kappa) == 0:
        raise ValidationError("needs at least one value", "kappa")
    for value in kappa:
        if not 0 < value < 0.25:
            raise ValidationError("values should lie in (0, 1/4), got %r" % (value,), "kappa")
    if any(later >= earlier for earlier, later in zip(kappa, kappa[1:])):
        raise ValidationError("should be strictly descending, got %r" % (kappa,), "kappa")
    for key in ("T", "cfl", "lambda", "delta"):
        if not values[key] > 0:
            raise ValidationError("should be positive, got %r" % (values[key],), key)
    for key in ("dt", "velocity_amplitude", "displacement_amplitude", "g0_amplitude"):
        if not values[key] >= 0:
            raise ValidationError("should be non-negative, got %r" % (values[key],), key)
    if not values["record_every"] >= 1:
        raise ValidationError("should be >= 1, got %r" % (values["record_every"],), "record_every")
    if not values["snapshot_every"] >= 0:
        raise ValidationError("should be >= 0, got %r" % (values["snapshot_every"],), "snapshot_every")
    if not values["seed"] >= 0:
        raise ValidationError("should be >= 0, got %r" % (values["seed"],), "seed")
    for key, choices in CHOICES.items():
        if values[key] not in choices:
            raise ValidationError("should be one of %r, got %r" % (choices, values[key]), key)


def parse_config(text):
    """
    Strict parse of a flat key-value configuration.

    Raises ParseError (with the line number) on malformed lines, unknown
    or repeated keys, and ValidationError (naming the field) on values
    that do not convert or are out of range.
    """
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError("expected 'key = value', got %r" % line, lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in DEFAULTS:
            raise ParseError("unknown key %r" % key, lineno)
        if key in values:
            raise ParseError("repeated key %r" % key, lineno)
        if not value:
            raise ParseError("missing value for %r" % key, lineno)
        try:
            values[key] = CONVERTERS[key](value)
        except ValueError:
            raise ValidationError("cannot read %r" % value, key) from None
    return RunConfig(**values)


def build_initial_data(config):
    """
    Build and validate the InitialData a configuration describes.
    """
    grid = Grid(config.n1, config.n2, config.n3)
    v_raw = make_velocity(grid, config.velocity, config.velocity_amplitude, config.seed)
    displacement = make_displacement(grid, config.displacement, config.displacement_amplitude)
    return assemble_initial_data(
        v_raw,
        recipe=config.g0,
        partition=config.partition(),
        displacement=displacement,
        project=config.velocity == "random",
        amplitude=config.g0_amplitude,
    )
