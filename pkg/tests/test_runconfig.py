# -*- coding: utf-8 -*-
# *************************************
# elastoslab: free-boundary elastodynamics laboratory
#
# Copyright (c) 2021 Calysto Developers
#
# *************************************

import pytest

from elastoslab import load_config
from elastoslab.errors import ParseError, ValidationError
from elastoslab.runconfig import DEFAULTS, RunConfig, build_initial_data, parse_config


def test_defaults():
    config = RunConfig()

    assert config.n1 == 32
    assert config.kappa == [0.1]
    assert config.lam == 0.1
    assert config["lambda"] == 0.1
    assert config.partition().to_json() == {"bottom": "NC", "top": "NC", "lambda": 0.1, "delta": 0.1}
    assert sorted(config.to_json()) == sorted(DEFAULTS)


def test_parse_config():
    text = """
    # a sweep
    n1 = 64
    n2 = 64   # trailing comment
    kappa = 0.2, 0.1, 0.05
    velocity = standard
    track_deformation = no
    """
    config = parse_config(text)

    assert config.n1 == 64
    assert config.kappa == [0.2, 0.1, 0.05]
    assert config.velocity == "standard"
    assert config.track_deformation is False
    assert config.n3 == 32


def test_parse_errors():
    with pytest.raises(ParseError) as info:
        parse_config("n1 = 16\nn2 16\n")
    assert info.value.lineno == 2
    with pytest.raises(ParseError) as info:
        parse_config("n1 = 16\nwidth = 3\n")
    assert info.value.lineno == 2
    with pytest.raises(ParseError):
        parse_config("n1 = 16\nn1 = 32\n")
    with pytest.raises(ParseError):
        parse_config("n1 =\n")


def test_validation_errors():
    with pytest.raises(ValidationError) as info:
        parse_config("n1 = -4\n")
    assert info.value.field == "n1"
    with pytest.raises(ValidationError) as info:
        parse_config("T = soon\n")
    assert info.value.field == "T"
    with pytest.raises(ValidationError) as info:
        parse_config("kappa = 0.05, 0.1\n")
    assert info.value.field == "kappa"
    with pytest.raises(ValidationError) as info:
        parse_config("kappa = 0.3\n")
    assert info.value.field == "kappa"
    with pytest.raises(ValidationError) as info:
        parse_config("bottom = XX\n")
    assert info.value.field == "bottom"
    with pytest.raises(ValidationError) as info:
        parse_config("quiet = maybe\n")
    assert info.value.field == "quiet"


def test_run_config():
    config = RunConfig(kappa=0.05, lam=0.2)

    assert config.kappa == [0.05]
    assert config.lam == 0.2
    assert config.replace(seed=7).seed == 7
    assert config.replace(seed=7) != config
    assert config == RunConfig(kappa=[0.05], lam=0.2)
    with pytest.raises(AttributeError):
        RunConfig(width=3)
    with pytest.raises(AttributeError):
        config.width


def test_shipped_configs():
    for name in ("equilibrium", "standard", "sweep", "mixed"):
        config = load_config(name)
        assert config is not None, name
        assert config.filename.endswith(name + ".cfg")

    sweep = load_config("sweep")
    assert sweep.kappa == [0.2, 0.1, 0.05, 0.025]
    # the smallest kappa needs 2 h <= kappa
    assert 2.0 / sweep.n1 <= min(sweep.kappa)
    assert load_config("no-such-config") is None


def test_build_initial_data():
    config = load_config("mixed").replace(n1=16, n2=16, n3=16)
    initial = build_initial_data(config)

    assert initial.partition.regime("bottom") == "RT"
    assert initial.margins["bottom"]["rt"] >= config.lam
    assert initial.margins["top"]["nc"] >= config.delta

    config = load_config("standard").replace(n1=16, n2=16, n3=16)
    initial = build_initial_data(config)
    assert initial.eta0.displacement.max_abs() > 0.0
