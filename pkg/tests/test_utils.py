# -*- coding: utf-8 -*-
# *************************************
# elastoslab: free-boundary elastodynamics laboratory
#
# Copyright (c) 2021 Calysto Developers
#
# *************************************

import io
import json
import math

import numpy as np

from elastoslab.utils import dumps, format_float, format_time, json_dump, progress_bar, quote, versions


def test_format_float():
    assert format_float(3) == "3"
    assert format_float(True) == "1"
    assert format_float(np.int64(7)) == "7"
    assert float(format_float(0.1)) == 0.1
    assert float(format_float(math.pi / 3)) == math.pi / 3
    assert format_float(float("nan")) == "nan"


def test_format_time():
    assert format_time(3725.5) == "01:02:05.5"


def test_json_dump():
    fp = io.StringIO()
    json_dump({"b": [1, 2.5, None], "a": {"x": float("inf"), "y": True}, "c": 'say "hi"'}, fp)
    data = json.loads(fp.getvalue())

    assert data == {"a": {"x": None, "y": True}, "b": [1, 2.5, None], "c": 'say "hi"'}
    assert fp.getvalue().index('"a"') < fp.getvalue().index('"b"')


def test_json_dump_control_characters():
    fp = io.StringIO()
    text = "runs\new\tdir\x01\\end"
    json_dump({"path": text, "key\nline": 1}, fp)
    data = json.loads(fp.getvalue())

    assert data == {"path": text, "key\nline": 1}
    assert quote("\x1f") == '"\\u001f"'
    assert quote("a\rb") == '"a\\rb"'


def test_dumps_keeps_precision():
    fp = io.StringIO()
    dumps(fp, [0.1 + 0.2, np.float64(1.0) / 3])

    assert json.loads(fp.getvalue()) == [0.1 + 0.2, 1.0 / 3]


def test_progress_bar_off():
    items = range(3)

    assert progress_bar(items, show_progress=False) is items
    assert progress_bar(items, progress_type=None) is items


def test_versions():
    info = versions()

    assert set(info) == {"elastoslab", "numpy", "scipy", "python"}
    assert info["numpy"] == np.__version__
