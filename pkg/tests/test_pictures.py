# -*- coding: utf-8 -*-
# *************************************
# elastoslab: free-boundary elastodynamics laboratory
#
# Copyright (c) 2021 Calysto Developers
#
# *************************************

import numpy as np
import pytest

from elastoslab.pictures import energy_to_image, field_to_image, gallery, snapshot_pictures


def test_field_to_image():
    values = np.outer(np.linspace(-1, 1, 8), np.ones(4))
    image = field_to_image(values, size=32)

    assert image.size == (32, 32)
    assert image.mode == "RGB"
    with pytest.raises(ValueError):
        field_to_image(np.zeros((2, 2, 2)))


def test_zero_field_is_white():
    image = field_to_image(np.zeros((4, 4)), size=4)

    assert image.getpixel((0, 0)) == (255, 255, 255)


def test_energy_to_image():
    times = np.linspace(0, 1, 11)
    image = energy_to_image(times, 1 + times ** 2, width=100, height=50)

    assert image.size == (100, 50)
    flat = energy_to_image(times, np.ones(11), width=100, height=50)
    assert flat.size == (100, 50)


def test_gallery():
    images = [field_to_image(np.eye(3), size=10) for _ in range(4)]

    assert gallery(*images).size == (24, 24)


def test_snapshot_pictures():
    fields = {"eta_displacement": np.zeros((3, 8, 8, 9)), "v": np.ones((3, 8, 8, 9))}

    assert len(snapshot_pictures(fields, size=16)) == 12
