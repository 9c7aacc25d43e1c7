# -*- coding: utf-8 -*-
# *************************************
# elastoslab: free-boundary elastodynamics laboratory
#
# Copyright (c) 2021 Calysto Developers
#
# *************************************

"""
Static pictures of snapshots and energy curves (Pillow).
"""

import math

import numpy as np
from PIL import Image, ImageDraw

BACKGROUND = (255, 255, 255)
FOREGROUND = (0, 0, 0)
CURVE = (31, 119, 180)


def _diverging(values):
    """
    Blue (negative) to white (zero) to red (positive), symmetric about 0.
    """
    scale = float(np.max(np.abs(values)))
    t = values / scale if scale > 0 else np.zeros_like(values)
    rgb = np.empty(values.shape + (3,))
    rgb[..., 0] = np.where(t > 0, 1.0, 1.0 + t)
    rgb[..., 1] = 1.0 - np.abs(t)
    rgb[..., 2] = np.where(t < 0, 1.0, 1.0 - t)
    return (255 * rgb).round().astype(np.uint8)


def field_to_image(values, size=256):
    """
    Render a 2D array (first axis across, second axis up) as a square
    picture with a diverging colour map.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 2:
        raise ValueError("Invalid values: shape %r; should be a 2D slice" % (values.shape,))
    rgb = _diverging(values.T[::-1])
    image = Image.fromarray(np.ascontiguousarray(rgb))
    return image.resize((size, size), Image.NEAREST)


def energy_to_image(times, energies, width=400, height=200, margin=20):
    """
    The curve E(t) with its range printed in the corner.
    """
    image = Image.new("RGB", (width, height), BACKGROUND)
    draw = ImageDraw.Draw(image)
    draw.rectangle((margin, margin, width - margin, height - margin), outline=FOREGROUND)
    times = np.asarray(times, dtype=float)
    energies = np.asarray(energies, dtype=float)
    finite = np.isfinite(energies)
    if np.count_nonzero(finite) < 2:
        return image
    times, energies = times[finite], energies[finite]
    low, high = float(energies.min()), float(energies.max())
    if high - low <= 1e-14 * max(abs(high), 1.0):
        low, high = low - 0.5, high + 0.5
    t0, t1 = float(times.min()), float(times.max())
    span = t1 - t0 if t1 > t0 else 1.0
    points = [
        (
            margin + (t - t0) / span * (width - 2 * margin),
            height - margin - (e - low) / (high - low) * (height - 2 * margin),
        )
        for t, e in zip(times, energies)
    ]
    draw.line(points, fill=CURVE, width=2)
    draw.text((margin + 4, margin + 2), "E: %.6g .. %.6g" % (low, high), fill=FOREGROUND)
    return image


def gallery(*images, border_width=1, background_color=BACKGROUND):
    """
    Construct a gallery of images
    """
    gallery_cols = math.ceil(math.sqrt(len(images)))
    gallery_rows = math.ceil(len(images) / gallery_cols)

    size = max(image.size[0] for image in images), max(image.size[1] for image in images)
    size = size[0] + (border_width * 2), size[1] + (border_width * 2)

    gallery_image = Image.new(
        mode="RGB",
        size=(int(gallery_cols * size[0]), int(gallery_rows * size[1])),
        color=background_color,
    )

    for i, image in enumerate(images):
        if image.mode != "RGB":
            image = image.convert("RGB")
        location = (
            int((i % gallery_cols) * size[0]) + border_width,
            int((i // gallery_cols) * size[1]) + border_width,
        )
        gallery_image.paste(image, location)
    return gallery_image


def snapshot_pictures(fields, size=256):
    """
    Horizontal slices at mid-depth and at the top face of the
    displacement and velocity components of one snapshot.
    """
    images = []
    for name in ("eta_displacement", "v"):
        values = fields[name]
        middle = values.shape[-1] // 2
        for component in range(values.shape[0]):
            images.append(field_to_image(values[component, :, :, middle], size))
            images.append(field_to_image(values[component, :, :, -1], size))
    return images
