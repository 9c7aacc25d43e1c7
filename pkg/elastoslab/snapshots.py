# -*- coding: utf-8 -*-
# *************************************
# elastoslab: free-boundary elastodynamics laboratory
#
# Copyright (c) 2021 Calysto Developers
#
# *************************************

"""
Binary field dumps.

Layout (little-endian):

    b"ESLB", uint32 version, uint32 n1, uint32 n2, uint32 n3+1,
    float64 t, uint32 field count,
    per field: uint16 name length, UTF-8 name, uint32 components,
    then the row-major float64 payload of every field in table order.
"""

import os
import struct

import numpy as np

MAGIC = b"ESLB"
VERSION = 1
SNAPSHOT_FIELDS = ("eta_displacement", "v", "q", "psi")


def snapshot_name(step):
    return "step_%06d.esl" % step


def state_fields(state):
    """
    The dumped fields of a state, in table order; q and psi are taken
    from the cache and are zero when they were never computed.
    """
    grid = state.grid
    q = state.cache.get("q")
    psi = state.cache.get("psi")
    return [
        ("eta_displacement", state.eta.displacement.values),
        ("v", state.v.values),
        ("q", q.values if q is not None else np.zeros(grid.shape)),
        ("psi", psi.values if psi is not None else np.zeros((3,) + grid.shape)),
    ]


def write_snapshot(path, t, fields):
    """
    Args:
        * path: (str) file to write
        * t: (float) time of the state
        * fields: (list of (name, array)) arrays share their last three
          dimensions; leading dimensions are flattened into components
    """
    if not fields:
        raise ValueError("Invalid fields: %r; should name at least one array" % (fields,))
    dims = np.shape(fields[0][1])[-3:]
    if len(dims) != 3:
        raise ValueError("Invalid field %r: should have three grid dimensions" % (fields[0][0],))
    header = [MAGIC, struct.pack("<4I", VERSION, dims[0], dims[1], dims[2])]
    header.append(struct.pack("<dI", float(t), len(fields)))
    payload = []
    for name, values in fields:
        values = np.asarray(values, dtype="<f8")
        if values.shape[-3:] != dims:
            raise ValueError("Invalid field %r: shape %r does not match %r" % (name, values.shape, dims))
        encoded = name.encode("utf-8")
        components = int(np.prod(values.shape[:-3], dtype=int))
        header.append(struct.pack("<H", len(encoded)) + encoded + struct.pack("<I", components))
        payload.append(np.ascontiguousarray(values).tobytes())
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "wb") as fp:
        fp.write(b"".join(header))
        fp.write(b"".join(payload))
    return path


def read_snapshot(path):
    """
    Returns (t, {name: array}); arrays with one component come back
    with the grid shape, the others with a leading component axis.
    """
    with open(path, "rb") as fp:
        data = fp.read()
    if data[:4] != MAGIC:
        raise ValueError("Invalid snapshot %r: bad magic %r" % (path, data[:4]))
    version, n1, n2, n3 = struct.unpack_from("<4I", data, 4)
    if version != VERSION:
        raise ValueError("Invalid snapshot %r: unsupported version %d" % (path, version))
    t, count = struct.unpack_from("<dI", data, 20)
    offset = 32
    table = []
    for _ in range(count):
        (length,) = struct.unpack_from("<H", data, offset)
        offset += 2
        name = data[offset : offset + length].decode("utf-8")
        offset += length
        (components,) = struct.unpack_from("<I", data, offset)
        offset += 4
        table.append((name, components))
    fields = {}
    size = n1 * n2 * n3
    for name, components in table:
        values = np.frombuffer(data, dtype="<f8", count=components * size, offset=offset)
        offset += components * size * 8
        shape = (n1, n2, n3) if components == 1 else (components, n1, n2, n3)
        fields[name] = values.reshape(shape).astype(float)
    return t, fields
