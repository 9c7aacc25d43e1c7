# -*- coding: utf-8 -*-
# *************************************
# elastoslab: free-boundary elastodynamics laboratory
#
# Copyright (c) 2021 Calysto Developers
#
# *************************************

import glob
import math
import os
import platform
from collections import OrderedDict

import numpy as np

from .config import get_search_paths


def progress_bar(range, show_progress=True, progress_type="tqdm"):
    """
    Wrap a range/iter in a progress bar (or not).
    """
    try:
        import tqdm
    except ImportError:
        tqdm = None

    if progress_type is None or tqdm is None or show_progress is False:
        return range
    elif progress_type == "tqdm":
        return tqdm.tqdm(range)
    else:
        return range


def format_time(time):
    hours = time // 3600
    minutes = (time % 3600) // 60
    seconds = (time % 3600) % 60
    return "%02d:%02d:%04.1f" % (hours, minutes, seconds)


def format_float(value):
    """
    CSV text of one value: integers as they are, floats with 17
    significant digits.
    """
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return "%.17g" % float(value)


def versions():
    """
    Versions of the numerical stack, recorded in every run manifest.
    """
    import scipy

    from ._version import __version__

    return {
        "elastoslab": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": platform.python_version(),
    }


def load_config(filename=None):
    """
    configs/
        equilibrium.cfg
        mixed.cfg
        standard.cfg
        sweep.cfg

    Without a filename, list the available run configurations.
    """
    from .runconfig import parse_config

    if filename is None:
        print("Searching for elastoslab config files...")
        for path in get_search_paths():
            print("Directory:", path)
            files = sorted(
                glob.glob(os.path.join(path, "**", "*.cfg"), recursive=True),
                key=lambda filename: (filename.count("/"), filename),
            )
            if len(files) > 0:
                for fname in files:
                    basename = os.path.splitext(fname)[0]
                    print("    %r" % basename[len(path) :])
            else:
                print("    no files found")
    else:
        if os.path.exists(filename):
            candidates = [filename]
        else:
            if not filename.endswith(".cfg"):
                filename += ".cfg"
            candidates = [os.path.join(path, filename) for path in get_search_paths()]
        for path_filename in candidates:
            if os.path.exists(path_filename):
                print("Loading %s..." % path_filename)
                with open(path_filename) as fp:
                    config = parse_config(fp.read())
                config.filename = path_filename
                return config
        print("No such config found: %r" % filename)
    return None


def json_dump(config, fp, sort_keys=True, indent=4):
    dumps(fp, config, sort_keys=sort_keys, indent=indent)
    fp.write("\n")


ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}


def quote(text):
    """
    A JSON string literal; other control characters become \\u escapes.
    """
    out = []
    for char in text:
        if char in ESCAPES:
            out.append(ESCAPES[char])
        elif ord(char) < 0x20:
            out.append("\\u%04x" % ord(char))
        else:
            out.append(char)
    return '"' + "".join(out) + '"'


def dumps(fp, obj, level=0, sort_keys=True, indent=4, newline="\n", space=" "):
    if isinstance(obj, dict):
        if sort_keys:
            obj = OrderedDict({key: obj[key] for key in sorted(obj.keys())})
        fp.write(newline + (space * indent * level) + "{" + newline)
        comma = ""
        for key, value in obj.items():
            fp.write(comma)
            comma = "," + newline
            fp.write(space * indent * (level + 1))
            fp.write("%s:%s" % (quote(str(key)), space))
            dumps(fp, value, level + 1, sort_keys, indent, newline, space)
        fp.write(newline + (space * indent * level) + "}")
    elif isinstance(obj, str):
        fp.write(quote(obj))
    elif isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            fp.write("[]")
        else:
            fp.write(newline + (space * indent * level) + "[")
            comma = ""
            for item in obj:
                fp.write(comma)
                comma = ", "
                dumps(fp, item, level + 1, sort_keys, indent, newline, space)
            # each on their own line
            if len(obj) > 2:
                fp.write(newline + (space * indent * level))
            fp.write("]")
    elif isinstance(obj, (bool, np.bool_)):
        fp.write("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        fp.write(str(int(obj)))
    elif obj is None:
        fp.write("null")
    elif isinstance(obj, (float, np.floating)):
        if math.isfinite(obj):
            fp.write("%.17g" % obj)
        else:
            # JSON has no infinities; readers get null
            fp.write("null")
    else:
        raise TypeError("Unknown object %r for json serialization" % obj)
