"""Complex-number helpers for the JSON file formats.

Complex values are always written as two-element ``[re, im]`` lists.  Floats
go through ``repr`` (shortest round-trip form), so save/load is bit-exact.
"""

import json

import numpy as np


def cpair(z):
    z = complex(z)
    return [float(z.real), float(z.imag)]


def parse_complex(obj):
    if isinstance(obj, (list, tuple)) and len(obj) == 2:
        return complex(float(obj[0]), float(obj[1]))
    if isinstance(obj, (int, float)) and not isinstance(obj, bool):
        return complex(obj)
    raise ValueError(f"expected [re, im], got {obj!r}")


def complex_list(values):
    return [cpair(z) for z in np.asarray(values, dtype=complex).ravel()]


def parse_complex_list(obj):
    if not isinstance(obj, (list, tuple)):
        raise ValueError(f"expected a list of [re, im] pairs, got {obj!r}")
    return np.array([parse_complex(z) for z in obj], dtype=complex)


def dumps(obj):
    return json.dumps(obj, indent=1, allow_nan=False) + "\n"


def write_json(path, obj):
    with open(path, "w") as fh:
        fh.write(dumps(obj))
