"""Plain-text array files: one ``name dim...`` header per array, then row-major values."""
from __future__ import annotations

import numpy as np


def _fmt(values):
    return " ".join(format(float(v), ".9g") for v in values)


def dump_arrays(arrays: dict) -> str:
    out = []
    for name, arr in arrays.items():
        arr = np.asarray(arr, dtype=float)
        if " " in name or not name:
            raise ValueError(f"bad array name {name!r}")
        out.append(" ".join([name, *map(str, arr.shape)]) if arr.ndim else name)
        if arr.ndim <= 1:
            out.append(_fmt(arr.reshape(-1)))
        else:
            for row in arr.reshape(arr.shape[0], -1):
                out.append(_fmt(row))
    return "\n".join(out) + "\n"


def parse_arrays(text: str) -> dict:
    lines = text.split("\n")
    out = {}
    i = 0
    while i < len(lines):
        if not lines[i].strip():
            i += 1
            continue
        head = lines[i].split()
        name, shape = head[0], tuple(int(s) for s in head[1:])
        i += 1
        n_rows = 1 if len(shape) <= 1 else shape[0]
        vals = []
        for _ in range(n_rows):
            vals.extend(float(v) for v in lines[i].split())
            i += 1
        out[name] = np.array(vals, dtype=float).reshape(shape)
    return out


def save_arrays(path, arrays: dict):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_arrays(arrays))


def load_arrays(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return parse_arrays(fh.read())
