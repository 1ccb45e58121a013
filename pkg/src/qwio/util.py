"""Small numeric and filesystem helpers used by several modules."""

import os
from pathlib import Path

import numpy as np


def round_half_away(x):
    """Round to the nearest integer, ties away from zero.

    np.round rounds ties to even, which is the wrong convention for the
    quantizer, so this is spelled out. Works on scalars and arrays and
    returns floats with exactly integral values.
    """
    x = np.asarray(x, dtype=np.float64)
    return np.floor(np.abs(x) + 0.5) * np.sign(x)


def atomic_write_bytes(path, data: bytes) -> None:
    """Write a file via a temp sibling plus rename so readers never see
    a partial file and a failure leaves no output behind."""
    path = Path(path)
    tmp = path.with_name(path.name + f".tmp{os.getpid()}")
    try:
        tmp.write_bytes(data)
        os.replace(tmp, path)
    finally:
        if tmp.exists():
            tmp.unlink()


def atomic_write_text(path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))
