"""16-bit binary PGM image I/O and CSV helpers for the demo's artifacts.

Pixel values are stored as round(clamp(x, 0, 1) * 65535) big-endian (P5,
maxval 65535).  Boolean masks map False/True to 0/65535 and read back by
thresholding at half scale.
"""

from __future__ import annotations

import numpy as np

__all__ = ["write_pgm", "read_pgm", "write_mask", "read_mask", "write_csv", "read_csv"]

_MAXVAL = 65535


def write_pgm(path, image, square=False):
    """Write a real image; values clamp to [0, 1] (optionally squared first)."""
    arr = np.asarray(image, dtype=np.float64)
    if square:
        arr = arr * arr
    data = np.round(np.clip(arr, 0.0, 1.0) * _MAXVAL).astype(">u2")
    with open(path, "wb") as f:
        f.write(f"P5\n{arr.shape[1]} {arr.shape[0]}\n{_MAXVAL}\n".encode("ascii"))
        f.write(data.tobytes())


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as f:
        blob = f.read()
    fields = []
    pos = 0
    while len(fields) < 4:
        while pos < len(blob) and blob[pos:pos + 1].isspace():
            pos += 1
        if blob[pos:pos + 1] == b"#":
            while pos < len(blob) and blob[pos:pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(blob) and not blob[pos:pos + 1].isspace():
            pos += 1
        fields.append(blob[start:pos])
    if fields[0] != b"P5":
        raise ValueError(f"not a binary PGM file: {path}")
    width, height, maxval = int(fields[1]), int(fields[2]), int(fields[3])
    pos += 1  # single whitespace byte after maxval
    dtype = ">u2" if maxval > 255 else np.uint8
    data = np.frombuffer(blob, dtype=dtype, count=width * height, offset=pos)
    return data.reshape(height, width).astype(np.float64) / maxval


def write_mask(path, mask):
    write_pgm(path, np.asarray(mask, dtype=np.float64))


def read_mask(path) -> np.ndarray:
    return read_pgm(path) > 0.5


def write_csv(path, matrix):
    np.savetxt(path, np.asarray(matrix), delimiter=",", fmt="%.17g")


def read_csv(path) -> np.ndarray:
    return np.atleast_2d(np.loadtxt(path, delimiter=","))
