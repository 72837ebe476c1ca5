"""Delimited and image artifacts: CSV (17 significant digits), PGM heatmaps, run manifests."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .reachability import GRAY_LEVELS, ReachabilityGrid


def fmt(x) -> str:
    return format(float(x), ".17g")


def write_csv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def read_csv(path):
    text = Path(path).read_text().splitlines()
    header = text[0].split(",")
    data = np.array([[float(v) for v in line.split(",")] for line in text[1:]])
    return header, data


def write_map_csv(path, grid: ReachabilityGrid):
    rows = ((pi, pf, int(grid.cells[i, j]))
            for i, pi in enumerate(grid.Pi_axis) for j, pf in enumerate(grid.Pf_axis))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["Pi,Pf,class"] + [f"{fmt(a)},{fmt(b)},{c}" for a, b, c in rows]
    path.write_text("\n".join(lines) + "\n")
    return path


def map_image(grid: ReachabilityGrid) -> np.ndarray:
    """8-bit gray image: columns follow Pi upwards, row 0 is the largest Pf."""
    lut = np.zeros(4, dtype=np.uint8)
    for cls, level in GRAY_LEVELS.items():
        lut[int(cls)] = level
    return lut[grid.cells.T[::-1, :]]


def write_pgm(path, grid: ReachabilityGrid):
    img = map_image(grid)
    h, w = img.shape
    header = (
        "P5\n"
        "# columns: Pi ascending left->right; rows: Pf descending top->bottom; "
        "255 unitary-inaccessible, 170 unitary-only, 85 noise-accessible, 0 invalid\n"
        f"{w} {h}\n255\n"
    ).encode("ascii")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(header + img.tobytes())
    return path


def read_pgm(path):
    """Parse a binary PGM written by :func:`write_pgm`."""
    data = Path(path).read_bytes()
    fields = []
    pos = 0
    while len(fields) < 4:
        while data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            pos = data.index(b"\n", pos) + 1
            continue
        end = pos
        while not data[end:end + 1].isspace():
            end += 1
        fields.append(data[pos:end].decode("ascii"))
        pos = end
    pos += 1
    magic, w, h, maxval = fields[0], int(fields[1]), int(fields[2]), int(fields[3])
    if magic != "P5" or maxval != 255:
        raise ValueError("not an 8-bit P5 image")
    return np.frombuffer(data[pos:pos + w * h], dtype=np.uint8).reshape(h, w)


def write_manifest(path, payload: dict):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n")
    return path
