"""Frame directory interchange format.

A frame directory holds exactly four files:

    rgb.ppm     binary PPM (P6), 8-bit
    depth.pfm   single-channel PFM, little-endian, bottom-up scanlines
    seg.pgm     binary PGM (P5), label ids
    labels.tsv  one "id<TAB>name" line per label

Readers are strict and reject malformed headers; writers always produce the
exact byte layout read back by the readers.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .core import Frame

RGB_NAME = "rgb.ppm"
DEPTH_NAME = "depth.pfm"
SEG_NAME = "seg.pgm"
LABELS_NAME = "labels.tsv"


def _read_pnm_header(data: bytes, magic: bytes, count: int) -> tuple[list[int], int]:
    """Parse a PNM header: magic then `count` ASCII integers.

    Comments (# to end of line) are allowed between tokens. Returns the
    integers and the offset of the first raster byte.
    """
    if not data.startswith(magic):
        raise ValueError(f"expected {magic.decode()} header, got {data[:2]!r}")
    pos = len(magic)
    values: list[int] = []
    while len(values) < count:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        token = data[start:pos]
        if not token.isdigit():
            raise ValueError(f"malformed header token {token!r}")
        values.append(int(token))
    return values, pos + 1  # single whitespace byte separates header and raster


def write_ppm(path, rgb: np.ndarray) -> None:
    if rgb.ndim != 3 or rgb.shape[2] != 3 or rgb.dtype != np.uint8:
        raise ValueError("rgb must be (H, W, 3) uint8")
    h, w = rgb.shape[:2]
    header = f"P6\n{w} {h}\n255\n".encode("ascii")
    Path(path).write_bytes(header + rgb.tobytes())


def read_ppm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    (w, h, maxval), offset = _read_pnm_header(data, b"P6", 3)
    if maxval != 255:
        raise ValueError(f"only 8-bit PPM supported, maxval={maxval}")
    raster = data[offset : offset + w * h * 3]
    if len(raster) != w * h * 3:
        raise ValueError("truncated PPM raster")
    return np.frombuffer(raster, dtype=np.uint8).reshape(h, w, 3).copy()


def write_pgm(path, seg: np.ndarray) -> None:
    if seg.ndim != 2 or not np.issubdtype(seg.dtype, np.integer):
        raise ValueError("seg must be a 2-d integer array")
    if seg.min() < 0 or seg.max() > 65535:
        raise ValueError("label ids must fit in 16 bits")
    h, w = seg.shape
    if seg.max() <= 255:
        maxval, raster = 255, seg.astype(">u1").tobytes()
    else:
        maxval, raster = 65535, seg.astype(">u2").tobytes()
    header = f"P5\n{w} {h}\n{maxval}\n".encode("ascii")
    Path(path).write_bytes(header + raster)


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    (w, h, maxval), offset = _read_pnm_header(data, b"P5", 3)
    dtype = ">u1" if maxval <= 255 else ">u2"
    expected = w * h * (1 if maxval <= 255 else 2)
    raster = data[offset : offset + expected]
    if len(raster) != expected:
        raise ValueError("truncated PGM raster")
    return np.frombuffer(raster, dtype=dtype).reshape(h, w).astype(np.int32)


def write_pfm(path, depth: np.ndarray) -> None:
    """Write single-channel PFM, little-endian, bottom-up scanlines."""
    if depth.ndim != 2 or not np.issubdtype(depth.dtype, np.floating):
        raise ValueError("depth must be a 2-d float array")
    h, w = depth.shape
    header = f"Pf\n{w} {h}\n-1.0\n".encode("ascii")
    raster = depth[::-1].astype("<f4").tobytes()
    Path(path).write_bytes(header + raster)


def read_pfm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    lines_end = 0
    fields = []
    for _ in range(3):
        nl = data.index(b"\n", lines_end)
        fields.append(data[lines_end:nl])
        lines_end = nl + 1
    if fields[0] != b"Pf":
        raise ValueError(f"expected single-channel PFM (Pf), got {fields[0]!r}")
    w, h = (int(t) for t in fields[1].split())
    scale = float(fields[2])
    endian = "<f4" if scale < 0 else ">f4"
    raster = data[lines_end : lines_end + w * h * 4]
    if len(raster) != w * h * 4:
        raise ValueError("truncated PFM raster")
    img = np.frombuffer(raster, dtype=endian).reshape(h, w)
    return img[::-1].astype(np.float32)


def write_labels(path, label_table: dict[int, str]) -> None:
    lines = [f"{i}\t{label_table[i]}" for i in sorted(label_table)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_labels(path) -> dict[int, str]:
    table: dict[int, str] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0].isdigit() or not parts[1]:
            raise ValueError(f"{path}: line {lineno}: expected 'id<TAB>name', got {line!r}")
        key = int(parts[0])
        if key in table:
            raise ValueError(f"{path}: line {lineno}: duplicate label id {key}")
        table[key] = parts[1]
    return table


def write_frame_dir(frame: Frame, directory) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    write_ppm(directory / RGB_NAME, frame.rgb)
    write_pfm(directory / DEPTH_NAME, frame.depth)
    write_pgm(directory / SEG_NAME, frame.segmentation)
    write_labels(directory / LABELS_NAME, frame.label_table)


def read_frame_dir(directory) -> Frame:
    directory = Path(directory)
    labels_path = directory / LABELS_NAME
    if not labels_path.exists():
        raise FileNotFoundError(f"labels.tsv not found in {directory}")
    for name in (RGB_NAME, DEPTH_NAME, SEG_NAME):
        if not (directory / name).exists():
            raise FileNotFoundError(f"{name} not found in {directory}")
    return Frame(
        rgb=read_ppm(directory / RGB_NAME),
        depth=read_pfm(directory / DEPTH_NAME),
        segmentation=read_pgm(directory / SEG_NAME),
        label_table=read_labels(labels_path),
    )
