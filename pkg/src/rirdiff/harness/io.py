"""File formats: RIRB matrices, 16-bit PGM images and their JSON sidecars.

RIRB layout (little-endian)::

    b"RIRB" | u32 version=1 | u32 N | u32 K | u32 Fs | N*K float32, time-major
    (row k = time sample, column i = microphone; value (k, i) at index k*N + i)
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from ..imaging import Mask
from ..room_sim import ArrayGeometry, RirMatrix, RoomSpec, SourceSpec

RIRB_MAGIC = b"RIRB"
RIRB_VERSION = 1
PGM_MAXVAL = 65535


def sidecar_path(path) -> Path:
    return Path(path).with_suffix(".json")


def write_rirb(path, matrix: RirMatrix, **extra) -> Path:
    path = Path(path)
    data = np.asarray(matrix.data, dtype="<f4")
    K, N = data.shape
    fs = int(round(matrix.sample_rate))
    with open(path, "wb") as fh:
        fh.write(RIRB_MAGIC)
        fh.write(struct.pack("<4I", RIRB_VERSION, N, K, fs))
        fh.write(np.ascontiguousarray(data).tobytes())
    meta = dict(matrix.meta)
    if matrix.geometry is not None:
        meta["geometry"] = matrix.geometry.to_dict()
    if matrix.source is not None:
        meta["source"] = matrix.source.to_dict()
    meta.update(extra)
    sidecar_path(path).write_text(json.dumps(_jsonable(meta), indent=2, sort_keys=True) + "\n")
    return path


def read_rirb(path) -> RirMatrix:
    path = Path(path)
    buf = path.read_bytes()
    if buf[:4] != RIRB_MAGIC:
        raise ValueError(f"{path} is not an RIRB file")
    version, N, K, fs = struct.unpack_from("<4I", buf, 4)
    if version != RIRB_VERSION:
        raise ValueError(f"unsupported RIRB version {version}")
    expected = 20 + 4 * N * K
    if len(buf) != expected:
        raise ValueError(f"{path}: expected {expected} bytes, found {len(buf)}")
    data = np.frombuffer(buf, dtype="<f4", offset=20).reshape(K, N).astype(np.float64)
    meta = {}
    side = sidecar_path(path)
    if side.exists():
        meta = json.loads(side.read_text())
    geometry = ArrayGeometry.from_dict(meta.pop("geometry")) if "geometry" in meta else None
    source = SourceSpec.from_dict(meta.pop("source")) if "source" in meta else None
    return RirMatrix(data, float(fs), geometry, source, meta)


def read_mask(path) -> Mask:
    meta = json.loads(Path(path).read_text())
    return Mask.from_dict(meta.get("mask", meta))


def room_from_meta(meta: dict) -> RoomSpec | None:
    return RoomSpec.from_dict(meta["room"]) if "room" in meta else None


def export_rir_image(matrix, path) -> Path:
    """Write the RIR image as a binary 16-bit PGM (rows = time, columns = microphones).

    Amplitudes map linearly from [-peak, +peak] to [0, 65535]; the mapping is
    stored in a JSON sidecar so :func:`read_rir_image` can invert it.
    """
    path = Path(path)
    data = np.asarray(getattr(matrix, "data", matrix), dtype=float)
    K, N = data.shape
    peak = float(np.max(np.abs(data))) if data.size else 0.0
    if peak > 0:
        pix = np.floor((data + peak) / (2 * peak) * PGM_MAXVAL + 0.5)
    else:
        pix = np.full(data.shape, 32768.0)
    pix = np.clip(pix, 0, PGM_MAXVAL).astype(">u2")
    with open(path, "wb") as fh:
        fh.write(f"P5\n{N} {K}\n{PGM_MAXVAL}\n".encode("ascii"))
        fh.write(pix.tobytes())
    sidecar_path(path).write_text(json.dumps(
        {"min": -peak, "max": peak, "maxval": PGM_MAXVAL, "width": N, "height": K,
         "layout": "row=time sample, column=microphone"}, indent=2) + "\n")
    return path


def read_pgm(path) -> np.ndarray:
    buf = Path(path).read_bytes()
    tokens, pos = [], 0
    while len(tokens) < 4:
        while buf[pos:pos + 1].isspace():
            pos += 1
        if buf[pos:pos + 1] == b"#":
            pos = buf.index(b"\n", pos) + 1
            continue
        end = pos
        while not buf[end:end + 1].isspace():
            end += 1
        tokens.append(buf[pos:end].decode("ascii"))
        pos = end
    pos += 1
    if tokens[0] != "P5":
        raise ValueError(f"{path} is not a binary PGM")
    w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    dtype = ">u2" if maxval > 255 else "u1"
    return np.frombuffer(buf, dtype=dtype, count=w * h, offset=pos).reshape(h, w)


def read_rir_image(path) -> np.ndarray:
    pix = read_pgm(path).astype(float)
    meta = json.loads(sidecar_path(path).read_text())
    lo, hi = meta["min"], meta["max"]
    if hi == lo:
        return np.zeros_like(pix)
    return lo + pix / meta["maxval"] * (hi - lo)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    return obj
