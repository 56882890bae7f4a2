"""Checkpoint files.

Layout (all integers little-endian)::

    8 bytes   magic b"RIRDCKPT"
    u32       header length in bytes
    header    UTF-8 JSON: format_version, config, schedule, metadata,
              tensors = [{"name", "shape"}, ...]
    blob      float32 little-endian values of each tensor, concatenated in
              the order of ``tensors``, each in C order
"""

from __future__ import annotations

import json
import struct
from collections import OrderedDict
from pathlib import Path

import numpy as np
import torch

from .model import DenoiserConfig
from .schedule import NoiseSchedule
from .training import DenoiserParams

MAGIC = b"RIRDCKPT"
FORMAT_VERSION = 1


def save_checkpoint(path, params: DenoiserParams, schedule: NoiseSchedule) -> Path:
    path = Path(path)
    tensors = []
    chunks = []
    for name, value in params.state.items():
        arr = value.detach().cpu().numpy().astype("<f4", copy=False)
        tensors.append({"name": name, "shape": list(arr.shape)})
        chunks.append(np.ascontiguousarray(arr).tobytes())
    header = {
        "format_version": FORMAT_VERSION,
        "config": params.config.to_dict(),
        "schedule": schedule.to_dict(),
        "metadata": params.metadata,
        "tensors": tensors,
    }
    raw = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(raw)))
        fh.write(raw)
        for chunk in chunks:
            fh.write(chunk)
    return path


def load_checkpoint(path) -> tuple[DenoiserParams, NoiseSchedule]:
    buf = Path(path).read_bytes()
    if buf[:8] != MAGIC:
        raise ValueError(f"{path} is not a denoiser checkpoint")
    (hlen,) = struct.unpack_from("<I", buf, 8)
    header = json.loads(buf[12:12 + hlen].decode("utf-8"))
    if header["format_version"] != FORMAT_VERSION:
        raise ValueError(f"unsupported checkpoint version {header['format_version']}")
    offset = 12 + hlen
    state = OrderedDict()
    for spec in header["tensors"]:
        shape = tuple(spec["shape"])
        count = int(np.prod(shape)) if shape else 1
        arr = np.frombuffer(buf, dtype="<f4", count=count, offset=offset).reshape(shape)
        state[spec["name"]] = torch.from_numpy(arr.astype(np.float32))
        offset += 4 * count
    if offset != len(buf):
        raise ValueError(f"checkpoint {path} has {len(buf) - offset} trailing bytes")
    params = DenoiserParams(DenoiserConfig(**header["config"]), state, header["metadata"])
    return params, NoiseSchedule.from_dict(header["schedule"])
