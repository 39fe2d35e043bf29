"""Versioned binary checkpoints for flat parameter vectors.

Layout: 8-byte magic, 4-byte little-endian header length, JSON header
(architecture descriptor + its hash, data-file hash, head kind, step count),
then the raw float64 parameter payload.  Loading refuses any hash mismatch so
checkpoints trained against different data files or architectures cannot be
silently mixed.
"""
from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import asdict
from pathlib import Path

import numpy as np

from ..errors import CheckpointError
from ..gamedata import get_data
from .network import ArchDescriptor, param_count

MAGIC = b"DBLSIMCK"
VERSION = 1


def save_checkpoint(path: str | Path, params: np.ndarray,
                    desc: ArchDescriptor, head: str = "actor",
                    step: int = 0, extra: dict | None = None) -> None:
    params = np.ascontiguousarray(params, dtype=np.float64)
    expected = param_count(desc, head)
    if params.shape != (expected,):
        raise CheckpointError(
            f"parameter vector has {params.shape[0]} entries, "
            f"descriptor expects {expected}")
    header = {
        "version": VERSION,
        "arch": asdict(desc),
        "arch_hash": desc.hash(),
        "data_hash": get_data().content_hash,
        "head": head,
        "step": int(step),
        "n_params": int(expected),
        "param_hash": hashlib.sha256(params.tobytes()).hexdigest()[:16],
    }
    if extra:
        header["extra"] = extra
    blob = json.dumps(header, sort_keys=True).encode()
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        fh.write(params.tobytes())


def load_checkpoint(path: str | Path, expect_head: str | None = None
                    ) -> tuple[np.ndarray, ArchDescriptor, dict]:
    """Returns (params, descriptor, header).  Raises on any mismatch."""
    raw = Path(path).read_bytes()
    if raw[:8] != MAGIC:
        raise CheckpointError(f"{path}: not a checkpoint file")
    (hlen,) = struct.unpack("<I", raw[8:12])
    try:
        header = json.loads(raw[12:12 + hlen])
    except ValueError as exc:
        raise CheckpointError(f"{path}: corrupt header") from exc
    if header.get("version") != VERSION:
        raise CheckpointError(f"{path}: unsupported version {header.get('version')}")
    desc = ArchDescriptor(**header["arch"])
    if desc.hash() != header["arch_hash"]:
        raise CheckpointError(f"{path}: architecture hash mismatch")
    data_hash = get_data().content_hash
    if header["data_hash"] != data_hash:
        raise CheckpointError(
            f"{path}: built against data {header['data_hash']}, "
            f"current data is {data_hash}")
    if expect_head is not None and header["head"] != expect_head:
        raise CheckpointError(
            f"{path}: holds {header['head']} parameters, expected {expect_head}")
    params = np.frombuffer(raw[12 + hlen:], dtype=np.float64).copy()
    if params.shape[0] != header["n_params"]:
        raise CheckpointError(f"{path}: truncated payload")
    if params.shape[0] != param_count(desc, header["head"]):
        raise CheckpointError(f"{path}: payload size does not match descriptor")
    digest = hashlib.sha256(params.tobytes()).hexdigest()[:16]
    if digest != header.get("param_hash"):
        raise CheckpointError(f"{path}: parameter payload is corrupt")
    return params, desc, header
