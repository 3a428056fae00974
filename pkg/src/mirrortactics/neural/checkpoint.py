"""Versioned flat-tensor checkpoint archive.

Byte layout (documented in docs/checkpoint_format.md):

    bytes 0..7    magic ``MTCKPT01``
    bytes 8..11   uint32 little-endian header length H
    bytes 12..12+H  UTF-8 JSON header:
        format_version, manifest (free-form training metadata),
        tensors: [{name, shape, dtype, offset, nbytes, crc32}],
        payload_sha256
    remainder     payload: concatenated raw little-endian float32 tensors

Round trips are bit-exact: tensors are stored and restored as float32.
"""

from __future__ import annotations

import hashlib
import json
import struct
import zlib
from pathlib import Path

import numpy as np

from .nets import Params

MAGIC = b"MTCKPT01"
FORMAT_VERSION = 1


class CheckpointError(Exception):
    pass


def save_checkpoint(path: str | Path, manifest: dict, tensors: Params) -> None:
    index = []
    chunks = []
    offset = 0
    for name in sorted(tensors):
        arr = np.ascontiguousarray(tensors[name], dtype="<f4")
        blob = arr.tobytes()
        index.append(
            {
                "name": name,
                "shape": list(arr.shape),
                "dtype": "<f4",
                "offset": offset,
                "nbytes": len(blob),
                "crc32": zlib.crc32(blob),
            }
        )
        chunks.append(blob)
        offset += len(blob)
    payload = b"".join(chunks)
    header = {
        "format_version": FORMAT_VERSION,
        "manifest": manifest,
        "tensors": index,
        "payload_sha256": hashlib.sha256(payload).hexdigest(),
    }
    header_blob = json.dumps(header, separators=(",", ":")).encode()
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(header_blob)))
        fh.write(header_blob)
        fh.write(payload)


def load_checkpoint(path: str | Path) -> tuple[dict, Params]:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise CheckpointError(f"cannot read {path}: {exc}") from exc
    if raw[: len(MAGIC)] != MAGIC:
        raise CheckpointError(f"{path}: not a checkpoint file (bad magic)")
    (header_len,) = struct.unpack("<I", raw[8:12])
    try:
        header = json.loads(raw[12 : 12 + header_len])
    except json.JSONDecodeError as exc:
        raise CheckpointError(f"{path}: corrupt header: {exc}") from exc
    if header.get("format_version") != FORMAT_VERSION:
        raise CheckpointError(f"{path}: unsupported version {header.get('format_version')}")
    payload = raw[12 + header_len :]
    if hashlib.sha256(payload).hexdigest() != header["payload_sha256"]:
        # fall through to per-tensor checks so the error names the tensor
        pass
    tensors: Params = {}
    for entry in header["tensors"]:
        start, nbytes = entry["offset"], entry["nbytes"]
        blob = payload[start : start + nbytes]
        if len(blob) != nbytes or zlib.crc32(blob) != entry["crc32"]:
            raise CheckpointError(f"{path}: corrupted tensor section {entry['name']!r}")
        tensors[entry["name"]] = np.frombuffer(blob, dtype="<f4").reshape(entry["shape"]).copy()
    if hashlib.sha256(payload).hexdigest() != header["payload_sha256"]:
        raise CheckpointError(f"{path}: payload checksum mismatch")
    return header["manifest"], tensors


def verify_manifest_hashes(manifest: dict, config_hash: str | None = None) -> list[str]:
    """Non-fatal consistency check; returns human-readable warnings."""
    warnings = []
    if config_hash is not None and manifest.get("config_hash") not in (None, config_hash):
        warnings.append(
            f"checkpoint was trained under game config {manifest.get('config_hash')}, "
            f"runtime config is {config_hash}"
        )
    return warnings
