"""Binary model checkpoints.

Layout: magic "PGPT" | u32-LE format version | u32-LE header length |
UTF-8 JSON header | payload. The header carries the model config and a
named-tensor manifest (name, shape, byte offset into the payload); the
payload is the tensors as 32-bit little-endian floats in manifest order.
Round trips are bit-identical.
"""

from __future__ import annotations

import json
import os
import struct
import tempfile

import numpy as np

from .model import ModelConfig, ModelParams
from .tensor import Tensor

MAGIC = b"PGPT"
VERSION = 1


class CheckpointError(ValueError):
    pass


def save_checkpoint(params, config, path):
    """Atomic write: temp file in the target directory, then rename."""
    manifest = []
    offset = 0
    blobs = []
    for name, tensor in params.items():
        blob = np.ascontiguousarray(tensor.data, dtype="<f4").tobytes()
        manifest.append({"name": name,
                         "shape": list(tensor.data.shape),
                         "offset": offset})
        offset += len(blob)
        blobs.append(blob)
    header = json.dumps({"config": config.to_dict(),
                         "manifest": manifest}).encode("utf-8")

    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".ckpt.tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(MAGIC)
            f.write(struct.pack("<I", VERSION))
            f.write(struct.pack("<I", len(header)))
            f.write(header)
            for blob in blobs:
                f.write(blob)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_checkpoint(path):
    """Returns (ModelParams, ModelConfig); never partially loads."""
    with open(path, "rb") as f:
        raw = f.read()
    if raw[:4] != MAGIC:
        raise CheckpointError("%s is not a checkpoint (bad magic)" % path)
    if len(raw) < 12:
        raise CheckpointError("%s is truncated (no header)" % path)
    (version,) = struct.unpack_from("<I", raw, 4)
    if version != VERSION:
        raise CheckpointError("checkpoint format version %d is not "
                              "supported (expected %d)" % (version, VERSION))
    (header_len,) = struct.unpack_from("<I", raw, 8)
    header_end = 12 + header_len
    if len(raw) < header_end:
        raise CheckpointError("%s is truncated (incomplete header)" % path)
    try:
        header = json.loads(raw[12:header_end].decode("utf-8"))
        config = ModelConfig.from_dict(header["config"])
        manifest = header["manifest"]
    except (ValueError, KeyError, TypeError) as e:
        raise CheckpointError("corrupt checkpoint header: %s" % e) from e

    payload = raw[header_end:]
    tensors = {}
    for entry in manifest:
        shape = tuple(entry["shape"])
        count = int(np.prod(shape)) if shape else 1
        start = entry["offset"]
        end = start + 4 * count
        if end > len(payload):
            raise CheckpointError("%s is truncated (tensor %r)"
                                  % (path, entry["name"]))
        arr = np.frombuffer(payload[start:end], dtype="<f4").reshape(shape)
        tensors[entry["name"]] = Tensor(arr.astype(np.float32),
                                        requires_grad=True)
    return ModelParams(tensors), config
