"""
Binary checkpoint format.

    b'LMRLCKPT'            magic
    u32                    format version
    u32                    header length in bytes
    header                 UTF-8 JSON: run_config, config_hash, epoch, metrics,
                           and a list of (name, shape) parameter entries
    payload                little-endian float64 values, parameters back to
                           back in header order

All integers are little-endian.
"""
import json
import logging
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from utils.exceptions import ConfigurationError, DataError

from .config import RunConfig, config_hash

logger = logging.getLogger(__name__)

CHECKPOINT_MAGIC = b'LMRLCKPT'
CHECKPOINT_VERSION = 1
PREAMBLE = struct.Struct('<8sII')
PAYLOAD_DTYPE = np.dtype('<f8')


@dataclass
class Checkpoint:
    params: dict
    epoch: int
    config: RunConfig
    metrics: dict = field(default_factory=dict)

    @property
    def config_hash(self):
        return config_hash(self.config)


def save_checkpoint(checkpoint, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = sorted(checkpoint.params)
    header = {
        'config_hash': checkpoint.config_hash,
        'epoch': int(checkpoint.epoch),
        'metrics': checkpoint.metrics,
        'params': [[name, list(np.shape(checkpoint.params[name]))] for name in names],
        'run_config': checkpoint.config.to_dict(),
    }
    header_bytes = json.dumps(header, sort_keys=True, separators=(',', ':')).encode('utf-8')
    with open(path, 'wb') as handle:
        handle.write(PREAMBLE.pack(CHECKPOINT_MAGIC, CHECKPOINT_VERSION, len(header_bytes)))
        handle.write(header_bytes)
        for name in names:
            handle.write(np.ascontiguousarray(checkpoint.params[name], dtype=PAYLOAD_DTYPE).tobytes())
    logger.info(f'✓ Saved checkpoint {path} (epoch {checkpoint.epoch})')
    return path


def load_checkpoint(path):
    path = Path(path)
    if not path.exists():
        raise DataError(f'{path}: checkpoint not found')
    raw = path.read_bytes()
    if len(raw) < PREAMBLE.size:
        raise DataError(f'{path}: file too short for a checkpoint')
    magic, version, header_len = PREAMBLE.unpack_from(raw)
    if magic != CHECKPOINT_MAGIC:
        raise DataError(f'{path}: not a checkpoint (bad magic {magic!r})')
    if version != CHECKPOINT_VERSION:
        raise DataError(f'{path}: unsupported checkpoint version {version}')
    start = PREAMBLE.size
    try:
        header = json.loads(raw[start:start + header_len].decode('utf-8'))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise DataError(f'{path}: corrupted checkpoint header') from exc

    try:
        config = RunConfig.from_dict(header['run_config'], source=str(path))
    except (KeyError, ConfigurationError) as exc:
        raise DataError(f'{path}: checkpoint carries an invalid run config ({exc})') from exc
    if config_hash(config) != header.get('config_hash'):
        raise DataError(f'{path}: config hash mismatch, the stored run config was altered')

    params, offset = {}, start + header_len
    for name, shape in header.get('params', []):
        size = int(np.prod(shape, dtype=np.int64)) * PAYLOAD_DTYPE.itemsize
        if offset + size > len(raw):
            raise DataError(f"{path}: payload truncated at parameter '{name}'")
        params[name] = np.frombuffer(raw, dtype=PAYLOAD_DTYPE, count=size // PAYLOAD_DTYPE.itemsize,
                                     offset=offset).reshape(shape).astype(np.float64)
        offset += size
    if offset != len(raw):
        raise DataError(f'{path}: {len(raw) - offset} trailing bytes after the payload')
    return Checkpoint(params=params, epoch=int(header['epoch']), config=config, metrics=header.get('metrics', {}))
