"""
On-disk dataset layout.

    <out_dir>/manifest.json
    <out_dir>/<split>/<id>.emb    binary embeddings
    <out_dir>/<split>/<id>.json   cycle annotations

Embedding files start with the magic ``LMRL`` followed by little-endian u32
N and C, then N*C little-endian float32 values in row-major order.
"""
import json
import logging
import struct
from pathlib import Path

import numpy as np

from utils.exceptions import AnnotationError, DataError, format_validation_errors
from utils.seeding import derive_seed

from .sequences import CycleAnnotations, GenConfig, LabeledSequence, generate_sequence
from .serializers import AnnotationFileSerializer, ManifestSerializer

logger = logging.getLogger(__name__)

EMBEDDING_MAGIC = b'LMRL'
EMBEDDING_HEADER = struct.Struct('<4sII')
EMBEDDING_DTYPE = np.dtype('<f4')
MANIFEST_NAME = 'manifest.json'
MANIFEST_FORMAT = 'lmrl-dataset'
MANIFEST_VERSION = 1
SPLITS = ('train', 'val', 'test')


def write_embeddings(path, embeddings):
    embeddings = np.asarray(embeddings)
    if embeddings.ndim != 2:
        raise DataError(f'{path}: embeddings must be a matrix, got shape {list(embeddings.shape)}')
    n, c = embeddings.shape
    with open(path, 'wb') as handle:
        handle.write(EMBEDDING_HEADER.pack(EMBEDDING_MAGIC, n, c))
        handle.write(np.ascontiguousarray(embeddings, dtype=EMBEDDING_DTYPE).tobytes())


def read_embeddings(path):
    raw = Path(path).read_bytes()
    if len(raw) < EMBEDDING_HEADER.size:
        raise DataError(f'{path}: file too short for an embedding header')
    magic, n, c = EMBEDDING_HEADER.unpack_from(raw)
    if magic != EMBEDDING_MAGIC:
        raise DataError(f'{path}: bad magic {magic!r}, expected {EMBEDDING_MAGIC!r}')
    expected = EMBEDDING_HEADER.size + n * c * EMBEDDING_DTYPE.itemsize
    if len(raw) != expected:
        raise DataError(f'{path}: expected {expected} bytes for a {n}x{c} sequence, found {len(raw)}')
    values = np.frombuffer(raw, dtype=EMBEDDING_DTYPE, offset=EMBEDDING_HEADER.size)
    return values.reshape(n, c).astype(np.float64)


def write_annotations(path, annotations, sequence_id):
    with open(path, 'w', encoding='utf-8') as handle:
        json.dump(annotations.to_dict(sequence_id), handle, indent=2, sort_keys=True)
        handle.write('\n')


def _read_json(path):
    try:
        return json.loads(Path(path).read_text(encoding='utf-8'))
    except json.JSONDecodeError as exc:
        raise DataError(f'{path}: invalid JSON ({exc.msg} at line {exc.lineno})') from exc


def read_annotations(path, seq_len=None):
    serializer = AnnotationFileSerializer(data=_read_json(path))
    if not serializer.is_valid():
        raise DataError(f'{path}: {format_validation_errors(serializer.errors)}')
    annotations = CycleAnnotations(tuple(serializer.validated_data['cycles']))
    if seq_len is not None:
        try:
            annotations.validate(seq_len)
        except AnnotationError as exc:
            raise DataError(f'{path}: {exc}') from exc
    return serializer.validated_data['id'], annotations


def generate_dataset(cfg, n_train, n_val, n_test, out_dir):
    """Write a train/val/test corpus and return its manifest dict.

    Sequence ``i`` of split ``s`` is generated with seed
    ``derive_seed(cfg.seed, s, i)``, so a split's content does not depend on
    the sizes of the other splits.
    """
    cfg.validate()
    out_dir = Path(out_dir)
    counts = dict(zip(SPLITS, (n_train, n_val, n_test)))
    splits, total = {}, 0
    for split, size in counts.items():
        split_dir = out_dir / split
        split_dir.mkdir(parents=True, exist_ok=True)
        entries = []
        for index in range(int(size)):
            sequence_id = f'{split}_{index:04d}'
            sequence = generate_sequence(cfg, derive_seed(cfg.seed, split, index), sequence_id)
            write_embeddings(split_dir / f'{sequence_id}.emb', sequence.embeddings)
            write_annotations(split_dir / f'{sequence_id}.json', sequence.annotations, sequence_id)
            entries.append({
                'id': sequence_id,
                'embeddings': f'{split}/{sequence_id}.emb',
                'annotations': f'{split}/{sequence_id}.json',
                'count': sequence.annotations.count,
            })
            total += sequence.annotations.count
        splits[split] = entries
        logger.info(f'✓ Generated {len(entries)} {split} sequences under {split_dir}')

    manifest = {
        'format': MANIFEST_FORMAT,
        'version': MANIFEST_VERSION,
        'gen_config': cfg.to_dict(),
        'splits': splits,
        'total_count': total,
    }
    with open(out_dir / MANIFEST_NAME, 'w', encoding='utf-8') as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
        handle.write('\n')
    return manifest


def read_manifest(data_dir):
    path = Path(data_dir) / MANIFEST_NAME
    if not path.exists():
        raise DataError(f'{path}: dataset manifest not found')
    serializer = ManifestSerializer(data=_read_json(path))
    if not serializer.is_valid():
        raise DataError(f'{path}: {format_validation_errors(serializer.errors)}')
    return serializer.validated_data


def load_dataset(data_dir, splits=None):
    """Read sequences listed in the manifest, returning {split: [LabeledSequence]}."""
    data_dir = Path(data_dir)
    manifest = read_manifest(data_dir)
    gen_config = GenConfig(**manifest['gen_config'])
    wanted = manifest['splits'].keys() if splits is None else splits
    dataset = {}
    for split in wanted:
        if split not in manifest['splits']:
            raise DataError(f"{data_dir / MANIFEST_NAME}: split '{split}' is not listed")
        sequences = []
        for entry in manifest['splits'][split]:
            embeddings = read_embeddings(data_dir / entry['embeddings'])
            if embeddings.shape[1] != gen_config.embed_dim:
                raise DataError(
                    f"{data_dir / entry['embeddings']}: embedding width {embeddings.shape[1]} "
                    f'differs from manifest embed_dim {gen_config.embed_dim}'
                )
            sequence_id, annotations = read_annotations(data_dir / entry['annotations'], embeddings.shape[0])
            if sequence_id != entry['id'] or annotations.count != entry['count']:
                raise DataError(
                    f"{data_dir / entry['annotations']}: does not match manifest entry '{entry['id']}' "
                    f"(count {annotations.count} vs {entry['count']})"
                )
            sequences.append(LabeledSequence(embeddings=embeddings, annotations=annotations, id=sequence_id))
        dataset[split] = sequences
    logger.info(f'Loaded {sum(len(v) for v in dataset.values())} sequences from {data_dir}')
    return dataset


def load_gen_config(data_dir):
    return GenConfig(**read_manifest(data_dir)['gen_config'])


__all__ = [
    'write_embeddings', 'read_embeddings', 'write_annotations', 'read_annotations',
    'generate_dataset', 'read_manifest', 'load_dataset', 'load_gen_config',
]
