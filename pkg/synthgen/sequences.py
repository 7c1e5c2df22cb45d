"""
Synthetic embedding sequences with annotated repetition cycles.

A sequence is a rest process (slow AR(1) drift around a rest pose) into which
cycles of a smooth closed "action template" are written. Each cycle walks the
template once with linear phase warping, so a longer cycle is the same motion
performed more slowly. Interruptions are extra rest frames placed between two
cycles, never inside one.
"""
import logging
from dataclasses import asdict, dataclass

import numpy as np

from utils.exceptions import AnnotationError, ConfigurationError, GenerationError

logger = logging.getLogger(__name__)

TEMPLATE_HARMONICS = 3
REST_OFFSET_NORM = 2.0
REST_AR_COEF = 0.9
REST_AR_SCALE = 0.15


@dataclass(frozen=True)
class GenConfig:
    seq_len: int = 64
    embed_dim: int = 16
    cycle_len_range: tuple = (8, 24)
    n_cycles_range: tuple = (2, 6)
    interruption_prob: float = 0.5
    interruption_len_range: tuple = (4, 16)
    noise_sigma: float = 0.1
    lead_tail_range: tuple = (0, 8)
    seed: int = 0

    RANGE_FIELDS = ('cycle_len_range', 'n_cycles_range', 'interruption_len_range', 'lead_tail_range')

    def __post_init__(self):
        # JSON round trips hand back lists
        for name in self.RANGE_FIELDS:
            object.__setattr__(self, name, tuple(int(v) for v in getattr(self, name)))

    def validate(self):
        if self.seq_len < 1 or self.embed_dim < 1:
            raise ConfigurationError(f'seq_len and embed_dim must be positive, got {self.seq_len}, {self.embed_dim}')
        for name in self.RANGE_FIELDS:
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ConfigurationError(f'{name} must satisfy min <= max, got ({lo}, {hi})')
            if lo < 0:
                raise ConfigurationError(f'{name} must be non-negative, got ({lo}, {hi})')
        if self.cycle_len_range[0] < 1 or self.n_cycles_range[0] < 1:
            raise ConfigurationError('cycles need at least one frame and at least one cycle per sequence')
        if not 0.0 <= self.interruption_prob <= 1.0:
            raise ConfigurationError(f'interruption_prob must lie in [0, 1], got {self.interruption_prob}')
        if self.noise_sigma < 0:
            raise ConfigurationError(f'noise_sigma must be non-negative, got {self.noise_sigma}')
        minimum = self.n_cycles_range[0] * self.cycle_len_range[0] + 2 * self.lead_tail_range[0]
        if minimum > self.seq_len:
            raise GenerationError(
                f'{self.n_cycles_range[0]} cycles of at least {self.cycle_len_range[0]} frames plus '
                f'{2 * self.lead_tail_range[0]} lead/tail frames cannot fit in {self.seq_len} frames'
            )
        return self

    def to_dict(self):
        data = asdict(self)
        for name in self.RANGE_FIELDS:
            data[name] = list(data[name])
        return data


@dataclass(frozen=True)
class CycleAnnotations:
    """Half-open [start, end) frame intervals, one per repetition."""
    cycles: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, 'cycles', tuple((int(s), int(e)) for s, e in self.cycles))

    @property
    def count(self):
        return len(self.cycles)

    @property
    def has_interruption(self):
        return any(nxt[0] > cur[1] for cur, nxt in zip(self.cycles, self.cycles[1:]))

    def validate(self, seq_len):
        previous_end = 0
        for start, end in self.cycles:
            if not 0 <= start < end <= seq_len:
                raise AnnotationError(f'cycle [{start}, {end}) is empty or outside [0, {seq_len})')
            if start < previous_end:
                raise AnnotationError(f'cycle [{start}, {end}) overlaps or precedes the previous cycle')
            previous_end = end
        return self

    def to_dict(self, sequence_id):
        return {'id': sequence_id, 'count': self.count, 'cycles': [list(c) for c in self.cycles]}


@dataclass(frozen=True, eq=False)
class LabeledSequence:
    embeddings: np.ndarray
    annotations: CycleAnnotations
    id: str

    @property
    def seq_len(self):
        return self.embeddings.shape[0]


@dataclass(frozen=True, eq=False)
class ActionTemplate:
    """Closed curve offset + sum_h a_h cos(2 pi h phase) + b_h sin(2 pi h phase)."""
    offset: np.ndarray
    cos_coef: np.ndarray
    sin_coef: np.ndarray

    @classmethod
    def draw(cls, rng, embed_dim, harmonics=TEMPLATE_HARMONICS):
        scale = 1.0 / np.sqrt(np.arange(1, harmonics + 1))[:, None]
        return cls(
            offset=rng.normal(size=embed_dim),
            cos_coef=rng.normal(size=(harmonics, embed_dim)) * scale,
            sin_coef=rng.normal(size=(harmonics, embed_dim)) * scale,
        )

    def __call__(self, phases):
        orders = np.arange(1, self.cos_coef.shape[0] + 1)
        angles = 2.0 * np.pi * np.outer(phases, orders)
        return self.offset + np.cos(angles) @ self.cos_coef + np.sin(angles) @ self.sin_coef


def _draw(rng, lo, hi, cap):
    return int(rng.integers(lo, min(hi, cap) + 1))


def _layout(cfg, rng):
    """Place lead frames, cycles and interruptions inside seq_len frames."""
    n = cfg.seq_len
    cycle_lo, cycle_hi = cfg.cycle_len_range
    edge_lo, edge_hi = cfg.lead_tail_range
    gap_lo, gap_hi = cfg.interruption_len_range
    fit = (n - 2 * edge_lo) // cycle_lo
    n_cycles = _draw(rng, cfg.n_cycles_range[0], cfg.n_cycles_range[1], fit)

    used = _draw(rng, edge_lo, edge_hi, n - n_cycles * cycle_lo - edge_lo)
    lead = used
    lengths, gaps = [], []
    for i in range(n_cycles):
        reserve = (n_cycles - i - 1) * cycle_lo + edge_lo
        length = _draw(rng, cycle_lo, cycle_hi, n - used - reserve)
        lengths.append(length)
        used += length
        gap = 0
        if i < n_cycles - 1 and rng.random() < cfg.interruption_prob and n - used - reserve >= gap_lo:
            gap = _draw(rng, gap_lo, gap_hi, n - used - reserve)
        gaps.append(gap)
        used += gap
    # early cycles see the largest budget; shuffle so position and length are independent
    lengths = [lengths[i] for i in rng.permutation(n_cycles)]

    cycles, cursor = [], lead
    for length, gap in zip(lengths, gaps):
        cycles.append((cursor, cursor + length))
        cursor += length + gap
    return CycleAnnotations(tuple(cycles))


def _rest_process(rng, template, seq_len):
    direction = rng.normal(size=template.offset.shape)
    direction /= np.linalg.norm(direction)
    rest_pose = template.offset + REST_OFFSET_NORM * direction
    innovations = rng.normal(size=(seq_len, template.offset.shape[0]))
    drift = np.empty_like(innovations)
    drift[0] = REST_AR_SCALE * innovations[0]
    step = REST_AR_SCALE * np.sqrt(1.0 - REST_AR_COEF ** 2)
    for t in range(1, seq_len):
        drift[t] = REST_AR_COEF * drift[t - 1] + step * innovations[t]
    return rest_pose + drift


def generate_sequence(cfg, seed, sequence_id=None):
    """Build one LabeledSequence; a pure function of (cfg, seed)."""
    cfg.validate()
    rng = np.random.default_rng(seed)
    template = ActionTemplate.draw(rng, cfg.embed_dim)
    annotations = _layout(cfg, rng)

    embeddings = _rest_process(rng, template, cfg.seq_len)
    for start, end in annotations.cycles:
        length = end - start
        embeddings[start:end] = template(np.arange(length) / length)
    if cfg.noise_sigma > 0:
        embeddings = embeddings + cfg.noise_sigma * rng.normal(size=embeddings.shape)

    annotations.validate(cfg.seq_len)
    return LabeledSequence(
        embeddings=embeddings,
        annotations=annotations,
        id=sequence_id or f'seq_{seed}',
    )
