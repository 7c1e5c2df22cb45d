"""
Ground truth derived from cycle annotations.
"""
from dataclasses import dataclass

import numpy as np

from fusion.predictor import DensityMap
from utils.exceptions import AnnotationError

# Gaussian width per cycle: sigma = cycle length / DENSITY_SIGMA_DIVISOR
DENSITY_SIGMA_DIVISOR = 6.0


def foreground_mask(annotations, seq_len):
    annotations.validate(seq_len)
    mask = np.zeros(seq_len, dtype=np.int64)
    for start, end in annotations.cycles:
        mask[start:end] = 1
    return mask


def _cycle_density(start, end):
    length = end - start
    if length < 1:
        raise AnnotationError(f'cycle [{start}, {end}) has no frames')
    frames = np.arange(start, end, dtype=np.float64)
    centre = (start + end - 1) / 2.0
    sigma = length / DENSITY_SIGMA_DIVISOR
    weights = np.exp(-0.5 * ((frames - centre) / sigma) ** 2)
    return weights / weights.sum()


def density_gt(annotations, seq_len):
    """Sum of per-cycle truncated Gaussians, each renormalised to mass 1."""
    for start, end in annotations.cycles:
        if end <= start:
            raise AnnotationError(f'cycle [{start}, {end}) has no frames')
    annotations.validate(seq_len)
    values = np.zeros(seq_len, dtype=np.float64)
    for start, end in annotations.cycles:
        values[start:end] += _cycle_density(start, end)
    return DensityMap(values)


@dataclass
class Targets:
    mask: np.ndarray
    density: DensityMap
    count: int

    @property
    def seq_len(self):
        return self.mask.shape[0]


def build_targets(annotations, seq_len):
    return Targets(
        mask=foreground_mask(annotations, seq_len),
        density=density_gt(annotations, seq_len),
        count=annotations.count,
    )
