"""
Repetition foreground localization: a dilated residual TCN over the embedding
sequence and a per-frame foreground/background head.
"""
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from tensorcore import Tensor, as_tensor
from tensorcore import functional as F
from utils.exceptions import ConfigurationError

logger = logging.getLogger(__name__)

BACKGROUND, FOREGROUND = 0, 1
RECEPTIVE_FIELD_SLACK = 4


@dataclass(frozen=True)
class RflConfig:
    n_blocks: int = 6
    channels: int = 32
    kernel_size: int = 3
    dilation_base: int = 2

    def validate(self):
        if self.n_blocks < 1 or self.channels < 1:
            raise ConfigurationError(f'n_blocks and channels must be positive, got {self.n_blocks}, {self.channels}')
        if self.kernel_size < 1 or self.kernel_size % 2 == 0:
            raise ConfigurationError(f'kernel_size must be a positive odd number, got {self.kernel_size}')
        if self.dilation_base < 1:
            raise ConfigurationError(f'dilation_base must be positive, got {self.dilation_base}')
        return self

    def dilations(self):
        return [self.dilation_base ** i for i in range(self.n_blocks)]

    @property
    def receptive_field(self):
        return 1 + (self.kernel_size - 1) * sum(self.dilations())


@dataclass
class ForegroundPrediction:
    logits: Tensor
    probs: Tensor

    @property
    def hard_mask(self):
        # argmax keeps the first index, so ties go to background
        return self.probs.data.argmax(axis=1).astype(np.int64)

    @property
    def foreground_prob(self):
        return self.probs.data[:, FOREGROUND]


def check_receptive_field(cfg, seq_len):
    """Log a warning when the receptive field dwarfs the sequence; returns True when it does."""
    field = cfg.receptive_field
    if field > RECEPTIVE_FIELD_SLACK * seq_len:
        logger.warning(
            f'RFL receptive field {field} exceeds {RECEPTIVE_FIELD_SLACK}x the sequence length {seq_len}; '
            f'the outer blocks only see padding'
        )
        return True
    return False


def init_rfl_params(store, cfg, embed_dim, seq_len=None):
    cfg.validate()
    if seq_len is not None:
        check_receptive_field(cfg, seq_len)
    width, k = cfg.channels, cfg.kernel_size
    store.uniform('rfl.entry.weight', (1, embed_dim, width), fan_in=embed_dim)
    store.uniform('rfl.entry.bias', (width,), fan_in=embed_dim)
    for i in range(cfg.n_blocks):
        store.uniform(f'rfl.block{i}.dilated.weight', (k, width, width), fan_in=k * width)
        store.uniform(f'rfl.block{i}.dilated.bias', (width,), fan_in=k * width)
        store.uniform(f'rfl.block{i}.pointwise.weight', (1, width, width), fan_in=width)
        store.uniform(f'rfl.block{i}.pointwise.bias', (width,), fan_in=width)
    store.uniform('rfl.head.weight', (width, 2), fan_in=width)
    store.uniform('rfl.head.bias', (2,), fan_in=width)
    return store


def tcn_forward(X, cfg, params):
    """Entry 1x1 projection followed by ``n_blocks`` dilated residual blocks; length preserved."""
    hidden = F.conv1d(as_tensor(X), params['rfl.entry.weight'], params['rfl.entry.bias'])
    for i, dilation in enumerate(cfg.dilations()):
        branch = F.conv1d(
            hidden, params[f'rfl.block{i}.dilated.weight'], params[f'rfl.block{i}.dilated.bias'], dilation=dilation,
        ).relu()
        branch = F.conv1d(branch, params[f'rfl.block{i}.pointwise.weight'], params[f'rfl.block{i}.pointwise.bias'])
        hidden = hidden + branch
    return hidden


def foreground_logits(features, params):
    logits = F.linear(as_tensor(features), params['rfl.head.weight'], params['rfl.head.bias'])
    return ForegroundPrediction(logits=logits, probs=F.softmax(logits, axis=1))


def dump_foreground(prediction, path, gt_mask=None):
    """Per-frame foreground probability as CSV."""
    frame = pd.DataFrame({
        'frame_index': np.arange(prediction.probs.shape[0]),
        'foreground_prob': prediction.foreground_prob,
        'hard_mask': prediction.hard_mask,
    })
    if gt_mask is not None:
        frame['gt_mask'] = np.asarray(gt_mask, dtype=np.int64)
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format='%.6g')
    return path
