import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from tensorcore import AttentionWeights, Tensor, as_tensor
from tensorcore import functional as F

logger = logging.getLogger(__name__)


@dataclass
class DensityMap:
    """Per-frame density; the repetition count is its sum."""
    values: Tensor

    def __post_init__(self):
        self.values = as_tensor(self.values)

    @property
    def count(self):
        return count_from_density(self)

    def total(self):
        """Differentiable sum of the density."""
        return self.values.sum()

    def __len__(self):
        return self.values.shape[0]


def count_from_density(D):
    return math.fsum(np.asarray(D.values.data, dtype=np.float64).ravel())


def init_predictor_params(store, cfg):
    dim = cfg.fused_dim
    hidden = cfg.ffn_multiplier * dim
    for i in range(cfg.predictor_layers):
        prefix = f'predictor.layer{i}'
        AttentionWeights.register(store, f'{prefix}.attn', dim)
        store.constant(f'{prefix}.norm1.gain', (dim,), 1.0)
        store.constant(f'{prefix}.norm1.shift', (dim,), 0.0)
        store.uniform(f'{prefix}.ffn1.weight', (dim, hidden), fan_in=dim)
        store.uniform(f'{prefix}.ffn1.bias', (hidden,), fan_in=dim)
        store.uniform(f'{prefix}.ffn2.weight', (hidden, dim), fan_in=hidden)
        store.uniform(f'{prefix}.ffn2.bias', (dim,), fan_in=hidden)
        store.constant(f'{prefix}.norm2.gain', (dim,), 1.0)
        store.constant(f'{prefix}.norm2.shift', (dim,), 0.0)
    store.uniform('predictor.head.weight', (dim, 1), fan_in=dim)
    store.uniform('predictor.head.bias', (1,), fan_in=dim)
    return store


def _encoder_layer(x, prefix, heads, params):
    attended = F.self_attention(x, heads, AttentionWeights.from_store(params, f'{prefix}.attn'))
    x = F.layer_norm(x + attended, params[f'{prefix}.norm1.gain'], params[f'{prefix}.norm1.shift'])
    hidden = F.linear(x, params[f'{prefix}.ffn1.weight'], params[f'{prefix}.ffn1.bias']).relu()
    hidden = F.linear(hidden, params[f'{prefix}.ffn2.weight'], params[f'{prefix}.ffn2.bias'])
    return F.layer_norm(x + hidden, params[f'{prefix}.norm2.gain'], params[f'{prefix}.norm2.shift'])


def predict_density(fused, cfg, params):
    """Transformer encoder layers then a per-frame linear head; the output is unconstrained in sign."""
    x = as_tensor(fused)
    for i in range(cfg.predictor_layers):
        x = _encoder_layer(x, f'predictor.layer{i}', cfg.predictor_heads, params)
    out = F.linear(x, params['predictor.head.weight'], params['predictor.head.bias'])
    return DensityMap(out.reshape(out.shape[0]))


def dump_density(path, predicted, gt=None):
    """CSV with columns frame_index, density, gt_density."""
    values = np.asarray(predicted.values.data)
    frame = pd.DataFrame({'frame_index': np.arange(values.shape[0]), 'density': values})
    frame['gt_density'] = np.asarray(gt.values.data) if gt is not None else np.nan
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format='%.6g')
    return path
