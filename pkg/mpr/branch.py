"""
Multi-scale period-aware representation.

The branch turns an N x C embedding sequence into P (N x K): a similarity map
between all frame pairs is refined by a small convolution stack, then each
scale k max-pools the refined map with a 2k window, attends over the pooled
rows and collapses the result to one value per frame.

Parameter names:

    mpr.similarity.weight            C x C bilinear form
    mpr.refine.expand.*              1x1 conv, 1 -> out_channels
    mpr.refine.dilated<i>.*          3x3 conv per dilation rate
    mpr.refine.collapse.*            1x1 conv, out_channels -> 1
    mpr.scale<k>.attn.*              attention over pooled rows (dim M_k)
    mpr.scale<k>.reduce.*            M_k -> 1 channel map
    mpr.tsm_head.*                   N -> K  (``tsm`` variant)
    mpr.embed_attn.*, mpr.embed_head.*        (``self_attention`` variant)
"""
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from tensorcore import AttentionWeights, Tensor, as_tensor
from tensorcore import functional as F
from utils.exceptions import ConfigurationError, DimensionError

logger = logging.getLogger(__name__)

VARIANTS = ('lmrl', 'mpr_tsm', 'tsm', 'self_attention')
REFINE_KERNEL = 3


@dataclass(frozen=True)
class MprConfig:
    scale_orders: tuple = (1, 2, 3)
    dilation_rates: tuple = (2,)
    attention_heads: int = 2
    out_channels: int = 8
    variant: str = 'lmrl'

    def __post_init__(self):
        object.__setattr__(self, 'scale_orders', tuple(int(k) for k in self.scale_orders))
        object.__setattr__(self, 'dilation_rates', tuple(int(d) for d in self.dilation_rates))

    @property
    def scales(self):
        return len(self.scale_orders)

    def pooled_size(self, seq_len, k):
        return math.ceil(seq_len / (2 * k))

    def heads_for(self, dim):
        """Configured head count, or 1 when ``dim`` does not split evenly."""
        return self.attention_heads if dim % self.attention_heads == 0 else 1

    def validate(self, seq_len=None):
        if self.variant not in VARIANTS:
            raise ConfigurationError(f"unknown similarity variant '{self.variant}', expected one of {list(VARIANTS)}")
        if not self.scale_orders or any(k < 1 for k in self.scale_orders):
            raise ConfigurationError(f'scale orders must be positive, got {list(self.scale_orders)}')
        if len(set(self.scale_orders)) != len(self.scale_orders):
            raise ConfigurationError(f'scale orders must be distinct, got {list(self.scale_orders)}')
        if any(d < 1 for d in self.dilation_rates):
            raise ConfigurationError(f'dilation rates must be positive, got {list(self.dilation_rates)}')
        if self.attention_heads < 1 or self.out_channels < 1:
            raise ConfigurationError('attention_heads and out_channels must be positive')
        if seq_len is not None:
            for k in self.scale_orders:
                if 2 * k > seq_len:
                    raise ConfigurationError(
                        f'scale order {k} pools with window {2 * k}, larger than the sequence length {seq_len}'
                    )
        return self


@dataclass
class SimilarityStack:
    raw: Tensor
    refined: Tensor
    pooled: list = field(default_factory=list)
    scale_vectors: list = field(default_factory=list)
    P: Tensor = None


def init_mpr_params(store, cfg, seq_len, embed_dim):
    """Register every parameter the configured variant reads."""
    cfg.validate(seq_len)
    if cfg.variant == 'self_attention':
        AttentionWeights.register(store, 'mpr.embed_attn', embed_dim)
        store.uniform('mpr.embed_head.weight', (embed_dim, cfg.scales), fan_in=embed_dim)
        store.uniform('mpr.embed_head.bias', (cfg.scales,), fan_in=embed_dim)
        return store
    if cfg.variant == 'tsm':
        store.uniform('mpr.tsm_head.weight', (seq_len, cfg.scales), fan_in=seq_len)
        store.uniform('mpr.tsm_head.bias', (cfg.scales,), fan_in=seq_len)
        return store

    if cfg.variant == 'lmrl':
        # x_i^T x_j / C at initialisation
        store.constant('mpr.similarity.weight', (embed_dim, embed_dim), 0.0)
        store.set('mpr.similarity.weight', np.eye(embed_dim) / embed_dim)

    width = cfg.out_channels
    store.uniform('mpr.refine.expand.weight', (1, 1, 1, width), fan_in=1)
    store.uniform('mpr.refine.expand.bias', (width,), fan_in=1)
    for i, _ in enumerate(cfg.dilation_rates):
        fan_in = REFINE_KERNEL * REFINE_KERNEL * width
        store.uniform(f'mpr.refine.dilated{i}.weight', (REFINE_KERNEL, REFINE_KERNEL, width, width), fan_in=fan_in)
        store.uniform(f'mpr.refine.dilated{i}.bias', (width,), fan_in=fan_in)
    store.uniform('mpr.refine.collapse.weight', (1, 1, width, 1), fan_in=width)
    store.uniform('mpr.refine.collapse.bias', (1,), fan_in=width)

    for k in cfg.scale_orders:
        pooled = cfg.pooled_size(seq_len, k)
        AttentionWeights.register(store, f'mpr.scale{k}.attn', pooled)
        store.uniform(f'mpr.scale{k}.reduce.weight', (pooled, 1), fan_in=pooled)
        store.uniform(f'mpr.scale{k}.reduce.bias', (1,), fan_in=pooled)
    logger.debug(f'MPR parameters registered for N={seq_len}, C={embed_dim}, variant={cfg.variant}')
    return store


def similarity_matrix(X, W):
    """S[i, j] = x_i^T W x_j"""
    X, W = as_tensor(X), as_tensor(W)
    if X.ndim != 2 or W.shape != (X.shape[1], X.shape[1]):
        raise DimensionError(f'similarity weight {list(W.shape)} does not match embeddings {list(X.shape)}')
    return (X @ W) @ X.T


def tsm_similarity(X):
    """S[i, j] = -||x_i - x_j||^2"""
    X = as_tensor(X)
    if X.ndim != 2:
        raise DimensionError(f'tsm_similarity expects an N x C matrix, got shape {list(X.shape)}')
    squared = (X * X).sum(axis=1, keepdims=True)
    return (X @ X.T) * 2.0 - squared - squared.T


def refine_similarity(S, params, dilation_rates=(2,)):
    """1x1 expansion, ReLU'd dilated 3x3 convolutions, 1x1 collapse; N x N in and out."""
    S = as_tensor(S)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DimensionError(f'similarity map must be square, got shape {list(S.shape)}')
    n = S.shape[0]
    hidden = F.conv2d(S.reshape(1, n, n), params['mpr.refine.expand.weight'], params['mpr.refine.expand.bias'])
    for i, rate in enumerate(dilation_rates):
        hidden = F.conv2d(
            hidden, params[f'mpr.refine.dilated{i}.weight'], params[f'mpr.refine.dilated{i}.bias'], dilation=rate,
        ).relu()
    out = F.conv2d(hidden, params['mpr.refine.collapse.weight'], params['mpr.refine.collapse.bias'])
    return out.reshape(n, n)


def scale_branch(S_ref, k, params, heads=None, return_pooled=False):
    """Pool with a 2k window, attend over pooled rows, reduce to M x 1, resample to N x 1."""
    S_ref = as_tensor(S_ref)
    n = S_ref.shape[0]
    window = 2 * k
    if window > n:
        raise ConfigurationError(f'scale order {k} leaves no pooled rows for a {n}-frame sequence')
    pooled = F.max_pool2d(S_ref, window)
    size = pooled.shape[0]
    reduce_weight = params[f'mpr.scale{k}.reduce.weight']
    if reduce_weight.shape[0] != size:
        raise DimensionError(
            f'scale {k} parameters expect {reduce_weight.shape[0]} pooled rows, got {size} '
            f'(model built for a different sequence length)'
        )
    if heads is None or size % heads:
        heads = 1
    attended = F.self_attention(pooled, heads, AttentionWeights.from_store(params, f'mpr.scale{k}.attn'))
    reduced = F.linear(attended, reduce_weight, params[f'mpr.scale{k}.reduce.bias'])
    vector = F.interpolate_linear(reduced, n)
    if return_pooled:
        return vector, pooled
    return vector


def _multi_scale(S, cfg, params):
    refined = refine_similarity(S, params, cfg.dilation_rates)
    stack = SimilarityStack(raw=S, refined=refined)
    for k in cfg.scale_orders:
        pooled_size = cfg.pooled_size(S.shape[0], k)
        vector, pooled = scale_branch(refined, k, params, heads=cfg.heads_for(pooled_size), return_pooled=True)
        stack.pooled.append(pooled)
        stack.scale_vectors.append(vector)
    stack.P = F.concat(stack.scale_vectors, axis=1)
    return stack


def _columns(P):
    return [P[:, i:i + 1] for i in range(P.shape[1])]


def mpr_forward(X, cfg, params):
    """Return (P, stack) with P of shape N x K for the configured variant."""
    X = as_tensor(X)
    n, channels = X.shape

    if cfg.variant == 'lmrl':
        stack = _multi_scale(similarity_matrix(X, params['mpr.similarity.weight']), cfg, params)
    elif cfg.variant == 'mpr_tsm':
        stack = _multi_scale(tsm_similarity(X) * (1.0 / channels), cfg, params)
    elif cfg.variant == 'tsm':
        S = tsm_similarity(X) * (1.0 / channels)
        weight = params['mpr.tsm_head.weight']
        if weight.shape[0] != n:
            raise DimensionError(f'tsm head expects {weight.shape[0]} frames, got {n}')
        P = F.linear(S, weight, params['mpr.tsm_head.bias'])
        stack = SimilarityStack(raw=S, refined=S, scale_vectors=_columns(P), P=P)
    elif cfg.variant == 'self_attention':
        attended, attention = F.self_attention(
            X, cfg.heads_for(channels), AttentionWeights.from_store(params, 'mpr.embed_attn'), return_weights=True,
        )
        P = F.linear(attended, params['mpr.embed_head.weight'], params['mpr.embed_head.bias'])
        raw = attention[0] if len(attention) == 1 else sum(attention[1:], attention[0]) * (1.0 / len(attention))
        stack = SimilarityStack(raw=raw, refined=raw, scale_vectors=_columns(P), P=P)
    else:
        raise ConfigurationError(f"unknown similarity variant '{cfg.variant}'")
    return stack.P, stack


def dump_similarity_stack(stack, out_dir, prefix, scale_orders=()):
    """Write raw, refined and pooled maps as CSV matrices for offline plotting."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    maps = {'raw': stack.raw, 'refined': stack.refined}
    for k, pooled in zip(scale_orders, stack.pooled):
        maps[f'pooled_k{k}'] = pooled
    written = []
    for name, tensor in maps.items():
        path = out_dir / f'{prefix}_{name}.csv'
        pd.DataFrame(tensor.data).to_csv(path, index=False, header=False, float_format='%.6g')
        written.append(path)
    return written
