"""
Combining the MPR output P (N x K) with the RFL features (N x channels).

    concat        [P Wc | F Wf]                 each projected to C'/2
    weighted_avg  s0 * P Wc + s1 * F Wf         learnable s, both start at 0.5
    mpr_only      P Wc
    rfl_only      F Wf

Every mode ends with LayerNorm and ReLU and yields N x C'.
"""
import logging
from dataclasses import dataclass

import numpy as np

from tensorcore import as_tensor
from tensorcore import functional as F
from utils.exceptions import ConfigurationError, DimensionError

logger = logging.getLogger(__name__)

MODES = ('rfl_only', 'mpr_only', 'weighted_avg', 'concat')
SIGMA_INIT = 0.5


@dataclass(frozen=True)
class FusionConfig:
    mode: str = 'weighted_avg'
    fused_dim: int = 32
    predictor_layers: int = 1
    predictor_heads: int = 4
    ffn_multiplier: int = 4

    def validate(self):
        if self.mode not in MODES:
            raise ConfigurationError(f"unknown integration mode '{self.mode}', expected one of {list(MODES)}")
        if self.fused_dim < 2 or self.fused_dim % 2:
            raise ConfigurationError(f'fused_dim must be an even positive number, got {self.fused_dim}')
        if self.predictor_layers < 1 or self.ffn_multiplier < 1:
            raise ConfigurationError('predictor_layers and ffn_multiplier must be positive')
        if self.predictor_heads < 1 or self.fused_dim % self.predictor_heads:
            raise ConfigurationError(
                f'fused_dim {self.fused_dim} cannot be split across {self.predictor_heads} predictor heads'
            )
        return self

    @property
    def uses_mpr(self):
        return self.mode != 'rfl_only'

    @property
    def uses_rfl(self):
        return self.mode != 'mpr_only'

    @property
    def projection_dim(self):
        return self.fused_dim // 2 if self.mode == 'concat' else self.fused_dim


def init_fusion_params(store, cfg, mpr_dim, rfl_dim):
    cfg.validate()
    width = cfg.projection_dim
    if cfg.uses_mpr:
        store.uniform('fusion.mpr_proj.weight', (mpr_dim, width), fan_in=mpr_dim)
        store.uniform('fusion.mpr_proj.bias', (width,), fan_in=mpr_dim)
    if cfg.uses_rfl:
        store.uniform('fusion.rfl_proj.weight', (rfl_dim, width), fan_in=rfl_dim)
        store.uniform('fusion.rfl_proj.bias', (width,), fan_in=rfl_dim)
    if cfg.mode == 'weighted_avg':
        store.constant('fusion.sigma', (2,), SIGMA_INIT)
    store.constant('fusion.norm.gain', (cfg.fused_dim,), 1.0)
    store.constant('fusion.norm.shift', (cfg.fused_dim,), 0.0)
    return store


def integrate(mpr_out, rfl_out, cfg, params):
    if cfg.mode not in MODES:
        raise ConfigurationError(f"unknown integration mode '{cfg.mode}', expected one of {list(MODES)}")
    mpr_out, rfl_out = as_tensor(mpr_out), as_tensor(rfl_out)
    if mpr_out.shape[0] != rfl_out.shape[0]:
        raise DimensionError(f'branch lengths differ: MPR {list(mpr_out.shape)} vs RFL {list(rfl_out.shape)}')

    if cfg.uses_mpr:
        a = F.linear(mpr_out, params['fusion.mpr_proj.weight'], params['fusion.mpr_proj.bias'])
    if cfg.uses_rfl:
        b = F.linear(rfl_out, params['fusion.rfl_proj.weight'], params['fusion.rfl_proj.bias'])

    if cfg.mode == 'concat':
        combined = F.concat([a, b], axis=1)
    elif cfg.mode == 'weighted_avg':
        sigma = params['fusion.sigma']
        combined = a * sigma[0] + b * sigma[1]
    elif cfg.mode == 'mpr_only':
        combined = a
    else:
        combined = b
    return F.layer_norm(combined, params['fusion.norm.gain'], params['fusion.norm.shift']).relu()


def set_branch_weights(params, mpr_weight, rfl_weight):
    """Overwrite the weighted_avg mixing scalars."""
    params.set('fusion.sigma', np.array([mpr_weight, rfl_weight], dtype=float))
