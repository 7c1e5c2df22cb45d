from .tensor import Tensor, no_grad, is_grad_enabled, as_tensor, DEFAULT_DTYPE
from .params import ParamStore, AttentionWeights
from .optim import Adam
from . import functional

__all__ = [
    'Tensor', 'no_grad', 'is_grad_enabled', 'as_tensor', 'DEFAULT_DTYPE',
    'ParamStore', 'AttentionWeights', 'Adam', 'functional',
]
