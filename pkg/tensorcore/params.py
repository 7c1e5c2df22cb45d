import logging
import zlib
from dataclasses import dataclass

import numpy as np

from utils.exceptions import ConfigurationError, DataError

from .tensor import DEFAULT_DTYPE, Tensor

logger = logging.getLogger(__name__)


class ParamStore:
    """
    Named registry of learnable tensors.

    Each parameter is initialised from its own generator seeded with
    (store seed, crc32(name)), so the same seed and configuration always give
    bit-identical parameters regardless of registration order.
    """

    def __init__(self, seed=0):
        self.seed = int(seed)
        self._params = {}

    def _register(self, name, data):
        if name in self._params:
            raise ConfigurationError(f"parameter '{name}' is already registered")
        tensor = Tensor(data, requires_grad=True)
        self._params[name] = tensor
        return tensor

    def generator_for(self, name):
        return np.random.default_rng([self.seed, zlib.crc32(name.encode('utf-8'))])

    def uniform(self, name, shape, fan_in):
        """Register a parameter drawn from U(-1/sqrt(fan_in), 1/sqrt(fan_in))."""
        bound = 1.0 / np.sqrt(max(int(fan_in), 1))
        data = self.generator_for(name).uniform(-bound, bound, size=tuple(shape))
        return self._register(name, data)

    def constant(self, name, shape, value):
        return self._register(name, np.full(tuple(shape), value, dtype=DEFAULT_DTYPE))

    def __getitem__(self, name):
        try:
            return self._params[name]
        except KeyError:
            raise ConfigurationError(f"unknown parameter '{name}'") from None

    def __contains__(self, name):
        return name in self._params

    def __iter__(self):
        return iter(self._params)

    def __len__(self):
        return len(self._params)

    def items(self):
        return self._params.items()

    def names(self, prefix=''):
        return [name for name in self._params if name.startswith(prefix)]

    @property
    def num_elements(self):
        return int(sum(p.size for p in self._params.values()))

    def zero_grad(self):
        for tensor in self._params.values():
            tensor.grad = None

    def set(self, name, value):
        """Overwrite a parameter's values in place of the old array (shape must match)."""
        tensor = self[name]
        value = np.asarray(value, dtype=DEFAULT_DTYPE)
        if value.shape != tensor.shape:
            raise ConfigurationError(f"parameter '{name}' has shape {list(tensor.shape)}, got {list(value.shape)}")
        tensor.data = value.copy()

    def state_dict(self):
        return {name: tensor.data.copy() for name, tensor in self._params.items()}

    def load_state_dict(self, state):
        missing = set(self._params) - set(state)
        unexpected = set(state) - set(self._params)
        if missing or unexpected:
            raise DataError(
                f'parameter mismatch: missing {sorted(missing)[:5]} unexpected {sorted(unexpected)[:5]}'
            )
        for name, value in state.items():
            if tuple(np.shape(value)) != self._params[name].shape:
                raise DataError(
                    f"parameter '{name}' has shape {list(self._params[name].shape)}, "
                    f'checkpoint holds {list(np.shape(value))}'
                )
            self._params[name].data = np.array(value, dtype=DEFAULT_DTYPE)
        logger.debug(f'Loaded {len(state)} parameters')


@dataclass
class AttentionWeights:
    """Projection tensors of one multi-head attention layer."""
    query: Tensor
    query_bias: Tensor
    key: Tensor
    key_bias: Tensor
    value: Tensor
    value_bias: Tensor
    output: Tensor
    output_bias: Tensor

    FIELDS = ('query', 'key', 'value', 'output')

    @classmethod
    def register(cls, store, prefix, dim):
        for field in cls.FIELDS:
            store.uniform(f'{prefix}.{field}', (dim, dim), fan_in=dim)
            store.uniform(f'{prefix}.{field}_bias', (dim,), fan_in=dim)
        return cls.from_store(store, prefix)

    @classmethod
    def from_store(cls, store, prefix):
        values = {}
        for field in cls.FIELDS:
            values[field] = store[f'{prefix}.{field}']
            values[f'{field}_bias'] = store[f'{prefix}.{field}_bias']
        return cls(**values)
