"""
Dense tensors with reverse-mode gradients.

Every operation that touches a tensor with ``requires_grad`` records its
parents and a backward closure on the result. ``Tensor.backward`` walks the
recorded graph in reverse topological order, accumulates gradients into every
``requires_grad`` tensor it reaches and then frees the graph.
"""
import threading
from contextlib import contextmanager

import numpy as np

from utils.exceptions import DimensionError, UsageError

DEFAULT_DTYPE = np.float64

_state = threading.local()


def is_grad_enabled():
    return getattr(_state, 'grad_enabled', True)


@contextmanager
def no_grad():
    """Disable graph recording on the current thread."""
    previous = is_grad_enabled()
    _state.grad_enabled = False
    try:
        yield
    finally:
        _state.grad_enabled = previous


def _unbroadcast(grad, shape):
    """Sum ``grad`` down to ``shape`` after numpy broadcasting."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def as_tensor(value):
    if isinstance(value, Tensor):
        return value
    return Tensor(value)


class Tensor:
    """A node in the computation graph holding a numpy array."""

    def __init__(self, data, requires_grad=False, dtype=DEFAULT_DTYPE):
        self.data = np.array(data, dtype=dtype)
        self.requires_grad = bool(requires_grad)
        self.grad = None
        self._parents = ()
        self._backward = None
        self._op = ''

    # ------------------------------------------------------------------
    # Graph plumbing
    # ------------------------------------------------------------------
    @classmethod
    def _from_op(cls, data, parents, backward, op):
        out = cls(data)
        if is_grad_enabled() and any(p.requires_grad for p in parents):
            out.requires_grad = True
            out._parents = tuple(parents)
            out._backward = backward
            out._op = op
        return out

    @property
    def is_leaf(self):
        return self._backward is None

    def _topological_order(self):
        order, visited = [], set()
        stack = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for parent in node._parents:
                if parent.requires_grad and id(parent) not in visited:
                    stack.append((parent, False))
        return order

    def backward(self):
        """Accumulate d(self)/d(t) into ``t.grad`` for every reachable tensor."""
        if self.data.size != 1:
            raise UsageError(f'backward() needs a scalar loss, got shape {list(self.shape)}')
        if not self.requires_grad:
            raise UsageError('backward() called on a tensor that does not require gradients')

        pending = {id(self): np.ones_like(self.data)}
        for node in reversed(self._topological_order()):
            grad = pending.pop(id(node), None)
            if grad is None:
                continue
            node.grad = np.array(grad) if node.grad is None else node.grad + grad
            if node.is_leaf:
                continue
            parent_grads = node._backward(grad)
            for parent, parent_grad in zip(node._parents, parent_grads):
                if parent_grad is None or not parent.requires_grad:
                    continue
                key = id(parent)
                pending[key] = parent_grad if key not in pending else pending[key] + parent_grad
            # free the graph as we go
            node._parents = ()
            node._backward = None

    def zero_grad(self):
        self.grad = None

    def detach(self):
        return Tensor(self.data)

    # ------------------------------------------------------------------
    # Introspection
    # ------------------------------------------------------------------
    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    def numpy(self):
        return self.data.copy()

    def item(self):
        return float(self.data.reshape(-1)[0])

    def __len__(self):
        return self.data.shape[0]

    def __repr__(self):
        flag = ', requires_grad=True' if self.requires_grad else ''
        return f'Tensor(shape={list(self.shape)}{flag})'

    # ------------------------------------------------------------------
    # Arithmetic
    # ------------------------------------------------------------------
    def __add__(self, other):
        other = as_tensor(other)
        a_shape, b_shape = self.shape, other.shape

        def backward(g):
            return _unbroadcast(g, a_shape), _unbroadcast(g, b_shape)

        return Tensor._from_op(self.data + other.data, (self, other), backward, 'add')

    __radd__ = __add__

    def __neg__(self):
        return Tensor._from_op(-self.data, (self,), lambda g: (-g,), 'neg')

    def __sub__(self, other):
        other = as_tensor(other)
        a_shape, b_shape = self.shape, other.shape

        def backward(g):
            return _unbroadcast(g, a_shape), _unbroadcast(-g, b_shape)

        return Tensor._from_op(self.data - other.data, (self, other), backward, 'sub')

    def __rsub__(self, other):
        return as_tensor(other) - self

    def __mul__(self, other):
        other = as_tensor(other)
        a, b = self.data, other.data

        def backward(g):
            return _unbroadcast(g * b, a.shape), _unbroadcast(g * a, b.shape)

        return Tensor._from_op(a * b, (self, other), backward, 'mul')

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = as_tensor(other)
        a, b = self.data, other.data

        def backward(g):
            return _unbroadcast(g / b, a.shape), _unbroadcast(-g * a / (b * b), b.shape)

        return Tensor._from_op(a / b, (self, other), backward, 'div')

    def __rtruediv__(self, other):
        return as_tensor(other) / self

    def __pow__(self, exponent):
        if isinstance(exponent, Tensor):
            raise UsageError('only constant exponents are supported')
        a = self.data
        exponent = float(exponent)
        return Tensor._from_op(a ** exponent, (self,), lambda g: (g * exponent * a ** (exponent - 1.0),), 'pow')

    def __matmul__(self, other):
        other = as_tensor(other)
        a, b = self.data, other.data
        if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
            raise DimensionError(f'matmul shape mismatch: {list(a.shape)} @ {list(b.shape)}')

        def backward(g):
            return g @ b.T, a.T @ g

        return Tensor._from_op(a @ b, (self, other), backward, 'matmul')

    # ------------------------------------------------------------------
    # Structure
    # ------------------------------------------------------------------
    @property
    def T(self):
        return self.transpose()

    def transpose(self):
        if self.ndim != 2:
            raise DimensionError(f'transpose expects a matrix, got shape {list(self.shape)}')
        return Tensor._from_op(self.data.T, (self,), lambda g: (g.T,), 'transpose')

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        original = self.shape
        return Tensor._from_op(self.data.reshape(shape), (self,), lambda g: (g.reshape(original),), 'reshape')

    def __getitem__(self, index):
        if isinstance(index, Tensor):
            index = index.data.astype(np.int64)
        original = self.shape

        def backward(g):
            full = np.zeros(original, dtype=g.dtype)
            np.add.at(full, index, g)
            return (full,)

        return Tensor._from_op(self.data[index], (self,), backward, 'getitem')

    # ------------------------------------------------------------------
    # Reductions
    # ------------------------------------------------------------------
    def sum(self, axis=None, keepdims=False):
        original = self.shape

        def backward(g):
            if axis is not None and not keepdims:
                g = np.expand_dims(g, axis)
            return (np.array(np.broadcast_to(g, original)),)

        return Tensor._from_op(self.data.sum(axis=axis, keepdims=keepdims), (self,), backward, 'sum')

    def mean(self, axis=None, keepdims=False):
        if axis is None:
            count = self.data.size
        else:
            axes = axis if isinstance(axis, tuple) else (axis,)
            count = int(np.prod([self.shape[a] for a in axes]))
        return self.sum(axis=axis, keepdims=keepdims) * (1.0 / count)

    # ------------------------------------------------------------------
    # Elementwise functions
    # ------------------------------------------------------------------
    def relu(self):
        a = self.data
        return Tensor._from_op(np.maximum(a, 0.0), (self,), lambda g: (g * (a > 0),), 'relu')

    def exp(self):
        out = np.exp(self.data)
        return Tensor._from_op(out, (self,), lambda g: (g * out,), 'exp')

    def log(self):
        a = self.data
        return Tensor._from_op(np.log(a), (self,), lambda g: (g / a,), 'log')

    def sqrt(self):
        out = np.sqrt(self.data)

        def backward(g):
            # zero subgradient at the origin
            safe = np.where(out > 0, out, 1.0)
            return (np.where(out > 0, g / (2.0 * safe), 0.0),)

        return Tensor._from_op(out, (self,), backward, 'sqrt')

    def abs(self):
        a = self.data
        return Tensor._from_op(np.abs(a), (self,), lambda g: (g * np.sign(a),), 'abs')

    def clip_min(self, minimum):
        a = self.data
        return Tensor._from_op(np.maximum(a, minimum), (self,), lambda g: (g * (a > minimum),), 'clip_min')
