"""
Layer-level operations built on Tensor.

conv1d, conv2d, max_pool2d and softmax carry hand-written backward passes;
linear, layer_norm and self_attention are compositions of primitives, so
their gradients come from the graph.
"""
import math

import numpy as np

from utils.exceptions import ConfigurationError, DimensionError

from .tensor import Tensor, as_tensor


def _require_ndim(x, ndim, name):
    if x.ndim != ndim:
        raise DimensionError(f'{name} expects a {ndim}-D input, got shape {list(x.shape)}')


def linear(x, weight, bias=None):
    """out[i, j] = sum_a x[i, a] * weight[a, j] + bias[j]"""
    x, weight = as_tensor(x), as_tensor(weight)
    if x.ndim != 2 or weight.ndim != 2 or x.shape[1] != weight.shape[0]:
        raise DimensionError(f'linear shape mismatch: x {list(x.shape)} vs weight {list(weight.shape)}')
    out = x @ weight
    if bias is not None:
        bias = as_tensor(bias)
        if bias.shape != (weight.shape[1],):
            raise DimensionError(f'linear bias shape {list(bias.shape)} does not match weight {list(weight.shape)}')
        out = out + bias
    return out


def concat(tensors, axis=0):
    tensors = [as_tensor(t) for t in tensors]
    sizes = [t.shape[axis] for t in tensors]
    offsets = np.cumsum([0] + sizes)

    def backward(g):
        return tuple(np.take(g, np.arange(offsets[i], offsets[i + 1]), axis=axis) for i in range(len(tensors)))

    data = np.concatenate([t.data for t in tensors], axis=axis)
    return Tensor._from_op(data, tuple(tensors), backward, 'concat')


def softmax(x, axis=-1):
    x = as_tensor(x)
    shifted = x.data - x.data.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    out = e / e.sum(axis=axis, keepdims=True)

    def backward(g):
        return (out * (g - (g * out).sum(axis=axis, keepdims=True)),)

    return Tensor._from_op(out, (x,), backward, 'softmax')


def _check_kernel(kernel_size, dilation):
    if kernel_size % 2 == 0:
        raise ConfigurationError(f'kernel size must be odd for same-length padding, got {kernel_size}')
    if dilation < 1:
        raise ConfigurationError(f'dilation must be >= 1, got {dilation}')


def conv1d(x, kernel, bias=None, dilation=1):
    """Same-length dilated 1-D convolution.

    x is N x C_in, kernel is k x C_in x C_out. The input is zero padded by
    (k - 1) * dilation / 2 frames on each side and taps are ``dilation``
    frames apart, so out[t] = sum_j x[t + (j - (k-1)/2) * dilation] @ kernel[j].
    """
    x, kernel = as_tensor(x), as_tensor(kernel)
    _require_ndim(x, 2, 'conv1d')
    if kernel.ndim != 3 or kernel.shape[1] != x.shape[1]:
        raise DimensionError(f'conv1d kernel {list(kernel.shape)} does not match input {list(x.shape)}')
    k = kernel.shape[0]
    _check_kernel(k, dilation)

    n = x.shape[0]
    pad = (k - 1) * dilation // 2
    xp = np.pad(x.data, ((pad, pad), (0, 0)))
    w = kernel.data
    out = np.zeros((n, w.shape[2]), dtype=xp.dtype)
    for j in range(k):
        out += xp[j * dilation:j * dilation + n] @ w[j]
    parents = [x, kernel]
    if bias is not None:
        bias = as_tensor(bias)
        out = out + bias.data
        parents.append(bias)

    def backward(g):
        dxp = np.zeros_like(xp)
        dw = np.zeros_like(w)
        for j in range(k):
            dxp[j * dilation:j * dilation + n] += g @ w[j].T
            dw[j] = xp[j * dilation:j * dilation + n].T @ g
        grads = [dxp[pad:pad + n], dw]
        if bias is not None:
            grads.append(g.sum(axis=0))
        return tuple(grads)

    return Tensor._from_op(out, tuple(parents), backward, 'conv1d')


def conv2d(x, kernel, bias=None, dilation=1):
    """Same-size dilated 2-D convolution.

    x is C_in x H x W, kernel is kh x kw x C_in x C_out, output is C_out x H x W.
    """
    x, kernel = as_tensor(x), as_tensor(kernel)
    _require_ndim(x, 3, 'conv2d')
    if kernel.ndim != 4 or kernel.shape[2] != x.shape[0]:
        raise DimensionError(f'conv2d kernel {list(kernel.shape)} does not match input {list(x.shape)}')
    kh, kw = kernel.shape[:2]
    _check_kernel(kh, dilation)
    _check_kernel(kw, dilation)

    _, h, wd = x.shape
    ph, pw = (kh - 1) * dilation // 2, (kw - 1) * dilation // 2
    xp = np.pad(x.data, ((0, 0), (ph, ph), (pw, pw)))
    w = kernel.data
    out = np.zeros((w.shape[3], h, wd), dtype=xp.dtype)
    for i in range(kh):
        for j in range(kw):
            patch = xp[:, i * dilation:i * dilation + h, j * dilation:j * dilation + wd]
            out += np.einsum('chw,co->ohw', patch, w[i, j])
    parents = [x, kernel]
    if bias is not None:
        bias = as_tensor(bias)
        out = out + bias.data[:, None, None]
        parents.append(bias)

    def backward(g):
        dxp = np.zeros_like(xp)
        dw = np.zeros_like(w)
        for i in range(kh):
            for j in range(kw):
                rows = slice(i * dilation, i * dilation + h)
                cols = slice(j * dilation, j * dilation + wd)
                dxp[:, rows, cols] += np.einsum('ohw,co->chw', g, w[i, j])
                dw[i, j] = np.einsum('chw,ohw->co', xp[:, rows, cols], g)
        grads = [dxp[:, ph:ph + h, pw:pw + wd], dw]
        if bias is not None:
            grads.append(g.sum(axis=(1, 2)))
        return tuple(grads)

    return Tensor._from_op(out, tuple(parents), backward, 'conv2d')


def max_pool2d(x, window, stride=None):
    """Non-overlapping max pooling of a 2-D map with ceil semantics.

    The last partial window along each axis is pooled over its real extent.
    Ties resolve to the first cell of the window in row-major order, and the
    backward pass routes each window's gradient to that cell only.
    """
    x = as_tensor(x)
    _require_ndim(x, 2, 'max_pool2d')
    stride = window if stride is None else stride
    if window < 1 or stride != window:
        raise ConfigurationError(f'max_pool2d needs stride == window >= 1, got window={window} stride={stride}')
    h, w = x.shape
    if window > min(h, w):
        raise ConfigurationError(f'pooling window {window} exceeds input size {list(x.shape)}')

    mh, mw = math.ceil(h / window), math.ceil(w / window)
    padded = np.full((mh * window, mw * window), -np.inf, dtype=x.data.dtype)
    padded[:h, :w] = x.data
    blocks = padded.reshape(mh, window, mw, window).transpose(0, 2, 1, 3).reshape(mh, mw, window * window)
    arg = blocks.argmax(axis=-1)
    out = np.take_along_axis(blocks, arg[..., None], axis=-1)[..., 0]
    rows = np.arange(mh)[:, None] * window + arg // window
    cols = np.arange(mw)[None, :] * window + arg % window

    def backward(g):
        full = np.zeros((h, w), dtype=g.dtype)
        full[rows, cols] = g
        return (full,)

    return Tensor._from_op(out, (x,), backward, 'max_pool2d')


def layer_norm(x, gain, shift, eps=1e-5):
    """Per-row normalisation to zero mean and unit variance, then affine."""
    if eps <= 0:
        raise ConfigurationError(f'layer_norm eps must be positive, got {eps}')
    x = as_tensor(x)
    _require_ndim(x, 2, 'layer_norm')
    if as_tensor(gain).shape != (x.shape[1],) or as_tensor(shift).shape != (x.shape[1],):
        raise DimensionError(f'layer_norm affine parameters must have shape [{x.shape[1]}]')
    centered = x - x.mean(axis=-1, keepdims=True)
    variance = (centered * centered).mean(axis=-1, keepdims=True)
    normalized = centered / (variance + eps).sqrt()
    return normalized * gain + shift


def self_attention(x, heads, weights, return_weights=False):
    """Multi-head scaled dot-product self-attention over the rows of ``x``.

    ``weights`` is an AttentionWeights bundle (query/key/value/output
    projections). With ``return_weights`` the per-head attention matrices are
    returned alongside the output.
    """
    x = as_tensor(x)
    _require_ndim(x, 2, 'self_attention')
    tokens, channels = x.shape
    if heads < 1 or channels % heads:
        raise ConfigurationError(f'{channels} channels cannot be split across {heads} attention heads')

    q = linear(x, weights.query, weights.query_bias)
    k = linear(x, weights.key, weights.key_bias)
    v = linear(x, weights.value, weights.value_bias)
    head_dim = channels // heads
    scale = 1.0 / math.sqrt(head_dim)

    outputs, attention = [], []
    for h in range(heads):
        cols = slice(h * head_dim, (h + 1) * head_dim)
        scores = (q[:, cols] @ k[:, cols].T) * scale
        probs = softmax(scores, axis=-1)
        outputs.append(probs @ v[:, cols])
        attention.append(probs)
    merged = outputs[0] if heads == 1 else concat(outputs, axis=1)
    out = linear(merged, weights.output, weights.output_bias)
    if return_weights:
        return out, attention
    return out


def interpolation_matrix(source_len, target_len):
    """Linear interpolation weights mapping ``source_len`` samples to ``target_len``.

    Sample centres are aligned (half-pixel convention) and clamped at the
    borders, so every row sums to 1 and constants are preserved.
    """
    positions = (np.arange(target_len) + 0.5) * (source_len / target_len) - 0.5
    positions = np.clip(positions, 0, source_len - 1)
    basis = np.eye(source_len)
    return np.stack([np.interp(positions, np.arange(source_len), basis[m]) for m in range(source_len)], axis=1)


def interpolate_linear(x, target_len):
    """Resample the rows of an M x C tensor to ``target_len`` rows."""
    x = as_tensor(x)
    _require_ndim(x, 2, 'interpolate_linear')
    return Tensor(interpolation_matrix(x.shape[0], target_len)) @ x
