"""
Central finite-difference checks for analytic gradients.
"""
import numpy as np

from .tensor import no_grad


def numerical_gradient(fn, tensor, eps=1e-6, coords=None):
    """Estimate d fn() / d tensor by central differences.

    ``fn`` takes no arguments and reads ``tensor.data`` when called. When
    ``coords`` (flat indices) is given only those entries are probed; the rest
    of the returned array stays zero.
    """
    grad = np.zeros(tensor.shape)
    flat_indices = range(tensor.size) if coords is None else coords
    original = tensor.data
    with no_grad():
        for flat in flat_indices:
            index = np.unravel_index(flat, tensor.shape)
            plus = original.copy()
            plus[index] += eps
            tensor.data = plus
            f_plus = fn().item()
            minus = original.copy()
            minus[index] -= eps
            tensor.data = minus
            f_minus = fn().item()
            grad[index] = (f_plus - f_minus) / (2.0 * eps)
    tensor.data = original
    return grad


def relative_error(fn, tensors, eps=1e-6, max_coords=None, rng=None):
    """Largest relative error between analytic and numerical gradients.

    The error per tensor is ||analytic - numeric|| / (||analytic|| + ||numeric||)
    over the probed coordinates; the maximum across tensors is returned.
    """
    for tensor in tensors:
        tensor.grad = None
    fn().backward()
    analytic = [np.zeros(t.shape) if t.grad is None else t.grad.copy() for t in tensors]

    worst = 0.0
    for tensor, exact in zip(tensors, analytic):
        coords = None
        if max_coords is not None and tensor.size > max_coords:
            rng = rng or np.random.default_rng(0)
            coords = rng.choice(tensor.size, size=max_coords, replace=False)
        numeric = numerical_gradient(fn, tensor, eps=eps, coords=coords)
        if coords is not None:
            exact = exact.reshape(-1)[coords]
            numeric = numeric.reshape(-1)[coords]
        denominator = np.linalg.norm(exact) + np.linalg.norm(numeric)
        if denominator == 0.0:
            continue
        worst = max(worst, float(np.linalg.norm(exact - numeric) / denominator))
    return worst
