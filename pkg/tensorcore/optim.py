import logging

import numpy as np

from utils.exceptions import TrainingError

logger = logging.getLogger(__name__)


class Adam:
    """
    Adam with bias-corrected first and second moments.

    ``step()`` applies one update to every parameter of the store that holds a
    gradient and then clears all gradient buffers. Parameters are rebound to
    new arrays rather than mutated, so tensors captured by an old graph keep
    their values.
    """

    def __init__(self, params, lr=1e-3, betas=(0.9, 0.999), eps=1e-8):
        self.params = params
        self.lr = float(lr)
        self.beta1, self.beta2 = (float(b) for b in betas)
        self.eps = float(eps)
        self.t = 0
        self.m = {}
        self.v = {}

    def step(self):
        for name, tensor in self.params.items():
            if tensor.grad is not None and not np.all(np.isfinite(tensor.grad)):
                raise TrainingError(f"non-finite gradient in parameter '{name}' at optimizer step {self.t + 1}")

        self.t += 1
        correction1 = 1.0 - self.beta1 ** self.t
        correction2 = 1.0 - self.beta2 ** self.t
        for name, tensor in self.params.items():
            if tensor.grad is None:
                continue
            grad = tensor.grad
            m = self.m.get(name, np.zeros_like(grad))
            v = self.v.get(name, np.zeros_like(grad))
            m = self.beta1 * m + (1.0 - self.beta1) * grad
            v = self.beta2 * v + (1.0 - self.beta2) * grad * grad
            self.m[name], self.v[name] = m, v
            m_hat = m / correction1
            v_hat = v / correction2
            tensor.data = tensor.data - self.lr * m_hat / (np.sqrt(v_hat) + self.eps)
        self.params.zero_grad()
