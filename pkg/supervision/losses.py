"""
Training objectives.

    count       |c - c_hat| / c_hat + alpha * mean_j (y_j - y_hat_j)^2
    loc         mean_t -log p[t, gt_t]  +  1/(2N) sum_{t>=1} sum_c (p[t-1, c] - p[t, c])^2
    triplet     mean max(d(a, p) - d(a, n) + margin, 0)   with L2 distance d

``total_loss`` sums the enabled terms with unit weights.
"""
import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from tensorcore import Tensor, as_tensor
from utils.exceptions import ConfigurationError, SupervisionError

logger = logging.getLogger(__name__)

PROB_FLOOR = 1e-12


@dataclass(frozen=True)
class LossConfig:
    alpha: float = 1.0
    margin: float = 0.5
    max_triplets: int = 32
    use_loc: bool = True
    use_tri: bool = True
    use_den: bool = True

    def validate(self):
        if self.alpha < 0 or self.margin < 0:
            raise ConfigurationError(f'alpha and margin must be non-negative, got {self.alpha}, {self.margin}')
        if self.max_triplets < 0:
            raise ConfigurationError(f'max_triplets must be non-negative, got {self.max_triplets}')
        if not (self.use_loc or self.use_tri or self.use_den):
            raise ConfigurationError('at least one of the loc, tri and den losses must be enabled')
        return self

    @property
    def switches(self):
        return {'loc': self.use_loc, 'tri': self.use_tri, 'den': self.use_den}


class Triplet(NamedTuple):
    anchor: int
    positive: int
    negative: int


def loss_count(D, c, gt, c_hat, alpha, include_density=True):
    """Relative count error plus the alpha-weighted density MSE.

    ``c`` may be None, in which case the differentiable sum of ``D`` is used.
    With ``include_density`` False only the relative count term is returned.
    """
    if c_hat <= 0:
        raise SupervisionError(f'ground-truth count must be positive, got {c_hat}')
    predicted = D.values
    target = as_tensor(gt.values)
    if predicted.shape != target.shape:
        raise SupervisionError(f'density shapes differ: {list(predicted.shape)} vs {list(target.shape)}')
    c = D.total() if c is None else as_tensor(c)
    loss = (c - float(c_hat)).abs() * (1.0 / float(c_hat))
    if include_density:
        diff = predicted - target
        loss = loss + (diff * diff).mean() * float(alpha)
    return loss


def loss_loc(probs, mask):
    probs = as_tensor(probs)
    mask = np.asarray(mask, dtype=np.int64)
    n = probs.shape[0]
    if mask.shape != (n,):
        raise SupervisionError(f'mask length {mask.shape[0]} does not match {n} predicted frames')
    picked = probs.clip_min(PROB_FLOOR)[np.arange(n), mask]
    cross_entropy = -picked.log().mean()
    if n < 2:
        return cross_entropy
    step = probs[:-1] - probs[1:]
    smooth = (step * step).sum() * (1.0 / (2.0 * n))
    return cross_entropy + smooth


def sample_triplets(mask, rng, max_triplets=32):
    """Draw up to ``max_triplets`` distinct (anchor, positive, negative) frames.

    Anchor and positive are distinct foreground frames, the negative is a
    background frame. Draws are without replacement from all valid triplets.
    """
    mask = np.asarray(mask)
    foreground = np.flatnonzero(mask == 1)
    background = np.flatnonzero(mask == 0)
    n_fg, n_bg = len(foreground), len(background)
    if n_fg < 2 or n_bg < 1 or max_triplets <= 0:
        return []
    per_anchor = (n_fg - 1) * n_bg
    population = n_fg * per_anchor
    picks = rng.choice(population, size=min(int(max_triplets), population), replace=False)
    triplets = []
    for flat in picks:
        anchor_slot, rest = divmod(int(flat), per_anchor)
        positive_slot, negative_slot = divmod(rest, n_bg)
        if positive_slot >= anchor_slot:
            positive_slot += 1
        triplets.append(Triplet(int(foreground[anchor_slot]), int(foreground[positive_slot]),
                                int(background[negative_slot])))
    return triplets


def _row_distance(a, b):
    diff = a - b
    return (diff * diff).sum(axis=1).sqrt()


def loss_triplet(emb, triplets, margin):
    if not triplets:
        return Tensor(0.0)
    emb = as_tensor(emb)
    anchor, positive, negative = (np.array(column, dtype=np.int64) for column in zip(*triplets))
    a = emb[anchor]
    hinge = (_row_distance(a, emb[positive]) - _row_distance(a, emb[negative]) + float(margin)).relu()
    return hinge.mean()


def total_loss(outputs, targets, cfg, triplets=()):
    """Sum of the enabled terms; returns (loss tensor, {term: value})."""
    cfg.validate()
    terms = {}
    count_term = loss_count(
        outputs.density, None, targets.density, targets.count, cfg.alpha, include_density=cfg.use_den,
    )
    terms['count'] = count_term
    if cfg.use_loc:
        terms['loc'] = loss_loc(outputs.foreground.probs, targets.mask)
    if cfg.use_tri:
        terms['tri'] = loss_triplet(outputs.P, list(triplets), cfg.margin)
    total = None
    for value in terms.values():
        total = value if total is None else total + value
    return total, {name: value.item() for name, value in terms.items()}
