"""
Counting and localization scores.

Counting: MAE is the mean relative count error |c - c_hat| / c_hat and OBO
the fraction of videos with |c - c_hat| <= 1. Predicted counts are clamped at
zero before scoring and are never rounded.

Localization works on binary per-frame masks (1 = inside a repetition).
"""
import logging
from typing import NamedTuple

import numpy as np

from utils.exceptions import DataError

logger = logging.getLogger(__name__)

F1_THRESHOLDS = (10, 25, 50)


class Segment(NamedTuple):
    label: int
    start: int
    end: int

    @property
    def length(self):
        return self.end - self.start


def mae_obo(pairs):
    """pairs: iterable of (gt_count, pred_count); returns (mae, obo)."""
    pairs = list(pairs)
    if not pairs:
        raise DataError('cannot score an empty set of videos')
    errors, hits = [], []
    for gt, pred in pairs:
        if gt <= 0:
            raise DataError(f'ground-truth count must be positive, got {gt}')
        pred = max(float(pred), 0.0)
        error = abs(pred - gt)
        errors.append(error / gt)
        hits.append(1.0 if error <= 1.0 else 0.0)
    return float(np.mean(errors)), float(np.mean(hits))


def _as_masks(pred_mask, gt_mask):
    pred_mask = np.asarray(pred_mask, dtype=np.int64).ravel()
    gt_mask = np.asarray(gt_mask, dtype=np.int64).ravel()
    if pred_mask.shape != gt_mask.shape:
        raise DataError(f'mask lengths differ: predicted {pred_mask.shape[0]} vs ground truth {gt_mask.shape[0]}')
    return pred_mask, gt_mask


def frame_accuracy(pred_mask, gt_mask):
    pred_mask, gt_mask = _as_masks(pred_mask, gt_mask)
    if gt_mask.size == 0:
        return 100.0
    return 100.0 * float(np.mean(pred_mask == gt_mask))


def segments_from_mask(mask):
    """Maximal runs of equal labels as half-open Segments."""
    mask = np.asarray(mask, dtype=np.int64).ravel()
    if mask.size == 0:
        return []
    change = np.flatnonzero(np.diff(mask)) + 1
    starts = np.concatenate([[0], change])
    ends = np.concatenate([change, [mask.size]])
    return [Segment(int(mask[s]), int(s), int(e)) for s, e in zip(starts, ends)]


def _levenshtein(a, b):
    previous = list(range(len(b) + 1))
    for i, left in enumerate(a, 1):
        current = [i]
        for j, right in enumerate(b, 1):
            current.append(min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + (left != right)))
        previous = current
    return previous[-1]


def edit_score(pred_mask, gt_mask):
    pred_mask, gt_mask = _as_masks(pred_mask, gt_mask)
    pred_labels = [s.label for s in segments_from_mask(pred_mask)]
    gt_labels = [s.label for s in segments_from_mask(gt_mask)]
    longest = max(len(pred_labels), len(gt_labels))
    if longest == 0:
        return 100.0
    return 100.0 * (1.0 - _levenshtein(pred_labels, gt_labels) / longest)


def _iou(a, b):
    inter = max(0, min(a.end, b.end) - max(a.start, b.start))
    union = a.length + b.length - inter
    return inter / union if union > 0 else 0.0


def f1_at(pred_mask, gt_mask, tau_percent):
    """Segmental F1 over foreground runs at IoU threshold tau_percent / 100.

    Ground-truth segments are visited in order; each takes the unmatched
    predicted segment with the highest IoU when that IoU reaches the
    threshold.
    """
    if not 0 < tau_percent < 100:
        raise DataError(f'IoU threshold must lie in (0, 100), got {tau_percent}')
    pred_mask, gt_mask = _as_masks(pred_mask, gt_mask)
    predicted = [s for s in segments_from_mask(pred_mask) if s.label == 1]
    truth = [s for s in segments_from_mask(gt_mask) if s.label == 1]
    if not predicted and not truth:
        return 100.0
    threshold = tau_percent / 100.0
    used = [False] * len(predicted)
    true_positive = 0
    for segment in truth:
        best, best_iou = -1, 0.0
        for i, candidate in enumerate(predicted):
            if used[i]:
                continue
            iou = _iou(segment, candidate)
            if iou > best_iou:
                best, best_iou = i, iou
        if best >= 0 and best_iou >= threshold:
            used[best] = True
            true_positive += 1
    if true_positive == 0:
        return 0.0
    precision = true_positive / len(predicted)
    recall = true_positive / len(truth)
    return 100.0 * 2 * precision * recall / (precision + recall)
