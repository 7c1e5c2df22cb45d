import numpy as np
from django.test import SimpleTestCase

from metrics.scores import (
    Segment, edit_score, f1_at, frame_accuracy, mae_obo, segments_from_mask,
)
from utils.exceptions import DataError


def _runs_by_loop(mask):
    runs, start = [], 0
    for t in range(1, len(mask) + 1):
        if t == len(mask) or mask[t] != mask[start]:
            runs.append(Segment(int(mask[start]), start, t))
            start = t
    return runs


def _edit_distance_table(a, b):
    table = np.zeros((len(a) + 1, len(b) + 1), dtype=int)
    table[:, 0] = np.arange(len(a) + 1)
    table[0, :] = np.arange(len(b) + 1)
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            table[i, j] = min(table[i - 1, j] + 1, table[i, j - 1] + 1,
                              table[i - 1, j - 1] + (a[i - 1] != b[j - 1]))
    return int(table[-1, -1])


def _f1_by_frame_sets(pred, gt, tau):
    predicted = [set(range(s.start, s.end)) for s in _runs_by_loop(pred) if s.label == 1]
    truth = [set(range(s.start, s.end)) for s in _runs_by_loop(gt) if s.label == 1]
    if not predicted and not truth:
        return 100.0
    used, hits = set(), 0
    for frames in truth:
        best, best_iou = None, 0.0
        for i, candidate in enumerate(predicted):
            if i in used:
                continue
            iou = len(frames & candidate) / len(frames | candidate)
            if iou > best_iou:
                best, best_iou = i, iou
        if best is not None and best_iou >= tau / 100:
            used.add(best)
            hits += 1
    if hits == 0:
        return 0.0
    precision, recall = hits / len(predicted), hits / len(truth)
    return 100 * 2 * precision * recall / (precision + recall)


class MaeOboTests(SimpleTestCase):
    def test_exact_counts(self):
        self.assertEqual(mae_obo([(4, 4.0), (2, 2.0)]), (0.0, 1.0))

    def test_relative_error_and_tolerance(self):
        mae, obo = mae_obo([(4, 5.0), (2, 4.0)])
        self.assertAlmostEqual(mae, (0.25 + 1.0) / 2)
        self.assertEqual(obo, 0.5)

    def test_counts_are_not_rounded(self):
        mae, obo = mae_obo([(3, 4.2)])
        self.assertAlmostEqual(mae, 1.2 / 3)
        self.assertEqual(obo, 0.0)

    def test_negative_prediction_clamped(self):
        mae, _ = mae_obo([(2, -3.0)])
        self.assertAlmostEqual(mae, 1.0)

    def test_invalid_inputs(self):
        with self.assertRaises(DataError):
            mae_obo([])
        with self.assertRaises(DataError):
            mae_obo([(0, 1.0)])

    def test_matches_loop_on_random_pairs(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            size = int(rng.integers(1, 12))
            gts = rng.integers(1, 15, size=size)
            preds = gts + rng.normal(scale=2.0, size=size)
            total_error, total_hits = 0.0, 0
            for gt, pred in zip(gts, preds):
                pred = pred if pred > 0 else 0.0
                total_error += abs(pred - gt) / gt
                total_hits += abs(pred - gt) <= 1
            mae, obo = mae_obo(zip(gts.tolist(), preds.tolist()))
            self.assertAlmostEqual(mae, total_error / size)
            self.assertAlmostEqual(obo, total_hits / size)


class FrameAccuracyTests(SimpleTestCase):
    def test_fraction_of_agreeing_frames(self):
        self.assertEqual(frame_accuracy([1, 1, 0, 0], [1, 0, 0, 0]), 75.0)

    def test_length_mismatch(self):
        with self.assertRaises(DataError):
            frame_accuracy([1, 0], [1, 0, 0])

    def test_empty_masks(self):
        self.assertEqual(frame_accuracy([], []), 100.0)

    def test_matches_loop_on_random_pairs(self):
        rng = np.random.default_rng(4)
        for _ in range(200):
            n = int(rng.integers(1, 40))
            pred, gt = rng.integers(0, 2, size=n), rng.integers(0, 2, size=n)
            agree = 0
            for t in range(n):
                agree += int(pred[t] == gt[t])
            self.assertAlmostEqual(frame_accuracy(pred, gt), 100 * agree / n)


class SegmentTests(SimpleTestCase):
    def test_runs(self):
        self.assertEqual(
            segments_from_mask([0, 0, 1, 1, 1, 0]),
            [Segment(0, 0, 2), Segment(1, 2, 5), Segment(0, 5, 6)],
        )

    def test_matches_loop_on_random_masks(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            mask = rng.integers(0, 2, size=int(rng.integers(1, 40)))
            self.assertEqual(segments_from_mask(mask), _runs_by_loop(mask))


class EditScoreTests(SimpleTestCase):
    def test_identical_masks(self):
        self.assertEqual(edit_score([0, 1, 1, 0], [0, 1, 1, 0]), 100.0)

    def test_empty_masks(self):
        self.assertEqual(edit_score([], []), 100.0)

    def test_boundary_shift_is_free(self):
        self.assertEqual(edit_score([0, 0, 1, 1, 0], [0, 1, 1, 0, 0]), 100.0)

    def test_missing_segment(self):
        # 0 1 0 1 0 against 0 1 0: two insertions over five runs
        self.assertAlmostEqual(edit_score([0, 1, 0, 1, 0], [0, 1, 1, 0, 0]), 100.0 * (1 - 2 / 5))

    def test_matches_table_oracle(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            n = int(rng.integers(1, 30))
            pred, gt = rng.integers(0, 2, size=n), rng.integers(0, 2, size=n)
            a = [s.label for s in _runs_by_loop(pred)]
            b = [s.label for s in _runs_by_loop(gt)]
            expected = 100.0 * (1 - _edit_distance_table(a, b) / max(len(a), len(b)))
            self.assertAlmostEqual(edit_score(pred, gt), expected)


class F1Tests(SimpleTestCase):
    def test_perfect_match(self):
        mask = [0, 1, 1, 0, 1, 1, 1, 0]
        for tau in (10, 25, 50):
            self.assertEqual(f1_at(mask, mask, tau), 100.0)

    def test_iou_threshold(self):
        gt = np.ones(10, dtype=int)
        pred = np.zeros(10, dtype=int)
        pred[:3] = 1
        self.assertEqual(f1_at(pred, gt, 10), 100.0)
        self.assertEqual(f1_at(pred, gt, 25), 100.0)
        self.assertEqual(f1_at(pred, gt, 50), 0.0)

    def test_both_empty(self):
        self.assertEqual(f1_at([0, 0, 0], [0, 0, 0], 50), 100.0)

    def test_prediction_without_truth(self):
        self.assertEqual(f1_at([0, 1, 0], [0, 0, 0], 50), 0.0)

    def test_split_prediction_matches_once(self):
        # one gt segment, two predicted halves: precision 1/2, recall 1
        gt = [1, 1, 1, 1, 1, 1, 1, 1]
        pred = [1, 1, 1, 1, 0, 1, 1, 1]
        self.assertAlmostEqual(f1_at(pred, gt, 10), 100.0 * 2 * 0.5 / 1.5)

    def test_threshold_out_of_range(self):
        with self.assertRaises(DataError):
            f1_at([1], [1], 0)
        with self.assertRaises(DataError):
            f1_at([1], [1], 100)

    def test_scores_are_bounded(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            n = int(rng.integers(2, 40))
            pred, gt = rng.integers(0, 2, size=n), rng.integers(0, 2, size=n)
            for tau in (10, 25, 50):
                self.assertTrue(0.0 <= f1_at(pred, gt, tau) <= 100.0)
            self.assertEqual(f1_at(gt, gt, 50), 100.0)

    def test_matches_frame_set_matching_on_random_pairs(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            n = int(rng.integers(1, 40))
            pred, gt = rng.integers(0, 2, size=n), rng.integers(0, 2, size=n)
            for tau in (10, 25, 50):
                self.assertAlmostEqual(f1_at(pred, gt, tau), _f1_by_frame_sets(pred, gt, tau), msg=f'tau {tau}')
