import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from rfl.branch import (
    RflConfig, check_receptive_field, dump_foreground, foreground_logits, init_rfl_params, tcn_forward,
)
from tensorcore import ParamStore, Tensor
from tensorcore import functional as F
from tensorcore.gradcheck import relative_error
from utils.exceptions import ConfigurationError


class TcnForwardTests(SimpleTestCase):
    def setUp(self):
        self.cfg = RflConfig(n_blocks=3, channels=16)
        self.store = init_rfl_params(ParamStore(0), self.cfg, embed_dim=4)

    def test_length_preserved(self):
        for n in (1, 5, 16, 33, 64):
            out = tcn_forward(Tensor(np.random.default_rng(n).normal(size=(n, 4))), self.cfg, self.store)
            self.assertEqual(out.shape, (n, 16))

    def test_zero_blocks_reduce_to_entry_projection(self):
        for name in self.store.names('rfl.block'):
            self.store.set(name, np.zeros(self.store[name].shape))
        X = Tensor(np.random.default_rng(1).normal(size=(12, 4)))
        entry = F.conv1d(X, self.store['rfl.entry.weight'], self.store['rfl.entry.bias'])
        np.testing.assert_array_equal(tcn_forward(X, self.cfg, self.store).data, entry.data)

    def test_impulse_response_half_width(self):
        self.assertEqual(self.cfg.receptive_field, 15)
        baseline = tcn_forward(Tensor(np.zeros((32, 4))), self.cfg, self.store).data
        impulse = np.zeros((32, 4))
        impulse[16] = 5.0
        response = tcn_forward(Tensor(impulse), self.cfg, self.store).data
        support = np.flatnonzero(np.abs(response - baseline).max(axis=1) > 1e-12)
        self.assertEqual(support.min(), 16 - 7)
        self.assertEqual(support.max(), 16 + 7)

    def test_matches_manual_composition(self):
        X = Tensor(np.random.default_rng(2).normal(size=(10, 4)))
        p = self.store
        hidden = F.conv1d(X, p['rfl.entry.weight'], p['rfl.entry.bias'])
        for i, dilation in enumerate((1, 2, 4)):
            inner = F.conv1d(hidden, p[f'rfl.block{i}.dilated.weight'], p[f'rfl.block{i}.dilated.bias'],
                             dilation=dilation).relu()
            hidden = hidden + F.conv1d(inner, p[f'rfl.block{i}.pointwise.weight'], p[f'rfl.block{i}.pointwise.bias'])
        np.testing.assert_allclose(tcn_forward(X, self.cfg, p).data, hidden.data, atol=1e-12)

    def test_branch_gradient_check(self):
        cfg = RflConfig(n_blocks=2, channels=4)
        for seed in range(20):
            store = init_rfl_params(ParamStore(seed), cfg, embed_dim=4)
            rng = np.random.default_rng(200 + seed)
            X = Tensor(rng.normal(size=(8, 4)), requires_grad=True)
            r = Tensor(rng.normal(size=(8, 2)))

            def loss():
                return (foreground_logits(tcn_forward(X, cfg, store), store).probs * r).sum()

            tensors = [X, store['rfl.entry.weight'], store['rfl.block1.dilated.weight'], store['rfl.head.weight']]
            self.assertLess(relative_error(loss, tensors), 1e-6)

    def test_even_kernel_rejected(self):
        with self.assertRaises(ConfigurationError):
            RflConfig(kernel_size=4).validate()

    def test_receptive_field_warning(self):
        cfg = RflConfig()
        self.assertEqual(cfg.receptive_field, 127)
        with self.assertLogs('rfl.branch', level='WARNING'):
            self.assertTrue(check_receptive_field(cfg, 16))
        self.assertFalse(check_receptive_field(cfg, 64))


class ForegroundLogitsTests(SimpleTestCase):
    def setUp(self):
        self.store = init_rfl_params(ParamStore(0), RflConfig(n_blocks=1, channels=3), embed_dim=2)

    def test_zero_head_ties_to_background(self):
        self.store.set('rfl.head.weight', np.zeros((3, 2)))
        self.store.set('rfl.head.bias', np.zeros(2))
        prediction = foreground_logits(Tensor(np.random.default_rng(3).normal(size=(6, 3))), self.store)
        np.testing.assert_array_equal(prediction.probs.data, np.full((6, 2), 0.5))
        np.testing.assert_array_equal(prediction.hard_mask, np.zeros(6))

    def test_large_margin_softmax(self):
        self.store.set('rfl.head.weight', np.zeros((3, 2)))
        self.store.set('rfl.head.bias', np.array([10.0, -10.0]))
        prediction = foreground_logits(Tensor(np.ones((1, 3))), self.store)
        self.assertAlmostEqual(prediction.foreground_prob[0], 1.0 / (1.0 + np.exp(20.0)), places=15)

    def test_hard_mask_agrees_with_threshold(self):
        prediction = foreground_logits(Tensor(np.random.default_rng(4).normal(size=(40, 3)) * 3), self.store)
        np.testing.assert_allclose(prediction.probs.data.sum(axis=1), 1.0, atol=1e-6)
        decided = prediction.foreground_prob != 0.5
        np.testing.assert_array_equal(prediction.hard_mask[decided], (prediction.foreground_prob[decided] > 0.5))

    def test_dump_writes_one_row_per_frame(self):
        prediction = foreground_logits(Tensor(np.ones((5, 3))), self.store)
        with tempfile.TemporaryDirectory() as tmp:
            path = dump_foreground(prediction, Path(tmp) / 'fg.csv', gt_mask=[0, 1, 1, 0, 0])
            lines = Path(path).read_text().strip().splitlines()
        self.assertEqual(lines[0], 'frame_index,foreground_prob,hard_mask,gt_mask')
        self.assertEqual(len(lines), 6)
