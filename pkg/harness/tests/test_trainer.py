import math
import os
import tempfile
import unittest
from pathlib import Path
from unittest import mock

import numpy as np
import pandas as pd
from django.test import SimpleTestCase

from harness.checkpoint import load_checkpoint
from harness.config import RunConfig
from harness.trainer import LOG_COLUMNS, train
from tensorcore import Tensor
from utils.exceptions import DataError, TrainingError

from .fixtures import tiny_config, tiny_sequences


class TrainTests(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.cfg = tiny_config()
        self.train_set = tiny_sequences(self.cfg, 'train', 4)
        self.val_set = tiny_sequences(self.cfg, 'val', 2)

    def test_one_epoch_writes_checkpoint_and_log(self):
        out = Path(self.tmp.name) / 'run'
        result = train(self.cfg, self.train_set, self.val_set, out_dir=out)
        self.assertEqual(len(result.history), 1)
        self.assertTrue((out / 'checkpoints' / 'epoch_001.ckpt').exists())
        self.assertTrue((out / 'checkpoints' / 'best.ckpt').exists())
        self.assertTrue((out / 'run_config.json').exists())
        log = pd.read_csv(out / 'train_log.csv')
        self.assertEqual(list(log.columns), LOG_COLUMNS)
        self.assertTrue(math.isfinite(log.loc[0, 'train_loss']))
        self.assertEqual(load_checkpoint(out / 'checkpoints' / 'best.ckpt').epoch, 1)

    def test_same_seed_reproduces_log(self):
        first, second = Path(self.tmp.name) / 'a', Path(self.tmp.name) / 'b'
        train(self.cfg, self.train_set, self.val_set, out_dir=first, epochs=2)
        train(self.cfg, self.train_set, self.val_set, out_dir=second, epochs=2)
        self.assertEqual((first / 'train_log.csv').read_bytes(), (second / 'train_log.csv').read_bytes())
        self.assertEqual(
            (first / 'checkpoints' / 'epoch_002.ckpt').read_bytes(),
            (second / 'checkpoints' / 'epoch_002.ckpt').read_bytes(),
        )

    def test_different_seeds_differ(self):
        a = train(tiny_config(seed=0), self.train_set, self.val_set)
        b = train(tiny_config(seed=1), self.train_set, self.val_set)
        self.assertNotEqual(a.final_loss, b.final_loss)

    def test_without_validation_split(self):
        result = train(self.cfg, self.train_set)
        self.assertTrue(math.isnan(result.history[0]['val_mae']))
        self.assertEqual(result.best_epoch, 1)

    def test_nan_loss_aborts_with_context(self):
        nan_loss = (Tensor(float('nan')), {'count': float('nan')})
        with mock.patch('harness.trainer.total_loss', return_value=nan_loss):
            with self.assertRaises(TrainingError) as ctx:
                train(self.cfg, self.train_set)
        self.assertIn('epoch 1 step 1', str(ctx.exception))

    def test_empty_training_split(self):
        with self.assertRaises(DataError):
            train(self.cfg, [])


@unittest.skipUnless(os.environ.get('LMRL_RUN_SLOW') == '1', 'set LMRL_RUN_SLOW=1 for long training runs')
class DefaultTrainingTests(SimpleTestCase):
    """Training on the default synthetic corpus."""

    def test_loss_halves_and_smoothed_loss_does_not_rise(self):
        cfg = RunConfig()
        train_set = tiny_sequences(cfg, 'train', cfg.data.n_train)
        result = train(cfg, train_set)
        losses = [row['train_loss'] for row in result.history]
        self.assertLess(losses[-1], 0.5 * losses[0])
        smoothed = np.convolve(losses[:20], np.ones(5) / 5, mode='valid')
        self.assertTrue(np.all(np.diff(smoothed) <= 1e-12))
