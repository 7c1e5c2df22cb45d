import os
import tempfile
import unittest
from pathlib import Path

import pandas as pd
from django.test import SimpleTestCase

from harness.ablation import LOSS_SWITCH_ROWS, run_ablation, suite_variants
from harness.config import RunConfig
from utils.exceptions import UsageError

from .fixtures import tiny_config, tiny_sequences


class SuiteVariantTests(SimpleTestCase):
    def test_row_structure(self):
        cfg = tiny_config()
        self.assertEqual([label for label, _, _ in suite_variants('integration', cfg)],
                         ['rfl_only', 'mpr_only', 'weighted_avg', 'concat'])
        losses = suite_variants('losses', cfg)
        self.assertEqual(len(losses), 5)
        self.assertEqual(
            [(c.loss.use_loc, c.loss.use_tri, c.loss.use_den) for _, _, c in losses], list(LOSS_SWITCH_ROWS),
        )
        self.assertEqual([label for label, _, _ in suite_variants('similarity', cfg)],
                         ['tsm', 'self_attention', 'mpr_tsm', 'lmrl'])

    def test_unknown_suite(self):
        with self.assertRaises(UsageError):
            suite_variants('optimizers', tiny_config())


class RunAblationTests(SimpleTestCase):
    def test_integration_suite_writes_four_rows(self):
        cfg = tiny_config()
        dataset = {'train': tiny_sequences(cfg, 'train', 2), 'test': tiny_sequences(cfg, 'test', 2)}
        with tempfile.TemporaryDirectory() as tmp:
            table = run_ablation('integration', cfg, dataset, out_dir=tmp, epochs=1)
            written = pd.read_csv(Path(tmp) / 'ablation_integration.csv')
        self.assertEqual(len(table), 4)
        self.assertEqual(list(written['variant']), ['rfl_only', 'mpr_only', 'weighted_avg', 'concat'])
        for column in ('mae', 'obo', 'frame_acc', 'edit', 'f1_10', 'f1_25', 'f1_50'):
            self.assertIn(column, written.columns)


@unittest.skipUnless(os.environ.get('LMRL_RUN_SLOW') == '1', 'set LMRL_RUN_SLOW=1 for full ablation runs')
class AblationDirectionTests(SimpleTestCase):
    def setUp(self):
        self.cfg = RunConfig()
        self.dataset = {
            'train': tiny_sequences(self.cfg, 'train', self.cfg.data.n_train),
            'val': tiny_sequences(self.cfg, 'val', self.cfg.data.n_val),
            'test': tiny_sequences(self.cfg, 'test', self.cfg.data.n_test),
        }

    def test_localization_loss_improves_frame_accuracy(self):
        table = run_ablation('losses', self.cfg, self.dataset).set_index('variant')
        self.assertGreater(table.loc['loc+tri+den', 'frame_acc'], table.loc['tri+den', 'frame_acc'])

    def test_weighted_average_matches_single_branches(self):
        table = run_ablation('integration', self.cfg, self.dataset).set_index('variant')
        self.assertGreaterEqual(table.loc['weighted_avg', 'obo'], table.loc['rfl_only', 'obo'])
        self.assertGreaterEqual(table.loc['weighted_avg', 'obo'], table.loc['mpr_only', 'obo'])
