import os
import unittest

from django.test import SimpleTestCase

from harness.config import RunConfig
from harness.evaluator import evaluate
from harness.trainer import train

from .fixtures import tiny_sequences


@unittest.skipUnless(os.environ.get('LMRL_RUN_SLOW') == '1', 'set LMRL_RUN_SLOW=1 for the end-to-end target')
class EndToEndTargetTests(SimpleTestCase):
    """Default corpus, 200 training sequences, 50 held out."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cfg = RunConfig()
        result = train(cfg, tiny_sequences(cfg, 'train', 200), tiny_sequences(cfg, 'val', cfg.data.n_val))
        cls.report, _ = evaluate(result.model, tiny_sequences(cfg, 'test', 50), split='test')

    def test_counting_targets(self):
        self.assertGreaterEqual(self.report.obo, 0.5)
        self.assertLessEqual(self.report.mae, 0.35)

    def test_beats_baseline_on_interrupted_videos(self):
        subset = self.report.interruption_subset
        self.assertIsNotNone(subset)
        self.assertLess(subset['model']['mae'], subset['baseline']['mae'])
        self.assertGreater(subset['model']['obo'], subset['baseline']['obo'])
