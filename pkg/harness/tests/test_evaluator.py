import json
import tempfile
from pathlib import Path

from django.test import SimpleTestCase

from harness.checkpoint import load_checkpoint
from harness.evaluator import evaluate, evaluate_to_dir
from harness.pipeline import RepetitionCounter
from harness.trainer import train
from metrics.report import VideoRecord, build_report
from metrics.serializers import EvalReportSerializer
from supervision.targets import build_targets

from .fixtures import tiny_config, tiny_sequences


def _ground_truth_records(sequences):
    records = []
    for sequence in sequences:
        targets = build_targets(sequence.annotations, sequence.seq_len)
        records.append(VideoRecord(
            id=sequence.id, gt_count=targets.count, pred_count=targets.density.count,
            pred_mask=targets.mask, gt_mask=targets.mask,
            has_interruption=sequence.annotations.has_interruption,
        ))
    return records


class GroundTruthOracleTests(SimpleTestCase):
    def test_ground_truth_scores_perfectly(self):
        sequences = tiny_sequences(tiny_config(), 'test', 6)
        report = build_report(_ground_truth_records(sequences), split='test')
        self.assertAlmostEqual(report.mae, 0.0, places=9)
        self.assertEqual(report.obo, 1.0)
        self.assertEqual(report.frame_acc, 100.0)
        self.assertEqual(report.edit, 100.0)
        self.assertEqual(report.f1, {'10': 100.0, '25': 100.0, '50': 100.0})


class EvaluateTests(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.cfg = tiny_config()
        self.test_set = tiny_sequences(self.cfg, 'test', 3)

    def test_report_is_complete(self):
        report, records = evaluate(RepetitionCounter(self.cfg), self.test_set, split='test')
        self.assertEqual(len(records), 3)
        payload = report.to_dict()
        serializer = EvalReportSerializer(data=payload)
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertIsNotNone(report.baseline)

    def test_checkpoint_round_trip_reproduces_report(self):
        out = Path(self.tmp.name)
        result = train(self.cfg, tiny_sequences(self.cfg, 'train', 4), out_dir=out / 'run')
        evaluate_to_dir(result.model, self.test_set, out / 'before', split='test')
        reloaded = RepetitionCounter.from_checkpoint(load_checkpoint(out / 'run' / 'checkpoints' / 'best.ckpt'))
        evaluate_to_dir(reloaded, self.test_set, out / 'after', split='test')
        evaluate_to_dir(reloaded, self.test_set, out / 'again', split='test')
        before = (out / 'before' / 'report.json').read_bytes()
        self.assertEqual(before, (out / 'after' / 'report.json').read_bytes())
        self.assertEqual(before, (out / 'again' / 'report.json').read_bytes())
        self.assertEqual(json.loads(before)['n_videos'], 3)

    def test_dump_maps(self):
        out = Path(self.tmp.name) / 'eval'
        evaluate_to_dir(RepetitionCounter(self.cfg), self.test_set[:1], out, split='test', dump_maps=True)
        maps = out / 'maps'
        sequence_id = self.test_set[0].id
        for name in ('density', 'foreground', 'raw', 'refined', 'pooled_k1', 'pooled_k2'):
            self.assertTrue((maps / f'{sequence_id}_{name}.csv').exists(), name)
