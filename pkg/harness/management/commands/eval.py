from harness.checkpoint import load_checkpoint
from harness.evaluator import evaluate_to_dir
from harness.management.base import ExperimentCommand
from harness.pipeline import RepetitionCounter
from harness.trainer import BEST_NAME
from synthgen.storage import load_dataset


class Command(ExperimentCommand):
    help = 'Evaluate a checkpoint and write report.json and per_video.csv'
    action = 'eval'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--data', help='Dataset directory')
        parser.add_argument('--checkpoint', help='Checkpoint file (default <out>/checkpoints/best.ckpt)')
        parser.add_argument('--split', default='test', help='Split to evaluate')
        parser.add_argument('--dump-maps', action='store_true', help='Also write density, foreground and similarity CSVs')

    def run(self, cfg, options):
        out_dir = self.out_dir(cfg, options)
        checkpoint = load_checkpoint(options.get('checkpoint') or out_dir / 'checkpoints' / BEST_NAME)
        # the model comes from the checkpoint's own config
        model_cfg = checkpoint.config
        data_dir = self.data_dir(model_cfg, options)
        self.check_dataset(model_cfg, data_dir)
        split = options['split']
        sequences = load_dataset(data_dir, [split])[split]
        model = RepetitionCounter.from_checkpoint(checkpoint)
        report, _ = evaluate_to_dir(model, sequences, out_dir, split=split, dump_maps=options['dump_maps'])
        self.stdout.write(self.style.SUCCESS(
            f'✓ {split}: MAE {report.mae:.4f} OBO {report.obo:.4f} Acc {report.frame_acc:.2f} '
            f'Edit {report.edit:.2f} -> {out_dir / "report.json"}'
        ))
        return out_dir, {'split': split, 'mae': report.mae, 'obo': report.obo, 'epoch': checkpoint.epoch}
