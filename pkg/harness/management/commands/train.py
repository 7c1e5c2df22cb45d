from harness.management.base import ExperimentCommand
from harness.trainer import train
from synthgen.storage import load_dataset


class Command(ExperimentCommand):
    help = 'Train the repetition counter and write checkpoints and train_log.csv'
    action = 'train'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--data', help='Dataset directory')
        parser.add_argument('--epochs', type=int, help='Override optim.epochs')

    def run(self, cfg, options):
        data_dir, out_dir = self.data_dir(cfg, options), self.out_dir(cfg, options)
        self.check_dataset(cfg, data_dir)
        dataset = load_dataset(data_dir, ['train', 'val'])
        self.stdout.write(self.style.WARNING(
            f"Training on {len(dataset['train'])} sequences, validating on {len(dataset['val'])}..."
        ))
        result = train(cfg, dataset['train'], dataset['val'], out_dir=out_dir, epochs=options.get('epochs'))
        self.stdout.write(self.style.SUCCESS(
            f'✓ Trained {len(result.history)} epochs, final loss {result.final_loss:.5f}, '
            f'best epoch {result.best_epoch} -> {result.best_path}'
        ))
        return out_dir, {'epochs': len(result.history), 'best_epoch': result.best_epoch,
                         'final_loss': result.final_loss}
