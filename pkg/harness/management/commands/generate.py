from pathlib import Path

from harness.management.base import ExperimentCommand
from synthgen.storage import generate_dataset


class Command(ExperimentCommand):
    help = 'Generate the synthetic train/val/test corpus'
    action = 'generate'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--data', help='Alias of --out for the dataset directory')

    def run(self, cfg, options):
        out_dir = Path(options['out']) if options.get('out') else self.data_dir(cfg, options)
        self.stdout.write(self.style.WARNING(f'Generating dataset in {out_dir}...'))
        manifest = generate_dataset(
            cfg.generation_config(), cfg.data.n_train, cfg.data.n_val, cfg.data.n_test, out_dir,
        )
        sizes = {split: len(entries) for split, entries in manifest['splits'].items()}
        self.stdout.write(self.style.SUCCESS(
            f"✓ Wrote {sum(sizes.values())} sequences ({manifest['total_count']} cycles) to {out_dir}"
        ))
        return out_dir, {'splits': sizes, 'total_count': manifest['total_count']}
