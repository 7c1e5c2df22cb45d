from harness.ablation import run_ablation, suite_variants
from harness.management.base import ExperimentCommand
from synthgen.storage import load_dataset


class Command(ExperimentCommand):
    help = 'Run an ablation suite (integration, losses or similarity) and write ablation_<suite>.csv'
    action = 'ablate'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--suite', required=True, help='integration, losses or similarity')
        parser.add_argument('--data', help='Dataset directory')
        parser.add_argument('--split', default='test', help='Split to score each variant on')
        parser.add_argument('--epochs', type=int, help='Override optim.epochs')

    def run(self, cfg, options):
        suite = options['suite']
        # reject an unknown suite before touching the dataset
        variants = suite_variants(suite, cfg)
        data_dir, out_dir = self.data_dir(cfg, options), self.out_dir(cfg, options)
        self.check_dataset(cfg, data_dir)
        dataset = load_dataset(data_dir, sorted({'train', 'val', options['split']}))
        self.stdout.write(self.style.WARNING(f'Running {len(variants)} {suite} variants...'))
        table = run_ablation(suite, cfg, dataset, out_dir=out_dir, split=options['split'], epochs=options.get('epochs'))
        self.stdout.write(self.style.SUCCESS(f'✓ Wrote {out_dir / f"ablation_{suite}.csv"} ({len(table)} rows)'))
        return out_dir, {'suite': suite, 'rows': len(table)}
