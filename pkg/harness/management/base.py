"""
Shared plumbing for the experiment commands: config loading, directory
resolution, error conversion and run registration.
"""
import logging
from dataclasses import replace
from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from audit.utils import log_action
from harness.config import config_hash, load_run_config
from synthgen.storage import load_gen_config
from utils.exceptions import ConfigurationError, LmrlError
from utils.seeding import MAX_SEED

logger = logging.getLogger(__name__)


class ExperimentCommand(BaseCommand):
    action = ''

    def add_arguments(self, parser):
        parser.add_argument('--config', help='RunConfig JSON file (defaults apply when omitted)')
        parser.add_argument('--seed', type=int, help='Root seed, overrides the config')
        parser.add_argument('--out', help='Output directory')

    def handle(self, *args, **options):
        cfg, target = None, options.get('out') or ''
        try:
            cfg = self.load_config(options)
            target, metadata = self.run(cfg, options)
        except LmrlError as exc:
            self._register(cfg, target, 'failed', {'error': exc.kind})
            raise CommandError(f'{exc.kind}: {exc.one_line()}') from exc
        except OSError as exc:
            self._register(cfg, target, 'failed', {'error': 'OSError'})
            raise CommandError(f"OSError: {' '.join(str(exc).split())}") from exc
        self._register(cfg, target, 'success', metadata)

    def run(self, cfg, options):
        """Do the work; returns (target, metadata) for the run registry."""
        raise NotImplementedError

    def load_config(self, options):
        cfg = load_run_config(options.get('config'))
        if options.get('seed') is not None:
            if not 0 <= options['seed'] <= MAX_SEED:
                raise ConfigurationError(f"--seed must lie in [0, 2**64 - 1], got {options['seed']}")
            cfg = replace(cfg, seed=options['seed'])
        elif not options.get('config'):
            cfg = replace(cfg, seed=settings.LMRL_DEFAULT_SEED)
        return cfg.validate()

    def data_dir(self, cfg, options):
        return Path(options.get('data') or cfg.paths.data_dir or settings.LMRL_DATA_DIR)

    def out_dir(self, cfg, options):
        return Path(options.get('out') or cfg.paths.out_dir or settings.LMRL_OUTPUT_DIR)

    def check_dataset(self, cfg, data_dir):
        """The model is sized for the run's sequence shape, so the dataset must match it."""
        gen = load_gen_config(data_dir)
        if (gen.seq_len, gen.embed_dim) != (cfg.gen.seq_len, cfg.gen.embed_dim):
            raise ConfigurationError(
                f'{data_dir}: dataset has N={gen.seq_len} C={gen.embed_dim}, '
                f'the run config expects N={cfg.gen.seq_len} C={cfg.gen.embed_dim}'
            )

    def _register(self, cfg, target, status, metadata):
        log_action(
            action=self.action, target=str(target), status=status,
            config_hash=config_hash(cfg) if cfg is not None else '', metadata=metadata,
        )
