import json
import tempfile
from dataclasses import replace
from pathlib import Path

from django.test import SimpleTestCase

from harness.config import RunConfig, config_hash, load_run_config, save_run_config
from utils.exceptions import ConfigurationError, DataError

from .fixtures import TINY_DOCUMENT, tiny_config


class RunConfigTests(SimpleTestCase):
    def test_empty_document_gives_defaults(self):
        cfg = RunConfig.from_dict({})
        self.assertEqual(cfg, RunConfig())
        self.assertEqual(cfg.optim.lr, 1e-3)
        self.assertEqual(cfg.optim.betas, (0.9, 0.999))
        self.assertEqual(cfg.optim.epochs, 30)
        self.assertEqual(cfg.optim.batch_size, 4)

    def test_partial_section_keeps_other_defaults(self):
        cfg = RunConfig.from_dict(TINY_DOCUMENT)
        self.assertEqual(cfg, tiny_config())
        self.assertEqual(cfg.loss.margin, 0.5)

    def test_json_round_trip(self):
        cfg = tiny_config(seed=7)
        self.assertEqual(RunConfig.from_dict(json.loads(cfg.to_json())), cfg)

    def test_invalid_fields_named_on_one_line(self):
        with self.assertRaises(ConfigurationError) as ctx:
            RunConfig.from_dict({'fusion': {'mode': 'sum'}, 'optim': {'epochs': 0}}, source='run.json')
        message = str(ctx.exception)
        self.assertTrue(message.startswith('run.json: '))
        self.assertIn('fusion.mode', message)
        self.assertIn('optim.epochs', message)
        self.assertNotIn('\n', message)

    def test_unknown_section_rejected(self):
        with self.assertRaises(ConfigurationError):
            RunConfig.from_dict({'optimiser': {}})

    def test_all_losses_off_rejected(self):
        with self.assertRaises(ConfigurationError):
            RunConfig.from_dict({'loss': {'use_loc': False, 'use_tri': False, 'use_den': False}})

    def test_hash_ignores_paths(self):
        cfg = tiny_config()
        moved = replace(cfg, paths=replace(cfg.paths, out_dir='/elsewhere'))
        self.assertEqual(config_hash(cfg), config_hash(moved))
        self.assertNotEqual(config_hash(cfg), config_hash(tiny_config(seed=1)))

    def test_data_stream_seeds_generation(self):
        self.assertNotEqual(tiny_config(seed=0).generation_config().seed, tiny_config(seed=1).generation_config().seed)

    def test_seed_range(self):
        self.assertEqual(RunConfig.from_dict({'seed': 2 ** 64 - 1}).seed, 2 ** 64 - 1)
        with self.assertRaises(ConfigurationError):
            RunConfig.from_dict({'seed': 2 ** 64})
        with self.assertRaises(ConfigurationError):
            replace(tiny_config(), seed=-1).validate()

    def test_generation_seed_comes_from_root_seed(self):
        cfg = tiny_config(seed=2)
        with self.assertRaises(ConfigurationError):
            replace(cfg, gen=replace(cfg.gen, seed=9)).validate()
        self.assertEqual(cfg.gen.seed, 0)
        self.assertNotEqual(cfg.generation_config().seed, 0)


class ConfigFileTests(SimpleTestCase):
    def test_save_and_load(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = save_run_config(tiny_config(seed=3), Path(tmp) / 'cfg.json')
            self.assertEqual(load_run_config(path), tiny_config(seed=3))

    def test_missing_file(self):
        with self.assertRaises(DataError):
            load_run_config('/nonexistent/cfg.json')

    def test_malformed_json(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'cfg.json'
            path.write_text('{"seed": ')
            with self.assertRaises(ConfigurationError) as ctx:
                load_run_config(path)
            self.assertIn(str(path), str(ctx.exception))
