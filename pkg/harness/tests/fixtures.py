from dataclasses import replace

from fusion.integration import FusionConfig
from harness.config import DataConfig, OptimConfig, RunConfig
from mpr.branch import MprConfig
from rfl.branch import RflConfig
from synthgen.sequences import GenConfig, generate_sequence
from utils.seeding import derive_seed

TINY_DOCUMENT = {
    'gen': {
        'seq_len': 16, 'embed_dim': 4, 'cycle_len_range': [3, 6], 'n_cycles_range': [2, 3],
        'interruption_len_range': [2, 4], 'lead_tail_range': [0, 2],
    },
    'mpr': {'scale_orders': [1, 2], 'out_channels': 4},
    'rfl': {'n_blocks': 2, 'channels': 8},
    'fusion': {'fused_dim': 8, 'predictor_heads': 2},
    'optim': {'epochs': 1, 'batch_size': 2},
    'data': {'n_train': 4, 'n_val': 2, 'n_test': 2},
}


def tiny_config(seed=0, **sections):
    cfg = RunConfig(
        gen=GenConfig(seq_len=16, embed_dim=4, cycle_len_range=(3, 6), n_cycles_range=(2, 3),
                      interruption_len_range=(2, 4), lead_tail_range=(0, 2)),
        mpr=MprConfig(scale_orders=(1, 2), out_channels=4),
        rfl=RflConfig(n_blocks=2, channels=8),
        fusion=FusionConfig(fused_dim=8, predictor_heads=2),
        optim=OptimConfig(epochs=1, batch_size=2),
        data=DataConfig(n_train=4, n_val=2, n_test=2),
        seed=seed,
    )
    return replace(cfg, **sections)


def tiny_sequences(cfg, split, n):
    gen = cfg.generation_config()
    return [generate_sequence(gen, derive_seed(gen.seed, split, i), f'{split}_{i:04d}') for i in range(n)]
