"""
Ablation suites. Each row retrains the model from the same seed with one
configuration section changed and scores it on the evaluation split.
"""
import logging
from dataclasses import replace
from pathlib import Path

import pandas as pd

from fusion.integration import MODES
from metrics.scores import F1_THRESHOLDS
from utils.exceptions import UsageError

from .evaluator import evaluate
from .trainer import train

logger = logging.getLogger(__name__)

# (use_loc, use_tri, use_den) rows of the loss ablation
LOSS_SWITCH_ROWS = (
    (False, False, True),
    (False, True, True),
    (True, False, True),
    (True, True, False),
    (True, True, True),
)
SIMILARITY_ROWS = ('tsm', 'self_attention', 'mpr_tsm', 'lmrl')
SUITES = ('integration', 'losses', 'similarity')

METRIC_COLUMNS = ['mae', 'obo', 'frame_acc', 'edit', *[f'f1_{tau}' for tau in F1_THRESHOLDS]]


def _switch_label(switches):
    return '+'.join(name for name, on in zip(('loc', 'tri', 'den'), switches) if on)


def suite_variants(suite, cfg):
    """[(label, extra columns, RunConfig)] for the named suite."""
    if suite == 'integration':
        return [(mode, {'mode': mode}, replace(cfg, fusion=replace(cfg.fusion, mode=mode))) for mode in MODES]
    if suite == 'losses':
        variants = []
        for loc, tri, den in LOSS_SWITCH_ROWS:
            loss = replace(cfg.loss, use_loc=loc, use_tri=tri, use_den=den)
            columns = {'use_loc': loc, 'use_tri': tri, 'use_den': den}
            variants.append((_switch_label((loc, tri, den)), columns, replace(cfg, loss=loss)))
        return variants
    if suite == 'similarity':
        return [
            (variant, {'variant': variant}, replace(cfg, mpr=replace(cfg.mpr, variant=variant)))
            for variant in SIMILARITY_ROWS
        ]
    raise UsageError(f"unknown ablation suite '{suite}', expected one of {list(SUITES)}")


def run_ablation(suite, cfg, dataset, out_dir=None, split='test', epochs=None):
    """Train and score every variant of ``suite``; returns the table as a DataFrame."""
    variants = suite_variants(suite, cfg)
    train_set = dataset.get('train', [])
    val_set = dataset.get('val', [])
    eval_set = dataset.get(split, [])
    rows = []
    for label, columns, variant_cfg in variants:
        logger.info(f'Ablation {suite}: training variant {label}')
        result = train(variant_cfg, train_set, val_set, epochs=epochs)
        report, _ = evaluate(result.model, eval_set, split=split, with_baseline=False)
        row = {'suite': suite, 'variant': label, **columns}
        row.update({
            'mae': report.mae, 'obo': report.obo, 'frame_acc': report.frame_acc, 'edit': report.edit,
            **{f'f1_{tau}': report.f1[str(tau)] for tau in F1_THRESHOLDS},
            'final_train_loss': result.final_loss,
        })
        rows.append(row)
    table = pd.DataFrame(rows)
    if out_dir is not None:
        path = Path(out_dir) / f'ablation_{suite}.csv'
        path.parent.mkdir(parents=True, exist_ok=True)
        table.to_csv(path, index=False, float_format='%.10g')
        logger.info(f'✓ Wrote {path}')
    return table
