"""
Mini-batch training loop.

Each epoch shuffles the training sequences with the ``batching`` stream,
averages the per-sequence total losses over a batch and takes one Adam step
per batch. Triplets come from the ``triplets`` stream. After every epoch the
validation split is scored, one row is appended to ``train_log.csv`` and a
checkpoint is written; ``best.ckpt`` follows the lowest validation MAE.
"""
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from metrics.scores import mae_obo
from supervision.losses import sample_triplets, total_loss
from supervision.targets import build_targets
from tensorcore import Adam
from utils.exceptions import DataError, TrainingError
from utils.seeding import BATCHING_STREAM, TRIPLET_STREAM, stream

from .checkpoint import Checkpoint, save_checkpoint
from .config import save_run_config
from .pipeline import RepetitionCounter

logger = logging.getLogger(__name__)

LOG_COLUMNS = ['epoch', 'train_loss', 'count_loss', 'loc_loss', 'tri_loss', 'val_mae', 'val_obo']
BEST_NAME = 'best.ckpt'


@dataclass
class TrainResult:
    model: RepetitionCounter
    history: list = field(default_factory=list)
    best_epoch: int = 0
    best_path: Path = None

    @property
    def final_loss(self):
        return self.history[-1]['train_loss']


def _validation_scores(model, sequences):
    if not sequences:
        return math.nan, math.nan
    pairs = [(s.annotations.count, model.predict(s.embeddings).count) for s in sequences]
    return mae_obo(pairs)


def _batches(order, batch_size):
    for start in range(0, len(order), batch_size):
        yield order[start:start + batch_size]


def train(cfg, train_set, val_set=(), out_dir=None, epochs=None):
    """Train a fresh model on ``train_set``; returns a TrainResult.

    With ``out_dir`` set, writes run_config.json, train_log.csv,
    checkpoints/epoch_XXX.ckpt and checkpoints/best.ckpt there.
    """
    if not train_set:
        raise DataError('the training split is empty')
    cfg.validate()
    epochs = cfg.optim.epochs if epochs is None else int(epochs)
    model = RepetitionCounter(cfg)
    optimizer = Adam(model.params, lr=cfg.optim.lr, betas=cfg.optim.betas, eps=cfg.optim.eps)
    batch_rng = stream(cfg.seed, BATCHING_STREAM)
    triplet_rng = stream(cfg.seed, TRIPLET_STREAM)
    targets = [build_targets(s.annotations, s.seq_len) for s in train_set]

    out_dir = Path(out_dir) if out_dir is not None else None
    if out_dir is not None:
        (out_dir / 'checkpoints').mkdir(parents=True, exist_ok=True)
        save_run_config(cfg, out_dir / 'run_config.json')

    result = TrainResult(model=model)
    best_key = None
    step = 0
    for epoch in range(1, epochs + 1):
        totals = {'loss': [], 'count': [], 'loc': [], 'tri': []}
        for batch in _batches(batch_rng.permutation(len(train_set)), cfg.optim.batch_size):
            step += 1
            batch_loss = None
            for index in batch:
                outputs = model.forward(train_set[index].embeddings)
                triplets = []
                if cfg.loss.use_tri:
                    triplets = sample_triplets(targets[index].mask, triplet_rng, cfg.loss.max_triplets)
                loss, terms = total_loss(outputs, targets[index], cfg.loss, triplets)
                batch_loss = loss if batch_loss is None else batch_loss + loss
                for name in ('count', 'loc', 'tri'):
                    totals[name].append(terms.get(name, 0.0))
            batch_loss = batch_loss * (1.0 / len(batch))
            value = batch_loss.item()
            if not np.isfinite(value):
                raise TrainingError(f'non-finite loss {value} at epoch {epoch} step {step}')
            batch_loss.backward()
            try:
                optimizer.step()
            except TrainingError as exc:
                raise TrainingError(f'epoch {epoch} step {step}: {exc}') from exc
            totals['loss'].append(value)

        val_mae, val_obo = _validation_scores(model, val_set)
        row = {
            'epoch': epoch,
            'train_loss': float(np.mean(totals['loss'])),
            'count_loss': float(np.mean(totals['count'])),
            'loc_loss': float(np.mean(totals['loc'])),
            'tri_loss': float(np.mean(totals['tri'])),
            'val_mae': val_mae,
            'val_obo': val_obo,
        }
        result.history.append(row)
        logger.info(
            f"Epoch {epoch}/{epochs}: loss {row['train_loss']:.5f} val MAE {val_mae:.4f} val OBO {val_obo:.4f}"
        )

        # without a validation split the training loss ranks checkpoints
        key = (val_mae, -val_obo) if val_set else (row['train_loss'], 0.0)
        improved = best_key is None or key < best_key
        if improved:
            best_key, result.best_epoch = key, epoch
        if out_dir is not None:
            checkpoint = Checkpoint(params=model.state_dict(), epoch=epoch, config=cfg, metrics=row)
            save_checkpoint(checkpoint, out_dir / 'checkpoints' / f'epoch_{epoch:03d}.ckpt')
            if improved:
                result.best_path = save_checkpoint(checkpoint, out_dir / 'checkpoints' / BEST_NAME)
            write_train_log(result.history, out_dir / 'train_log.csv')
    return result


def write_train_log(history, path):
    pd.DataFrame(history, columns=LOG_COLUMNS).to_csv(path, index=False, float_format='%.10g')
    return path
