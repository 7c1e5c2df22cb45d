import logging
from pathlib import Path

from fusion.predictor import dump_density
from metrics.baseline import autocorr_count
from metrics.report import VideoRecord, build_report, write_report
from mpr.branch import dump_similarity_stack
from rfl.branch import dump_foreground
from supervision.targets import build_targets

logger = logging.getLogger(__name__)


def _dump_maps(outputs, targets, sequence_id, dump_dir, scale_orders):
    dump_dir = Path(dump_dir)
    dump_density(dump_dir / f'{sequence_id}_density.csv', outputs.density, targets.density)
    dump_foreground(outputs.foreground, dump_dir / f'{sequence_id}_foreground.csv', targets.mask)
    dump_similarity_stack(outputs.stack, dump_dir, sequence_id, scale_orders)


def evaluate(model, sequences, split='', with_baseline=True, dump_dir=None):
    """Run the model over ``sequences`` without recording gradients.

    Returns (EvalReport, records). With ``dump_dir`` set, per-video density,
    foreground and similarity CSVs are written there.
    """
    records = []
    for sequence in sequences:
        targets = build_targets(sequence.annotations, sequence.seq_len)
        outputs = model.predict(sequence.embeddings)
        records.append(VideoRecord(
            id=sequence.id,
            gt_count=sequence.annotations.count,
            pred_count=outputs.count,
            pred_mask=outputs.foreground.hard_mask,
            gt_mask=targets.mask,
            has_interruption=sequence.annotations.has_interruption,
            baseline_count=autocorr_count(sequence.embeddings) if with_baseline else None,
        ))
        if dump_dir is not None:
            _dump_maps(outputs, targets, sequence.id, dump_dir, model.cfg.mpr.scale_orders)
    report = build_report(records, split=split)
    logger.info(
        f'Evaluated {report.n_videos} {split or "unnamed"} videos: '
        f'MAE {report.mae:.4f} OBO {report.obo:.4f} Acc {report.frame_acc:.2f}'
    )
    return report, records


def evaluate_to_dir(model, sequences, out_dir, split='', dump_maps=False):
    out_dir = Path(out_dir)
    report, records = evaluate(model, sequences, split=split, dump_dir=out_dir / 'maps' if dump_maps else None)
    write_report(report, out_dir)
    return report, records
