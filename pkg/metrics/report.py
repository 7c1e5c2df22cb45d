import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from utils.exceptions import DataError

from .scores import F1_THRESHOLDS, edit_score, f1_at, frame_accuracy, mae_obo
from .serializers import EvalReportSerializer

logger = logging.getLogger(__name__)

PER_VIDEO_COLUMNS = [
    'id', 'gt_count', 'pred_count', 'abs_error', 'frame_acc', 'edit',
    *[f'f1_{tau}' for tau in F1_THRESHOLDS], 'has_interruption',
]


@dataclass
class VideoRecord:
    id: str
    gt_count: int
    pred_count: float
    pred_mask: np.ndarray
    gt_mask: np.ndarray
    has_interruption: bool = False
    baseline_count: float = None


@dataclass
class EvalReport:
    split: str
    n_videos: int
    mae: float
    obo: float
    frame_acc: float
    edit: float
    f1: dict
    per_video: list = field(default_factory=list)
    baseline: dict = None
    interruption_subset: dict = None

    def to_dict(self):
        return asdict(self)


def _count_summary(pairs):
    mae, obo = mae_obo(pairs)
    return {'mae': mae, 'obo': obo}


def build_report(records, split=''):
    """Aggregate per-video records into an EvalReport.

    MAE and OBO are computed over videos; frame accuracy, edit and F1 are the
    means of the per-video scores. When every record carries a baseline
    count, the baseline is scored too, both overall and on the subset of
    videos containing an interruption.
    """
    records = sorted(records, key=lambda r: r.id)
    if not records:
        raise DataError(f"no videos to evaluate in split '{split}'")
    rows = []
    for record in records:
        row = {
            'id': record.id,
            'gt_count': int(record.gt_count),
            'pred_count': float(record.pred_count),
            'abs_error': abs(max(float(record.pred_count), 0.0) - record.gt_count),
            'frame_acc': frame_accuracy(record.pred_mask, record.gt_mask),
            'edit': edit_score(record.pred_mask, record.gt_mask),
            'has_interruption': bool(record.has_interruption),
        }
        for tau in F1_THRESHOLDS:
            row[f'f1_{tau}'] = f1_at(record.pred_mask, record.gt_mask, tau)
        rows.append(row)

    counts = _count_summary((r.gt_count, r.pred_count) for r in records)
    report = EvalReport(
        split=split,
        n_videos=len(records),
        mae=counts['mae'],
        obo=counts['obo'],
        frame_acc=float(np.mean([row['frame_acc'] for row in rows])),
        edit=float(np.mean([row['edit'] for row in rows])),
        f1={str(tau): float(np.mean([row[f'f1_{tau}'] for row in rows])) for tau in F1_THRESHOLDS},
        per_video=rows,
    )

    with_baseline = all(r.baseline_count is not None for r in records)
    if with_baseline:
        report.baseline = _count_summary((r.gt_count, r.baseline_count) for r in records)
    interrupted = [r for r in records if r.has_interruption]
    if interrupted:
        subset = {'n_videos': len(interrupted), 'model': _count_summary((r.gt_count, r.pred_count) for r in interrupted)}
        if with_baseline:
            subset['baseline'] = _count_summary((r.gt_count, r.baseline_count) for r in interrupted)
        report.interruption_subset = subset
    return report


def write_report(report, out_dir):
    """Write report.json (sorted keys, no timestamps) and per_video.csv."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    payload = EvalReportSerializer(report.to_dict()).data
    report_path = out_dir / 'report.json'
    report_path.write_text(json.dumps(payload, indent=2, sort_keys=True) + '\n', encoding='utf-8')
    csv_path = out_dir / 'per_video.csv'
    pd.DataFrame(report.per_video, columns=PER_VIDEO_COLUMNS).to_csv(csv_path, index=False, float_format='%.10g')
    logger.info(f'✓ Wrote {report_path} and {csv_path}')
    return report_path, csv_path
