"""Binary classifier metrics: confusion counts, MCC, ROC/AUC, PR/AP.

Positive class is speech.  A score is called positive at threshold ``t``
when ``score >= t``, everywhere in the package.
"""

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import (
    EmptyCounts,
    EmptyInput,
    InvalidStep,
    LengthMismatch,
    NoPositives,
    SingleClassInput,
)


class ConfusionCounts(NamedTuple):
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self):
        return self.tp + self.fp + self.tn + self.fn

    def as_dict(self):
        return {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn}


class CurvePoint(NamedTuple):
    threshold: float
    x: float
    y: float


@dataclass(frozen=True)
class Curve:
    """A threshold-indexed curve; ROC has x=FPR, y=TPR, PR has x=recall, y=precision."""

    thresholds: np.ndarray
    x: np.ndarray
    y: np.ndarray

    def __len__(self):
        return len(self.thresholds)

    @property
    def points(self):
        return [CurvePoint(float(t), float(a), float(b)) for t, a, b in zip(self.thresholds, self.x, self.y)]


def _as_pair(scores, labels):
    s = np.asarray(scores, dtype=np.float64).ravel()
    y = np.asarray(labels, dtype=np.bool_).ravel()
    if s.shape != y.shape:
        raise LengthMismatch(f"{len(s)} scores vs {len(y)} labels")
    return s, y


def confusion(decisions, labels):
    d, y = _as_pair(decisions, labels)
    d = d.astype(np.bool_)
    if d.size == 0:
        raise EmptyInput("no decisions")
    tp = int(np.count_nonzero(d & y))
    fp = int(np.count_nonzero(d & ~y))
    fn = int(np.count_nonzero(~d & y))
    return ConfusionCounts(tp, fp, int(d.size) - tp - fp - fn, fn)


def mcc(c):
    tp, fp, tn, fn = (int(v) for v in c)
    if tp + fp + tn + fn == 0:
        raise EmptyCounts("MCC of an empty confusion matrix")
    denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
    if denom == 0:
        return 0.0
    value = (tp * tn - fp * fn) / math.sqrt(denom)
    return min(1.0, max(-1.0, value))


def _operating_points(s, y):
    """Cumulative (thresholds, tp, fp) at every distinct score, high to low."""
    uniq, inv = np.unique(s, return_inverse=True)
    pos = np.bincount(inv, weights=y.astype(np.float64), minlength=len(uniq))
    tot = np.bincount(inv, minlength=len(uniq)).astype(np.float64)
    tp = np.cumsum(pos[::-1])
    fp = np.cumsum((tot - pos)[::-1])
    return uniq[::-1], tp, fp


def roc_curve(scores, labels):
    """ROC points (preceded by the +inf point at the origin) and trapezoidal AUC."""
    s, y = _as_pair(scores, labels)
    n_pos = int(np.count_nonzero(y))
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClassInput("ROC needs both speech and non-speech windows")
    thr, tp, fp = _operating_points(s, y)
    fpr = np.concatenate(([0.0], fp / n_neg))
    tpr = np.concatenate(([0.0], tp / n_pos))
    thresholds = np.concatenate(([np.inf], thr))
    auc = float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1])) / 2.0)
    return Curve(thresholds, fpr, tpr), min(1.0, max(0.0, auc))


def pr_curve(scores, labels):
    """PR points at every distinct score (high to low) and step-wise AP.

    The +inf sentinel predicts nothing, so its precision is undefined; it is
    not emitted as a point and contributes recall 0 as the starting level.
    """
    s, y = _as_pair(scores, labels)
    n_pos = int(np.count_nonzero(y))
    if n_pos == 0:
        raise NoPositives("PR curve needs at least one speech window")
    thr, tp, fp = _operating_points(s, y)
    recall = tp / n_pos
    precision = tp / (tp + fp)
    ap = float(np.sum(np.diff(np.concatenate(([0.0], recall))) * precision))
    return Curve(thr, recall, precision), min(1.0, max(0.0, ap))


def threshold_grid(step):
    """``0, step, 2*step, ..., 1``; ``1/step`` must be a whole number."""
    try:
        step = float(step)
    except (TypeError, ValueError):
        raise InvalidStep(f"step {step!r} is not a number") from None
    if not 0.0 < step <= 1.0:
        raise InvalidStep(f"step {step} outside (0, 1]")
    n = round(1.0 / step)
    if abs(n * step - 1.0) > 1e-9:
        raise InvalidStep(f"step {step} does not divide [0, 1] evenly")
    return np.arange(n + 1) / n


def confusion_at_thresholds(scores, labels, thresholds):
    """``(tp, fp, tn, fn)`` arrays for ``score >= t`` at each threshold."""
    s, y = _as_pair(scores, labels)
    pos = np.sort(s[y])
    neg = np.sort(s[~y])
    t = np.asarray(thresholds, dtype=np.float64)
    tp = len(pos) - np.searchsorted(pos, t, side="left")
    fp = len(neg) - np.searchsorted(neg, t, side="left")
    return tp, fp, len(neg) - fp, len(pos) - tp


def mcc_threshold_sweep(scores, labels, step):
    grid = threshold_grid(step)
    s, y = _as_pair(scores, labels)
    if s.size == 0:
        raise EmptyInput("no scores")
    tp, fp, tn, fn = confusion_at_thresholds(s, y, grid)
    return {float(t): mcc((a, b, c, d)) for t, a, b, c, d in zip(grid, tp, fp, tn, fn)}


def best_threshold(sweep):
    """Highest-MCC threshold; the lowest threshold wins a tie."""
    best_t, best_v = None, -math.inf
    for t in sorted(sweep):
        if sweep[t] > best_v:
            best_t, best_v = t, sweep[t]
    return best_t, best_v


# ---------------------------------------------------------------------------
# per-file and pooled reporting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FileMetrics:
    auc: float = None
    ap: float = None
    prevalence: float = None
    n_windows: int = 0
    note: str = ""

    def as_dict(self):
        return {
            "auc": self.auc,
            "ap": self.ap,
            "prevalence": self.prevalence,
            "n_windows": self.n_windows,
            "note": self.note,
        }


def file_metrics(scores, labels):
    s, y = _as_pair(scores, labels)
    prev = float(np.count_nonzero(y) / y.size) if y.size else None
    notes = []
    auc = ap = None
    try:
        _, auc = roc_curve(s, y)
    except SingleClassInput:
        notes.append("auc undefined: single-class labels")
    try:
        _, ap = pr_curve(s, y)
    except NoPositives:
        notes.append("ap undefined: no speech windows")
    return FileMetrics(auc, ap, prev, int(y.size), "; ".join(notes))


def pooled(per_clip):
    """Concatenate ``{source_id: (scores, labels)}`` in source_id order."""
    keys = sorted(per_clip)
    if not keys:
        raise EmptyInput("no clips")
    s = np.concatenate([np.asarray(per_clip[k][0], dtype=np.float64) for k in keys])
    y = np.concatenate([np.asarray(per_clip[k][1], dtype=np.bool_) for k in keys])
    return s, y


def per_file_report(per_clip, window_size_ms=None):
    """Per-clip AUC/AP plus the pooled ROC and PR over all clips.

    Returns ``(per_file, (roc, auc), (pr, ap))``.  Per-clip failures are
    recorded in :attr:`FileMetrics.note`; pooled failures raise.
    """
    per_file = {k: file_metrics(*per_clip[k]) for k in sorted(per_clip)}
    s, y = pooled(per_clip)
    return per_file, roc_curve(s, y), pr_curve(s, y)


@dataclass
class MetricReport:
    engine_id: str
    window_size_ms: float
    roc: Curve
    auc: float
    pr: Curve
    ap: float
    mcc_by_threshold: dict
    per_file: dict
    threshold_best: float
    mcc_best: float
    confusion_best: ConfusionCounts
    prevalence: float
    n_windows: int
    extra: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            "engine_id": self.engine_id,
            "window_ms": self.window_size_ms,
            "auc": self.auc,
            "ap": self.ap,
            "mcc_best": self.mcc_best,
            "threshold_best": self.threshold_best,
            "confusion_best": self.confusion_best.as_dict(),
            "prevalence": self.prevalence,
            "n_windows": self.n_windows,
            "mcc_by_threshold": {repr(float(t)): v for t, v in sorted(self.mcc_by_threshold.items())},
            "per_file": {k: v.as_dict() for k, v in sorted(self.per_file.items())},
            **self.extra,
        }


def build_report(engine_id, window_size_ms, per_clip, threshold_step=0.05):
    per_file, (roc, auc), (pr, ap) = per_file_report(per_clip, window_size_ms)
    s, y = pooled(per_clip)
    sweep = mcc_threshold_sweep(s, y, threshold_step)
    t_best, m_best = best_threshold(sweep)
    return MetricReport(
        engine_id=engine_id,
        window_size_ms=window_size_ms,
        roc=roc,
        auc=auc,
        pr=pr,
        ap=ap,
        mcc_by_threshold=sweep,
        per_file=per_file,
        threshold_best=t_best,
        mcc_best=m_best,
        confusion_best=confusion(s >= t_best, y),
        prevalence=float(np.count_nonzero(y) / y.size),
        n_windows=int(y.size),
    )
