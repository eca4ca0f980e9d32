"""Two-threshold hysteresis gate and MCC grid search over threshold pairs."""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import AlignmentMismatch, ConfigError, EmptyInput
from .metrics import ConfusionCounts, mcc, threshold_grid


@dataclass(frozen=True)
class HysteresisConfig:
    low: float
    high: float

    def __post_init__(self):
        if not 0.0 <= self.low <= self.high <= 1.0:
            raise ConfigError(f"need 0 <= low <= high <= 1, got low={self.low}, high={self.high}")


@dataclass(frozen=True)
class GateDecisions:
    decisions: np.ndarray
    config: HysteresisConfig
    engine_id: str = ""

    def __len__(self):
        return len(self.decisions)


def apply_hysteresis(trace, config):
    """Gate a trace: OFF -> ON at ``score >= high``, ON -> OFF at ``score < low``.

    The gate starts OFF and each decision reflects the state after the
    window's own score has been seen.
    """
    scores = getattr(trace, "scores", trace)
    dec = _kernels.hysteresis_scan(scores, config.low, config.high)
    return GateDecisions(dec, config, getattr(trace, "engine_id", ""))


def candidate_pairs(step):
    """Valid ``(low, high)`` pairs on the grid, ordered by ``(high, low)``."""
    grid = [float(t) for t in threshold_grid(step)]
    return [(lo, hi) for hi in grid for lo in grid if lo <= hi]


@dataclass
class HysteresisSearch:
    best: HysteresisConfig
    best_mcc: float
    surface: dict  # (low, high) -> mcc
    counts: dict  # (low, high) -> ConfusionCounts

    def rows(self):
        """``(low, high, mcc)`` sorted by low, then high."""
        return [(lo, hi, v) for (lo, hi), v in sorted(self.surface.items())]


def _stack(traces, labels):
    if len(traces) == 0:
        raise EmptyInput("no traces to search over")
    if len(traces) != len(labels):
        raise AlignmentMismatch(f"{len(traces)} traces vs {len(labels)} label tracks")
    scores, truth, lengths = [], [], []
    for tr, lab in zip(traces, labels):
        s = np.asarray(getattr(tr, "scores", tr), dtype=np.float64)
        y = np.asarray(getattr(lab, "labels", lab), dtype=np.bool_)
        if len(s) != len(y):
            sid = getattr(tr, "source_id", "?")
            raise AlignmentMismatch(f"{sid}: {len(s)} scores vs {len(y)} labels")
        src_t, src_l = getattr(tr, "source_id", None), getattr(lab, "source_id", None)
        if src_t and src_l and src_t != src_l:
            raise AlignmentMismatch(f"trace {src_t} paired with labels {src_l}")
        scores.append(s)
        truth.append(y)
        lengths.append(len(s))
    offsets = np.concatenate(([0], np.cumsum(lengths))).astype(np.int64)
    return np.concatenate(scores), np.concatenate(truth), offsets


def grid_search_hysteresis(traces, labels, step=0.05):
    """Search every grid pair for the highest pooled MCC.

    Each clip is gated on its own (state starts OFF per clip); confusion
    counts are summed over clips before MCC.  Ties go to the smallest
    ``(high, low)``.
    """
    pairs = candidate_pairs(step)
    scores, truth, offsets = _stack(traces, labels)
    lows = np.array([p[0] for p in pairs])
    highs = np.array([p[1] for p in pairs])
    table = _kernels.hysteresis_confusion(scores, truth, offsets, lows, highs)
    surface, counts = {}, {}
    best, best_v = None, -np.inf
    for pair, row in zip(pairs, table):
        c = ConfusionCounts(*(int(v) for v in row))
        v = mcc(c)
        surface[pair] = v
        counts[pair] = c
        if v > best_v:
            best, best_v = pair, v
    return HysteresisSearch(HysteresisConfig(*best), best_v, surface, counts)
