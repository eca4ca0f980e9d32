"""Per-window VAD scores.

The RMS detector is computed here from audio.  Other detectors (WebRTC,
Silero, ...) are brought in as per-frame score files and folded onto the
window grid with the same subwindow averaging.
"""

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import (
    EmptyInput,
    EmptyWindow,
    FrameCountMismatch,
    MalformedTraceFile,
    NativeLargerThanWindow,
    ScoreOutOfRange,
)
from .framing import samples_per_window, subwindow_starts

FULL_SCALE = 32768.0
DBFS_FLOOR = -100.0
RMS_ENGINE_ID = "RMS"
DEFAULT_NATIVE_MS = {"rms": 50, "webrtc": 10, "silero": 16}
TRACE_HEADER = ("frame_index", "start_seconds", "score")


@dataclass(frozen=True)
class PredictionTrace:
    engine_id: str
    window_size_ms: float
    scores: np.ndarray
    source_id: str

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=np.float64)
        if scores.ndim != 1:
            raise ValueError("scores must be one-dimensional")
        if np.any(~((scores >= 0.0) & (scores <= 1.0))):
            raise ScoreOutOfRange(f"{self.source_id}/{self.engine_id}: score outside [0, 1]")
        scores = scores.copy()
        scores.setflags(write=False)
        object.__setattr__(self, "scores", scores)

    def __len__(self):
        return len(self.scores)


@dataclass(frozen=True)
class RmsScore:
    rms_dbfs: float
    p_intermediate: float
    p: float

    @classmethod
    def from_dbfs(cls, rms_dbfs):
        p_raw = (rms_dbfs + 100.0) / 100.0
        return cls(rms_dbfs, p_raw, min(1.0, max(0.0, p_raw)))


def dbfs_from_mean_square(mean_square):
    """dBFS of a mean square value (array or scalar), floored at -100 dBFS."""
    ms = np.asarray(mean_square, dtype=np.float64)
    with np.errstate(divide="ignore"):
        # 10*log10(ms / FS**2) == 20*log10(sqrt(ms) / FS); FS**2 is a power of two
        db = 10.0 * np.log10(ms / (FULL_SCALE * FULL_SCALE))
    db = np.maximum(db, DBFS_FLOOR)
    return db if db.ndim else float(db)


def score_from_dbfs(db):
    """Linear map of [-100, 0] dBFS onto [0, 1], clipped."""
    p = (np.asarray(db, dtype=np.float64) + 100.0) / 100.0
    p = np.clip(p, 0.0, 1.0)
    return p if p.ndim else float(p)


def rms_dbfs(samples):
    x = np.asarray(samples)
    if x.size == 0:
        raise EmptyWindow("cannot take the RMS of an empty window")
    x = x.astype(np.float64)
    return dbfs_from_mean_square(np.dot(x, x) / x.size)


def rms_vad_score(samples):
    return score_from_dbfs(rms_dbfs(samples))


def rms_score_detail(samples):
    return RmsScore.from_dbfs(rms_dbfs(samples))


def aggregate_subwindows(subscores):
    xs = np.asarray(subscores, dtype=np.float64)
    if xs.size == 0:
        raise EmptyInput("no subwindow scores to aggregate")
    m = float(np.mean(xs))
    # keep the mean inside [min, max] despite rounding
    return min(max(m, float(xs.min())), float(xs.max()))


def score_clip_rms(clip, grid, native_ms):
    """RMS trace: score each native subwindow, average per window."""
    native_len = samples_per_window(native_ms, grid.sample_rate)
    starts = subwindow_starts(grid, native_len)
    ms = _kernels.block_mean_square(clip.samples, starts.ravel(), native_len)
    sub = score_from_dbfs(dbfs_from_mean_square(ms)).reshape(starts.shape)
    scores = np.clip(sub.mean(axis=1), sub.min(axis=1), sub.max(axis=1))
    return PredictionTrace(RMS_ENGINE_ID, grid.window_size_ms, scores, clip.source_id)


# ---------------------------------------------------------------------------
# external per-frame traces
# ---------------------------------------------------------------------------


def read_frame_scores(path, sample_rate):
    """Parse a native-frame trace CSV.

    Returns ``(scores, native_len)`` where ``native_len`` is the frame size in
    samples, inferred from the frame start times (``None`` for one-row files).
    """
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise MalformedTraceFile(f"{path}: {exc.strerror or exc}") from exc
    except UnicodeDecodeError as exc:
        raise MalformedTraceFile(f"{path}: not UTF-8") from exc
    if not rows or tuple(c.strip() for c in rows[0]) != TRACE_HEADER:
        raise MalformedTraceFile(f"{path}: header must be {','.join(TRACE_HEADER)}")
    body = [r for r in rows[1:] if r and any(c.strip() for c in r)]
    if not body:
        raise MalformedTraceFile(f"{path}: no frames")
    idx = np.empty(len(body), dtype=np.int64)
    start = np.empty(len(body), dtype=np.float64)
    score = np.empty(len(body), dtype=np.float64)
    for i, row in enumerate(body):
        if len(row) != 3:
            raise MalformedTraceFile(f"{path}:{i + 2}: expected 3 fields, got {len(row)}")
        try:
            idx[i] = int(row[0])
            start[i] = float(row[1])
            score[i] = float(row[2])
        except ValueError as exc:
            raise MalformedTraceFile(f"{path}:{i + 2}: {exc}") from exc
        if not 0.0 <= score[i] <= 1.0:
            raise ScoreOutOfRange(f"{path}:{i + 2}: score {row[2]} outside [0, 1]")
    if np.any(idx != np.arange(len(body))):
        raise MalformedTraceFile(f"{path}: frame_index must run 0, 1, 2, ...")
    if start[0] != 0.0:
        raise MalformedTraceFile(f"{path}: frames must start at 0.0 s")
    if len(body) == 1:
        return score, None
    native_len = int(round((start[1] - start[0]) * sample_rate))
    if native_len <= 0:
        raise MalformedTraceFile(f"{path}: frame starts are not increasing")
    expected = np.arange(len(body)) * native_len / sample_rate
    # tolerate decimal rounding in the file, up to a hundredth of a sample
    if np.max(np.abs(start - expected)) * sample_rate > 0.01:
        raise MalformedTraceFile(f"{path}: frames are not contiguous at a fixed size")
    return score, native_len


def fold_frames(frame_scores, native_len, grid):
    """Average native frames onto grid windows.

    A window takes the frames whose start lies inside it, truncated to
    ``window_len // native_len`` frames.
    """
    if native_len > grid.window_len:
        raise NativeLargerThanWindow(
            f"native frame of {native_len} samples exceeds window of {grid.window_len}"
        )
    per = grid.window_len // native_len
    first = -(-grid.starts // native_len)  # ceil division
    need = int(first[-1]) + per
    if len(frame_scores) < need:
        raise FrameCountMismatch(
            f"grid needs {need} native frames, trace has {len(frame_scores)}"
        )
    idx = first[:, None] + np.arange(per)[None, :]
    sub = np.asarray(frame_scores, dtype=np.float64)[idx]
    return np.clip(sub.mean(axis=1), sub.min(axis=1), sub.max(axis=1))


def import_trace(path, grid, engine_id=None, source_id=None, native_ms=None):
    path = Path(path)
    frames, native_len = read_frame_scores(path, grid.sample_rate)
    if native_ms is not None:
        declared = samples_per_window(native_ms, grid.sample_rate)
        if native_len is not None and native_len != declared:
            raise MalformedTraceFile(
                f"{path}: frames are {native_len} samples, expected {declared}"
            )
        native_len = declared
    if native_len is None:
        raise MalformedTraceFile(f"{path}: one frame is not enough to infer the frame size")
    scores = fold_frames(frames, native_len, grid)
    if engine_id is None or source_id is None:
        # <source>.<engine>.trace.csv
        parts = path.name.split(".")
        if source_id is None:
            source_id = parts[0]
        if engine_id is None:
            engine_id = parts[1] if len(parts) >= 4 else "external"
    return PredictionTrace(engine_id, grid.window_size_ms, scores, source_id)


def write_frame_scores(path, scores, native_ms):
    """Write a native-frame trace CSV (the format :func:`import_trace` reads)."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        for i, s in enumerate(scores):
            w.writerow((i, repr(round(i * native_ms / 1000.0, 9)), repr(float(s))))
