"""Speech segment annotations and per-window speech labels."""

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptyTrack, EndBeforeStart, MalformedLabelFile, NegativeTime

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SegmentLabels:
    segments: tuple  # ((start_s, end_s), ...) sorted, disjoint, half-open
    source_id: str = ""

    @classmethod
    def from_pairs(cls, pairs, source_id=""):
        return cls(normalize_segments(pairs), source_id)

    @property
    def starts(self):
        return np.array([s for s, _ in self.segments], dtype=np.float64)

    @property
    def ends(self):
        return np.array([e for _, e in self.segments], dtype=np.float64)

    @property
    def total_seconds(self):
        return sum(e - s for s, e in self.segments)


@dataclass(frozen=True)
class WindowLabelTrack:
    labels: np.ndarray  # bool, one per window
    window_size_ms: float
    source_id: str = ""
    notes: tuple = field(default=(), compare=False)

    def __len__(self):
        return len(self.labels)


def normalize_segments(pairs):
    """Validate, sort and merge overlapping or touching segments.

    Zero-length segments are dropped: under the half-open convention they
    contain no time.
    """
    cleaned = []
    for start, end in pairs:
        start = float(start)
        end = float(end)
        if start < 0 or end < 0:
            raise NegativeTime(f"segment ({start}, {end}) has a negative time")
        if end < start:
            raise EndBeforeStart(f"segment ends at {end} before it starts at {start}")
        if end > start:
            cleaned.append((start, end))
    cleaned.sort()
    merged = []
    for start, end in cleaned:
        if merged and start <= merged[-1][1]:
            if end > merged[-1][1]:
                merged[-1] = (merged[-1][0], end)
        else:
            merged.append((start, end))
    return tuple(merged)


def parse_label_text(text, source_id="", where="<labels>"):
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip("\r\n")
        # blank lines, comments, and Audacity's "\t<freq>" continuation rows
        if not line.strip() or line.lstrip().startswith(("#", "\\")):
            continue
        fields = line.split("\t")
        if len(fields) < 2:
            raise MalformedLabelFile(f"{where}:{lineno}: expected start<TAB>end[<TAB>text]")
        try:
            start = float(fields[0])
            end = float(fields[1])
        except ValueError as exc:
            raise MalformedLabelFile(f"{where}:{lineno}: {exc}") from exc
        if not (np.isfinite(start) and np.isfinite(end)):
            raise MalformedLabelFile(f"{where}:{lineno}: non-finite time")
        try:
            pairs.append(_checked(start, end))
        except (NegativeTime, EndBeforeStart) as exc:
            raise type(exc)(f"{where}:{lineno}: {exc}") from None
    return SegmentLabels(normalize_segments(pairs), source_id)


def _checked(start, end):
    normalize_segments([(start, end)])
    return start, end


def parse_labels(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise MalformedLabelFile(f"{path}: {exc.strerror or exc}") from exc
    except UnicodeDecodeError as exc:
        raise MalformedLabelFile(f"{path}: not UTF-8") from exc
    source_id = path.name.split(".labels.")[0] if ".labels." in path.name else path.stem
    return parse_label_text(text, source_id=source_id, where=str(path))


def write_labels(path, segments, text="speech"):
    lines = [f"{s!r}\t{e!r}\t{text}\n" for s, e in segments]
    Path(path).write_text("".join(lines), encoding="utf-8")


def clip_to_duration(labels, duration_s):
    """Cut segments at the clip end; returns ``(labels, warning_or_None)``."""
    if not labels.segments or labels.segments[-1][1] <= duration_s:
        return labels, None
    kept = tuple((s, min(e, duration_s)) for s, e in labels.segments if s < duration_s)
    msg = (
        f"{labels.source_id}: labels run to {labels.segments[-1][1]:.3f} s, "
        f"past the audio end at {duration_s:.3f} s; clipped"
    )
    log.warning(msg)
    return SegmentLabels(kept, labels.source_id), msg


def window_labels(segments, grid):
    """Speech iff the window's [start, end) overlaps some segment by nonzero length."""
    notes = ()
    duration = grid.clip_len_samples / grid.sample_rate
    segments, warning = clip_to_duration(segments, duration)
    if warning:
        notes = (warning,)
    w_start = grid.starts / grid.sample_rate
    w_end = (grid.starts + grid.window_len) / grid.sample_rate
    if not segments.segments:
        out = np.zeros(grid.count, dtype=np.bool_)
    else:
        starts = segments.starts
        ends = segments.ends
        # first segment ending strictly after the window start; ends are sorted
        j = np.searchsorted(ends, w_start, side="right")
        hit = j < len(ends)
        out = np.zeros(grid.count, dtype=np.bool_)
        out[hit] = starts[j[hit]] < w_end[hit]
    return WindowLabelTrack(out, grid.window_size_ms, segments.source_id, notes)


def prevalence(track):
    labels = np.asarray(getattr(track, "labels", track), dtype=np.bool_)
    if labels.size == 0:
        raise EmptyTrack("prevalence of an empty label track")
    return np.count_nonzero(labels) / labels.size
