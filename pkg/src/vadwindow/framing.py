"""Non-overlapping analysis windows and model-native subwindows."""

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .errors import (
    ClipShorterThanWindow,
    NativeLargerThanWindow,
    NonIntegralWindow,
    WindowTooLarge,
    WindowTooSmall,
)

MIN_WINDOW_MS = 10
MAX_WINDOW_MS = 10_000
SWEEP_WINDOWS_MS = (10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000)


class WindowSpan(NamedTuple):
    start_sample: int  # inclusive
    end_sample: int  # exclusive
    index: int

    @property
    def length(self):
        return self.end_sample - self.start_sample


def samples_per_window(window_ms, sample_rate):
    """Integral sample count of a ``window_ms`` window, or NonIntegralWindow."""
    n = Fraction(window_ms).limit_denominator(10**6) * sample_rate / 1000
    if n.denominator != 1 or n <= 0:
        raise NonIntegralWindow(
            f"{window_ms} ms at {sample_rate} Hz is not a whole number of samples"
        )
    return int(n)


@dataclass(frozen=True)
class WindowGrid:
    window_size_ms: float
    sample_rate: int
    clip_len_samples: int
    window_len: int
    count: int

    @property
    def starts(self):
        return np.arange(self.count, dtype=np.int64) * self.window_len

    @property
    def covered_len(self):
        return self.count * self.window_len

    @property
    def spans(self):
        w = self.window_len
        return [WindowSpan(i * w, (i + 1) * w, i) for i in range(self.count)]

    def span(self, i):
        if not 0 <= i < self.count:
            raise IndexError(i)
        return WindowSpan(i * self.window_len, (i + 1) * self.window_len, i)

    def __len__(self):
        return self.count


def make_grid(clip_len_samples, window_size_ms, sample_rate):
    """Full windows of ``window_size_ms`` from sample 0; a short tail is dropped."""
    if window_size_ms < MIN_WINDOW_MS:
        raise WindowTooSmall(f"window {window_size_ms} ms is below {MIN_WINDOW_MS} ms")
    if window_size_ms > MAX_WINDOW_MS:
        raise WindowTooLarge(f"window {window_size_ms} ms exceeds {MAX_WINDOW_MS} ms")
    w = samples_per_window(window_size_ms, sample_rate)
    count = clip_len_samples // w
    if count == 0:
        raise ClipShorterThanWindow(
            f"clip of {clip_len_samples} samples holds no full {window_size_ms} ms window"
        )
    return WindowGrid(
        window_size_ms=window_size_ms,
        sample_rate=sample_rate,
        clip_len_samples=int(clip_len_samples),
        window_len=w,
        count=int(count),
    )


def subdivide(span, native_ms, sample_rate):
    """Contiguous native-size subwindows from the start of ``span``.

    Whatever does not fill a whole subwindow at the end of the span is dropped.
    """
    n = samples_per_window(native_ms, sample_rate)
    if n > span.length:
        raise NativeLargerThanWindow(
            f"native {native_ms} ms ({n} samples) exceeds window of {span.length} samples"
        )
    if n == span.length:
        return [span]
    return [
        WindowSpan(span.start_sample + k * n, span.start_sample + (k + 1) * n, k)
        for k in range(span.length // n)
    ]


def subwindow_starts(grid, native_len):
    """All subwindow starts of a grid, shape ``(windows, subwindows_per_window)``."""
    if native_len > grid.window_len:
        raise NativeLargerThanWindow(
            f"native {native_len} samples exceeds window of {grid.window_len} samples"
        )
    per = grid.window_len // native_len
    return grid.starts[:, None] + np.arange(per, dtype=np.int64)[None, :] * native_len
