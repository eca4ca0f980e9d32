import pytest
from hypothesis import given
from hypothesis import strategies as st

from vadwindow.errors import (
    ClipShorterThanWindow,
    NativeLargerThanWindow,
    NonIntegralWindow,
    WindowTooLarge,
    WindowTooSmall,
)
from vadwindow.framing import SWEEP_WINDOWS_MS, WindowSpan, make_grid, subdivide


def test_exact_grid():
    g = make_grid(16000, 100, 16000)
    assert g.count == 10
    assert all(s.length == 1600 for s in g.spans)


def test_tail_dropped():
    g = make_grid(16800, 100, 16000)
    assert g.count == 10
    assert g.covered_len == 16000
    assert g.clip_len_samples - g.covered_len == 800


def test_clip_shorter_than_window():
    with pytest.raises(ClipShorterThanWindow):
        make_grid(1599, 100, 16000)


@pytest.mark.parametrize("w, exc", [(9, WindowTooSmall), (10001, WindowTooLarge)])
def test_window_bounds(w, exc):
    with pytest.raises(exc):
        make_grid(10**6, w, 16000)


def test_non_integral_window():
    with pytest.raises(NonIntegralWindow):
        make_grid(10**6, 10.03, 16000)


def test_sweep_set_spans_range():
    assert SWEEP_WINDOWS_MS[0] == 10 and SWEEP_WINDOWS_MS[-1] == 10000
    for w in SWEEP_WINDOWS_MS:
        make_grid(160000, w, 16000)


def test_subdivide_exact():
    subs = subdivide(WindowSpan(0, 1600, 0), 10, 16000)
    assert len(subs) == 10
    assert all(s.length == 160 for s in subs)


def test_subdivide_silero_remainder():
    span = WindowSpan(3200, 4800, 2)
    subs = subdivide(span, 16, 16000)
    assert len(subs) == 6
    assert subs[0].start_sample == 3200
    assert subs[-1].end_sample == 3200 + 6 * 256
    assert span.end_sample - subs[-1].end_sample == 64


def test_subdivide_identity():
    span = WindowSpan(160, 320, 1)
    assert subdivide(span, 10, 16000) == [span]


def test_subdivide_native_too_large():
    with pytest.raises(NativeLargerThanWindow):
        subdivide(WindowSpan(0, 160, 0), 16, 16000)


@given(
    clip_len=st.integers(16000, 400_000),
    w=st.sampled_from([10, 16, 20, 25, 50, 100, 160, 1000]),
)
def test_grid_invariants(clip_len, w):
    g = make_grid(clip_len, w, 16000)
    spans = g.spans
    assert sum(s.length for s in spans) == g.count * g.window_len
    assert spans[0].start_sample == 0
    for a, b in zip(spans, spans[1:]):
        assert a.end_sample == b.start_sample
    assert g.covered_len <= clip_len < g.covered_len + g.window_len
    assert make_grid(clip_len, w, 16000) == g


@given(
    start=st.integers(0, 10**6),
    window=st.sampled_from([160, 320, 800, 1600, 16000]),
    native=st.sampled_from([10, 16, 20, 30]),
)
def test_subdivide_properties(start, window, native):
    span = WindowSpan(start, start + window, 0)
    n = native * 16
    if n > window:
        return
    subs = subdivide(span, native, 16000)
    assert len(subs) == window // n
    assert subs[0].start_sample == start
    for a, b in zip(subs, subs[1:]):
        assert a.end_sample == b.start_sample
    assert subs[-1].end_sample <= span.end_sample
