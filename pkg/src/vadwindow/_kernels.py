"""Hot loops, in a numba flavour and a pure-numpy flavour.

The numba path is used when numba imports cleanly and the environment
variable ``VADWINDOW_DISABLE_NUMBA`` is unset (or ``0``).  Both flavours
are always importable by name (``*_numpy`` / ``*_numba``) so tests and the
benchmark can compare them directly.

Kernels:

* ``block_mean_square`` -- mean of squared int16 samples per fixed-length block
* ``hysteresis_scan`` -- two-threshold gate over one score sequence
* ``hysteresis_confusion`` -- pooled confusion counts for many (low, high)
  pairs over several independently gated clips
"""

import os

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False


def _numba_requested():
    flag = os.environ.get("VADWINDOW_DISABLE_NUMBA", "").strip().lower()
    return flag in ("", "0", "false", "no")


USE_NUMBA = HAVE_NUMBA and _numba_requested()


# ---------------------------------------------------------------------------
# numpy flavour
# ---------------------------------------------------------------------------


def block_mean_square_numpy(samples, starts, length):
    if len(starts) == 0:
        return np.zeros(0, dtype=np.float64)
    idx = starts[:, None] + np.arange(length, dtype=np.int64)[None, :]
    block = samples[idx].astype(np.float64)
    # integer squares are exact in float64 up to 2**53
    return np.sum(block * block, axis=1) / length


def hysteresis_scan_numpy(scores, low, high):
    # ON event at score >= high, OFF event at score < low; with low <= high the
    # two are exclusive, so the state is whatever the most recent event said.
    n = len(scores)
    if n == 0:
        return np.zeros(0, dtype=np.bool_)
    on = scores >= high
    off = scores < low
    pos = np.arange(n)
    last = np.maximum.accumulate(np.where(on | off, pos, -1))
    seen = last >= 0
    out = np.zeros(n, dtype=np.bool_)
    out[seen] = on[last[seen]]
    return out


def _segmented_hysteresis_numpy(scores, clip_start, low, high):
    n = len(scores)
    on = scores >= high
    off = scores < low
    pos = np.arange(n)
    last = np.maximum.accumulate(np.where(on | off, pos, -1))
    # an event from an earlier clip must not leak into this one
    live = last >= clip_start
    out = np.zeros(n, dtype=np.bool_)
    out[live] = on[last[live]]
    return out


def hysteresis_confusion_numpy(scores, labels, offsets, lows, highs):
    n = len(scores)
    counts = np.zeros((len(lows), 4), dtype=np.int64)
    if n == 0:
        return counts
    clip_id = np.repeat(np.arange(len(offsets) - 1), np.diff(offsets))
    clip_start = offsets[:-1][clip_id]
    pos_total = int(np.count_nonzero(labels))
    neg_total = n - pos_total
    for k in range(len(lows)):
        dec = _segmented_hysteresis_numpy(scores, clip_start, lows[k], highs[k])
        tp = int(np.count_nonzero(dec & labels))
        fp = int(np.count_nonzero(dec)) - tp
        counts[k, 0] = tp
        counts[k, 1] = fp
        counts[k, 2] = neg_total - fp
        counts[k, 3] = pos_total - tp
    return counts


# ---------------------------------------------------------------------------
# numba flavour
# ---------------------------------------------------------------------------

if HAVE_NUMBA:

    @numba.njit(cache=True)
    def block_mean_square_numba(samples, starts, length):
        out = np.empty(len(starts), dtype=np.float64)
        for b in range(len(starts)):
            s = starts[b]
            acc = 0.0
            for i in range(s, s + length):
                v = float(samples[i])
                acc += v * v
            out[b] = acc / length
        return out

    @numba.njit(cache=True)
    def hysteresis_scan_numba(scores, low, high):
        out = np.empty(len(scores), dtype=np.bool_)
        state = False
        for i in range(len(scores)):
            x = scores[i]
            if state:
                if x < low:
                    state = False
            elif x >= high:
                state = True
            out[i] = state
        return out

    @numba.njit(cache=True)
    def hysteresis_confusion_numba(scores, labels, offsets, lows, highs):
        counts = np.zeros((len(lows), 4), dtype=np.int64)
        for k in range(len(lows)):
            low = lows[k]
            high = highs[k]
            tp = 0
            fp = 0
            tn = 0
            fn = 0
            for c in range(len(offsets) - 1):
                state = False
                for i in range(offsets[c], offsets[c + 1]):
                    x = scores[i]
                    if state:
                        if x < low:
                            state = False
                    elif x >= high:
                        state = True
                    if state:
                        if labels[i]:
                            tp += 1
                        else:
                            fp += 1
                    elif labels[i]:
                        fn += 1
                    else:
                        tn += 1
            counts[k, 0] = tp
            counts[k, 1] = fp
            counts[k, 2] = tn
            counts[k, 3] = fn
        return counts

else:  # pragma: no cover
    block_mean_square_numba = None
    hysteresis_scan_numba = None
    hysteresis_confusion_numba = None


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------


def block_mean_square(samples, starts, length):
    """Mean of squares of ``samples[s:s+length]`` for every ``s`` in ``starts``."""
    samples = np.ascontiguousarray(samples, dtype=np.int16)
    starts = np.ascontiguousarray(starts, dtype=np.int64)
    if USE_NUMBA:
        return block_mean_square_numba(samples, starts, int(length))
    return block_mean_square_numpy(samples, starts, int(length))


def hysteresis_scan(scores, low, high):
    scores = np.ascontiguousarray(scores, dtype=np.float64)
    if USE_NUMBA:
        return hysteresis_scan_numba(scores, float(low), float(high))
    return hysteresis_scan_numpy(scores, float(low), float(high))


def hysteresis_confusion(scores, labels, offsets, lows, highs):
    """Rows of ``(tp, fp, tn, fn)``, one per ``(lows[k], highs[k])`` pair.

    ``offsets`` delimits the clips inside the concatenated ``scores``; the
    gate restarts OFF at every clip boundary.
    """
    scores = np.ascontiguousarray(scores, dtype=np.float64)
    labels = np.ascontiguousarray(labels, dtype=np.bool_)
    offsets = np.ascontiguousarray(offsets, dtype=np.int64)
    lows = np.ascontiguousarray(lows, dtype=np.float64)
    highs = np.ascontiguousarray(highs, dtype=np.float64)
    if USE_NUMBA:
        return hysteresis_confusion_numba(scores, labels, offsets, lows, highs)
    return hysteresis_confusion_numpy(scores, labels, offsets, lows, highs)


def backend():
    return "numba" if USE_NUMBA else "numpy"
