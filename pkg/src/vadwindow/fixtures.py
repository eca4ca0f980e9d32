"""Synthetic clips with known speech segments.

Randomness comes from SplitMix64 (Steele, Lea & Flood 2014) so fixtures are
reproducible from the seed alone, on any platform and in any language:

    state_i = seed + (i + 1) * 0x9E3779B97F4A7C15          (mod 2**64)
    z = (state_i ^ (state_i >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    out_i = z ^ (z >> 31)

Noise ("white_noise" bursts and the floor everywhere) is random-sign noise
with per-block exact power: each 10 ms block of a region gets magnitudes
``floor(a)`` or ``floor(a) + 1`` (``a`` = target RMS in sample units),
with as many of the larger ones as fit without exceeding ``a**2`` mean
power.  Block RMS therefore sits at or just below the requested level.
"""

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .audio import SAMPLE_RATE, AudioClip, write_wav
from .errors import InvalidSpec
from .labels import SegmentLabels, normalize_segments, write_labels

GOLDEN = 0x9E3779B97F4A7C15
MASK64 = (1 << 64) - 1
BLOCK_MS = 10
TONE_HZ = 440.0
WAVEFORMS = ("white_noise", "tone")
# loudest sine RMS that fits int16 without clipping
MAX_TONE_DBFS = 20.0 * math.log10(32767.0 / (32768.0 * math.sqrt(2.0)))

# stream tags keep the per-sample draws of different uses independent
_SIGN, _PLACE, _PHASE = 1, 2, 3


def splitmix64(seed, counters):
    """Vectorised SplitMix64 outputs for the given 0-based counters."""
    c = np.asarray(counters, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed & MASK64) + (c + np.uint64(1)) * np.uint64(GOLDEN)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        z = z ^ (z >> np.uint64(31))
    return z


def _stream_seed(seed, tag):
    return int(splitmix64(seed ^ (tag * 0x632BE59BD9B4E019), [0])[0])


class SplitMix64:
    """Sequential scalar SplitMix64 for layout decisions."""

    def __init__(self, seed):
        self.seed = int(seed) & MASK64
        self.i = 0

    def next_u64(self):
        out = int(splitmix64(self.seed, [self.i])[0])
        self.i += 1
        return out

    def uniform(self):
        return (self.next_u64() >> 11) / float(1 << 53)

    def below(self, n):
        return int(self.uniform() * n)

    def shuffle(self, items):
        items = list(items)
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
        return items


@dataclass(frozen=True)
class FixtureSpec:
    duration_seconds: float
    speech_bursts: tuple = ()  # ((start_s, end_s, level_dbfs), ...)
    noise_floor_dbfs: float = -80.0
    seed: int = 0
    waveform: str = "white_noise"

    def __post_init__(self):
        if not self.duration_seconds > 0:
            raise InvalidSpec("duration must be positive")
        if self.waveform not in WAVEFORMS:
            raise InvalidSpec(f"waveform must be one of {WAVEFORMS}")
        if self.noise_floor_dbfs > 0:
            raise InvalidSpec("noise floor must be <= 0 dBFS")
        bursts = tuple(sorted((float(s), float(e), float(l)) for s, e, l in self.speech_bursts))
        for s, e, level in bursts:
            if not 0 <= s < e <= self.duration_seconds:
                raise InvalidSpec(f"burst ({s}, {e}) outside [0, {self.duration_seconds}]")
            if level > 0:
                raise InvalidSpec(f"burst level {level} dBFS above full scale")
            if self.waveform == "tone" and level > MAX_TONE_DBFS:
                raise InvalidSpec(f"tone level {level} dBFS would clip (max {MAX_TONE_DBFS:.3f})")
        for (_, e0, _), (s1, _, _) in zip(bursts, bursts[1:]):
            if s1 < e0:
                raise InvalidSpec(f"bursts overlap at {s1} s")
        object.__setattr__(self, "speech_bursts", bursts)


def _amplitude(level_dbfs):
    return 32768.0 * 10.0 ** (level_dbfs / 20.0)


def _exact_power_noise(n, level_dbfs, seed, offset):
    """Random-sign noise over ``n`` samples; ``offset`` indexes the draws."""
    out = np.zeros(n, dtype=np.int16)
    a = _amplitude(level_dbfs)
    if n == 0 or a <= 0:
        return out
    f = min(int(math.floor(a)), 32767)
    block = SAMPLE_RATE * BLOCK_MS // 1000
    idx = np.arange(n, dtype=np.uint64) + np.uint64(offset)
    signs = np.where(splitmix64(_stream_seed(seed, _SIGN), idx) >> np.uint64(63), -1, 1)
    keys = splitmix64(_stream_seed(seed, _PLACE), idx)
    mags = np.full(n, f, dtype=np.int64)
    if f < 32767:
        step = (f + 1) ** 2 - f**2
        for b0 in range(0, n, block):
            m = min(block, n - b0)
            budget = m * a * a - m * f * f
            k = min(m, max(0, int(math.floor(budget / step + 1e-9))))
            if k:
                pick = np.argsort(keys[b0:b0 + m], kind="stable")[:k]
                mags[b0 + pick] = f + 1
    out[:] = signs * mags
    return out


def _tone(n, level_dbfs, seed, offset):
    a = _amplitude(level_dbfs) * math.sqrt(2.0)
    phase = 2.0 * math.pi * (int(splitmix64(_stream_seed(seed, _PHASE), [0])[0]) >> 11) / float(1 << 53)
    t = (np.arange(n) + offset) / SAMPLE_RATE
    x = np.rint(a * np.sin(2.0 * math.pi * TONE_HZ * t + phase))
    return np.clip(x, -32768, 32767).astype(np.int16)


def synthesize(spec, source_id="fixture"):
    """Build ``(AudioClip, SegmentLabels)`` for a spec, deterministically."""
    n = int(round(spec.duration_seconds * SAMPLE_RATE))
    samples = np.empty(n, dtype=np.int16)
    edges = [
        (int(round(s * SAMPLE_RATE)), int(round(e * SAMPLE_RATE)), level)
        for s, e, level in spec.speech_bursts
    ]
    pos = 0
    for b0, b1, level in edges + [(n, n, None)]:
        if b0 > pos:
            samples[pos:b0] = _exact_power_noise(b0 - pos, spec.noise_floor_dbfs, spec.seed, pos)
        if level is not None and b1 > b0:
            make = _tone if spec.waveform == "tone" else _exact_power_noise
            samples[b0:b1] = make(b1 - b0, level, spec.seed, b0)
        pos = max(pos, b1)
    clip = AudioClip(samples=samples, sample_rate=SAMPLE_RATE, source_id=source_id)
    labels = SegmentLabels(
        normalize_segments([(b0 / SAMPLE_RATE, b1 / SAMPLE_RATE) for b0, b1, _ in edges]),
        source_id,
    )
    return clip, labels


def clustered_spec(
    duration_s,
    burst_ms,
    prevalence,
    seed,
    burst_dbfs=(-40.0, -20.0),
    floor_dbfs=(-80.0, -60.0),
    waveform="white_noise",
    block_s=10.0,
    active_fraction=0.75,
):
    """A spec whose bursts fall in some ``block_s`` blocks and leave the rest silent.

    About ``active_fraction`` of the blocks are eligible for bursts; bursts are
    dealt into random slots of those blocks, so speech density varies from
    block to block.  The 10 s default is a multiple of every sweep window,
    so no window straddles two blocks.

    Burst count is ``round(prevalence * duration / burst)``.  Burst edges sit
    on 10 ms boundaries and neighbouring bursts are at least 10 ms apart, so
    the 10 ms-window prevalence equals the requested one whenever that count
    is exact.
    """
    rng = SplitMix64(seed)
    burst_s = burst_ms / 1000.0
    if burst_ms % BLOCK_MS:
        raise InvalidSpec(f"burst length must be a multiple of {BLOCK_MS} ms")
    n_bursts = int(round(prevalence * duration_s / burst_s))
    n_blocks = max(1, int(duration_s // block_s))
    slot_s = 2 * burst_s
    per_block = int(round(min(block_s, duration_s) * 1000)) // int(round(slot_s * 1000))
    capacity_blocks = -(-n_bursts // per_block) if per_block else n_blocks + 1
    if n_bursts and (per_block == 0 or capacity_blocks > n_blocks):
        raise InvalidSpec(f"{n_bursts} bursts of {burst_ms} ms do not fit in {duration_s} s")
    n_active = min(n_blocks, max(int(round(active_fraction * n_blocks)), capacity_blocks)) if n_bursts else 0
    active = sorted(rng.shuffle(range(n_blocks))[:n_active])
    slots = [(b, k) for b in active for k in range(per_block)]
    chosen = sorted(rng.shuffle(slots)[:n_bursts])
    lo_b, hi_b = burst_dbfs
    lo_f, hi_f = floor_dbfs
    floor = round(lo_f + (hi_f - lo_f) * rng.uniform(), 1)
    slack_steps = int(round((slot_s - burst_s) * 1000)) // BLOCK_MS  # keeps a gap >= 10 ms
    bursts = []
    for b, k in chosen:
        start_ms = int(round(b * block_s * 1000)) + k * int(round(slot_s * 1000))
        start_ms += BLOCK_MS * rng.below(slack_steps) if slack_steps > 0 else 0
        level = round(lo_b + (hi_b - lo_b) * rng.uniform(), 1)
        bursts.append((start_ms / 1000.0, (start_ms + burst_ms) / 1000.0, level))
    return FixtureSpec(duration_s, tuple(bursts), floor, seed, waveform)


def dataset_specs(count, duration_s=60.0, burst_ms=200, prevalence=0.2, seed=0, **kwargs):
    return [
        clustered_spec(duration_s, burst_ms, prevalence, seed * 1000 + i, **kwargs)
        for i in range(count)
    ]


def write_fixture(out_dir, name, spec):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    clip, labels = synthesize(spec, source_id=name)
    wav = out_dir / f"{name}.wav"
    lab = out_dir / f"{name}.labels.tsv"
    write_wav(wav, clip.samples)
    write_labels(lab, labels.segments)
    return wav, lab


def write_dataset(out_dir, specs, prefix="clip"):
    return [write_fixture(out_dir, f"{prefix}{i:03d}", spec) for i, spec in enumerate(specs)]
