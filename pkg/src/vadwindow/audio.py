"""WAV loading for 16 kHz mono 16-bit PCM clips."""

import struct
import wave
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import EmptyAudio, IoFailure, NotRiffWav, UnsupportedFormat

SAMPLE_RATE = 16000
MAX_DURATION_S = 2 * 3600

WAVE_FORMAT_PCM = 0x0001
WAVE_FORMAT_EXTENSIBLE = 0xFFFE
# first two bytes of KSDATAFORMAT_SUBTYPE_PCM; the rest is the fixed GUID tail
_PCM_SUBTYPE_TAIL = bytes.fromhex("000000001000800000aa00389b71")


@dataclass(frozen=True)
class AudioClip:
    samples: np.ndarray  # int16, read-only
    sample_rate: int
    source_id: str

    def __post_init__(self):
        samples = np.asarray(self.samples)
        if samples.ndim != 1:
            raise UnsupportedFormat(f"{self.source_id}: samples must be one-dimensional")
        if samples.size == 0:
            raise EmptyAudio(f"{self.source_id}: no samples")
        if samples.dtype != np.int16:
            if not np.issubdtype(samples.dtype, np.integer):
                raise UnsupportedFormat(f"{self.source_id}: samples must be integers")
            if samples.min() < -32768 or samples.max() > 32767:
                raise UnsupportedFormat(f"{self.source_id}: sample outside int16 range")
            samples = samples.astype(np.int16)
        if self.sample_rate != SAMPLE_RATE:
            raise UnsupportedFormat(
                f"{self.source_id}: sample rate {self.sample_rate} Hz, expected {SAMPLE_RATE}"
            )
        if samples.flags.writeable:
            samples = samples.copy()
            samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    def __len__(self):
        return len(self.samples)

    @property
    def duration_seconds(self):
        return clip_duration_seconds(self)


def clip_duration_seconds(clip):
    return len(clip.samples) / clip.sample_rate


def _chunks(data):
    """Yield ``(chunk_id, offset, size)`` for each RIFF sub-chunk."""
    pos = 12
    end = len(data)
    while pos + 8 <= end:
        cid, size = struct.unpack_from("<4sI", data, pos)
        body = pos + 8
        yield cid, body, min(size, end - body)
        pos = body + size + (size & 1)


def _parse_fmt(body, where):
    if len(body) < 16:
        raise NotRiffWav(f"{where}: fmt chunk too short")
    tag, channels, rate, _, block_align, bits = struct.unpack_from("<HHIIHH", body, 0)
    if tag == WAVE_FORMAT_EXTENSIBLE:
        if len(body) < 40:
            raise NotRiffWav(f"{where}: truncated WAVE_FORMAT_EXTENSIBLE header")
        subformat = body[24:40]
        if struct.unpack_from("<H", subformat, 0)[0] != WAVE_FORMAT_PCM or subformat[2:] != _PCM_SUBTYPE_TAIL:
            raise UnsupportedFormat(f"{where}: extensible subformat is not PCM")
    elif tag != WAVE_FORMAT_PCM:
        raise UnsupportedFormat(f"{where}: format tag 0x{tag:04x} is not PCM")
    if bits != 16 or block_align != 2 * channels:
        raise UnsupportedFormat(f"{where}: {bits}-bit audio, expected 16-bit PCM")
    if channels != 1:
        raise UnsupportedFormat(f"{where}: {channels} channels, expected mono")
    if rate != SAMPLE_RATE:
        raise UnsupportedFormat(f"{where}: {rate} Hz, expected {SAMPLE_RATE} Hz")


def decode_wav_bytes(data, source_id="<bytes>"):
    """Decode an in-memory RIFF/WAVE image into an :class:`AudioClip`."""
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise NotRiffWav(f"{source_id}: missing RIFF/WAVE header")
    fmt_seen = False
    pcm = None
    for cid, off, size in _chunks(data):
        if cid == b"fmt ":
            _parse_fmt(data[off:off + size], source_id)
            fmt_seen = True
        elif cid == b"data":
            if not fmt_seen:
                raise NotRiffWav(f"{source_id}: data chunk before fmt chunk")
            pcm = data[off:off + size]
            break
    if not fmt_seen:
        raise NotRiffWav(f"{source_id}: no fmt chunk")
    if pcm is None:
        raise NotRiffWav(f"{source_id}: no data chunk")
    n = len(pcm) // 2
    if n == 0:
        raise EmptyAudio(f"{source_id}: data chunk holds no samples")
    if n > MAX_DURATION_S * SAMPLE_RATE:
        raise UnsupportedFormat(f"{source_id}: longer than {MAX_DURATION_S // 3600} hours")
    samples = np.frombuffer(pcm[: 2 * n], dtype="<i2").astype(np.int16)
    return AudioClip(samples=samples, sample_rate=SAMPLE_RATE, source_id=source_id)


def load_wav(path):
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise IoFailure(f"{path}: {exc.strerror or exc}") from exc
    return decode_wav_bytes(data, source_id=path.stem)


def encode_pcm(samples):
    """Little-endian PCM-16 bytes of ``samples`` (the WAV data chunk body)."""
    return np.asarray(samples, dtype=np.int16).astype("<i2").tobytes()


def write_wav(path, samples, sample_rate=SAMPLE_RATE):
    with wave.open(str(path), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(sample_rate)
        w.writeframes(encode_pcm(samples))
