import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vadwindow.audio import (
    AudioClip,
    clip_duration_seconds,
    decode_wav_bytes,
    encode_pcm,
    load_wav,
    write_wav,
)
from vadwindow.errors import EmptyAudio, IoFailure, NotRiffWav, UnsupportedFormat


def riff(fmt_body, pcm, extra_chunks=b""):
    fmt = b"fmt " + struct.pack("<I", len(fmt_body)) + fmt_body
    data = b"data" + struct.pack("<I", len(pcm)) + pcm
    body = b"WAVE" + fmt + extra_chunks + data
    return b"RIFF" + struct.pack("<I", len(body)) + body


def pcm_fmt(channels=1, rate=16000, bits=16, tag=1):
    align = channels * bits // 8
    return struct.pack("<HHIIHH", tag, channels, rate, rate * align, align, bits)


def extensible_fmt(subformat_tag=1):
    guid = struct.pack("<H", subformat_tag) + bytes.fromhex("000000001000800000aa00389b71")
    return pcm_fmt(tag=0xFFFE) + struct.pack("<HHI", 22, 16, 4) + guid


def test_one_second_file(tmp_path):
    x = (np.arange(16000) % 200 - 100).astype(np.int16)
    write_wav(tmp_path / "a.wav", x)
    clip = load_wav(tmp_path / "a.wav")
    assert len(clip.samples) == 16000
    assert clip.sample_rate == 16000
    assert clip.source_id == "a"
    np.testing.assert_array_equal(clip.samples, x)


def test_stereo_rejected():
    data = riff(pcm_fmt(channels=2), b"\x00" * 64)
    with pytest.raises(UnsupportedFormat, match="channels"):
        decode_wav_bytes(data)


def test_44k_rejected():
    data = riff(pcm_fmt(rate=44100), b"\x00" * 64)
    with pytest.raises(UnsupportedFormat, match="44100"):
        decode_wav_bytes(data)


@pytest.mark.parametrize("bits", [8, 24, 32])
def test_other_bit_depths_rejected(bits):
    with pytest.raises(UnsupportedFormat):
        decode_wav_bytes(riff(pcm_fmt(bits=bits), b"\x00" * 48))


def test_float_and_compressed_rejected():
    with pytest.raises(UnsupportedFormat):
        decode_wav_bytes(riff(pcm_fmt(tag=3, bits=16), b"\x00" * 8))
    with pytest.raises(UnsupportedFormat):
        decode_wav_bytes(riff(pcm_fmt(tag=0x55), b"\x00" * 8))


def test_extensible_pcm_accepted():
    pcm = np.array([1, -2, 3], dtype="<i2").tobytes()
    clip = decode_wav_bytes(riff(extensible_fmt(), pcm))
    assert clip.samples.tolist() == [1, -2, 3]


def test_extensible_non_pcm_rejected():
    with pytest.raises(UnsupportedFormat):
        decode_wav_bytes(riff(extensible_fmt(subformat_tag=3), b"\x00" * 8))


def test_unknown_chunks_skipped_with_padding():
    junk = b"LIST" + struct.pack("<I", 3) + b"abc" + b"\x00"
    pcm = np.array([7, 8], dtype="<i2").tobytes()
    clip = decode_wav_bytes(riff(pcm_fmt(), pcm, extra_chunks=junk))
    assert clip.samples.tolist() == [7, 8]


@pytest.mark.parametrize(
    "data",
    [b"", b"RIFX" + b"\x00" * 40, b"RIFF\x00\x00\x00\x00AVI " + b"\x00" * 40],
)
def test_bad_magic(data):
    with pytest.raises(NotRiffWav):
        decode_wav_bytes(data)


def test_missing_data_chunk():
    body = b"WAVE" + b"fmt " + struct.pack("<I", 16) + pcm_fmt()
    with pytest.raises(NotRiffWav, match="data"):
        decode_wav_bytes(b"RIFF" + struct.pack("<I", len(body)) + body)


def test_empty_data_chunk():
    with pytest.raises(EmptyAudio):
        decode_wav_bytes(riff(pcm_fmt(), b""))


def test_missing_file(tmp_path):
    with pytest.raises(IoFailure):
        load_wav(tmp_path / "nope.wav")


def test_too_long_rejected(monkeypatch):
    import vadwindow.audio as audio

    monkeypatch.setattr(audio, "MAX_DURATION_S", 0.001)
    with pytest.raises(UnsupportedFormat, match="longer"):
        decode_wav_bytes(riff(pcm_fmt(), b"\x00" * 200))


@pytest.mark.parametrize("n, expected", [(16000, 1.0), (8000, 0.5), (16800, 1.05)])
def test_clip_duration(n, expected):
    clip = AudioClip(np.zeros(n, dtype=np.int16), 16000, "x")
    assert clip_duration_seconds(clip) == expected


def test_clip_is_immutable():
    clip = AudioClip(np.zeros(4, dtype=np.int16), 16000, "x")
    with pytest.raises(ValueError):
        clip.samples[0] = 1


def test_clip_rejects_out_of_range():
    with pytest.raises(UnsupportedFormat):
        AudioClip(np.array([40000]), 16000, "x")


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(-32768, 32767), min_size=1, max_size=400))
def test_decode_is_lossless(values):
    pcm = np.array(values, dtype="<i2").tobytes()
    data = riff(pcm_fmt(), pcm)
    a = decode_wav_bytes(data)
    b = decode_wav_bytes(data)
    assert encode_pcm(a.samples) == pcm
    np.testing.assert_array_equal(a.samples, b.samples)
