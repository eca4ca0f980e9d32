import numpy as np
import pytest

from vadwindow.engines import rms_dbfs, rms_vad_score, score_clip_rms
from vadwindow.errors import InvalidSpec
from vadwindow.fixtures import (
    FixtureSpec,
    SplitMix64,
    clustered_spec,
    dataset_specs,
    splitmix64,
    synthesize,
    write_fixture,
)
from vadwindow.audio import load_wav
from vadwindow.framing import make_grid
from vadwindow.labels import parse_labels, prevalence, window_labels


def test_splitmix_reference_values():
    # published SplitMix64 outputs for seed 1234567
    got = [int(v) for v in splitmix64(1234567, range(5))]
    assert got == [
        6457827717110365317,
        3203168211198807973,
        9817491932198370423,
        4593380528125082431,
        16408922859458223821,
    ]
    rng = SplitMix64(1234567)
    assert [rng.next_u64() for _ in range(2)] == got[:2]


def test_one_burst_prevalence():
    spec = FixtureSpec(10.0, ((2.0, 4.0, -20.0),), -80.0, seed=1)
    clip, labels = synthesize(spec)
    assert labels.segments == ((2.0, 4.0),)
    g = make_grid(len(clip), 100, 16000)
    assert prevalence(window_labels(labels, g)) == pytest.approx(0.2)


def test_zero_bursts_floor_scores():
    clip, labels = synthesize(FixtureSpec(5.0, (), -80.0, seed=2))
    assert labels.segments == ()
    tr = score_clip_rms(clip, make_grid(len(clip), 100, 16000), 50)
    assert tr.scores.max() <= 0.2
    assert tr.scores.min() > 0.19


def test_deterministic():
    spec = clustered_spec(20.0, 200, 0.2, seed=9, waveform="tone")
    a, la = synthesize(spec)
    b, lb = synthesize(spec)
    assert a.samples.tobytes() == b.samples.tobytes()
    assert la == lb
    assert clustered_spec(20.0, 200, 0.2, seed=9, waveform="tone") == spec
    c, _ = synthesize(clustered_spec(20.0, 200, 0.2, seed=10, waveform="tone"))
    assert c.samples.tobytes() != a.samples.tobytes()


@pytest.mark.parametrize(
    "waveform, level",
    [(w, l) for w in ("white_noise", "tone") for l in (-60.0, -35.5, -20.0, -6.0, -3.02)]
    + [("white_noise", -0.5), ("white_noise", 0.0)],
)
def test_burst_level_within_half_db(waveform, level):
    spec = FixtureSpec(2.0, ((0.5, 1.23, level),), -80.0, seed=3, waveform=waveform)
    clip, _ = synthesize(spec)
    burst = clip.samples[8000:19680]
    assert abs(rms_dbfs(burst) - level) <= 0.5


def test_labels_consistent_with_audio():
    spec = FixtureSpec(3.0, ((1.0, 2.0, -50.0),), -60.0, seed=4)
    clip, _ = synthesize(spec)
    inside = [rms_vad_score(clip.samples[i:i + 160]) for i in range(16000, 32000, 160)]
    outside = [rms_vad_score(clip.samples[i:i + 160]) for i in range(0, 16000, 160)]
    assert min(inside) > max(outside)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(duration_seconds=0),
        dict(duration_seconds=1.0, speech_bursts=((0.5, 1.5, -20.0),)),
        dict(duration_seconds=2.0, speech_bursts=((0.5, 1.0, 3.0),)),
        dict(duration_seconds=2.0, speech_bursts=((0.5, 1.0, -20.0), (0.8, 1.5, -20.0))),
        dict(duration_seconds=2.0, waveform="pink"),
        dict(duration_seconds=2.0, noise_floor_dbfs=1.0),
        dict(duration_seconds=2.0, speech_bursts=((0.5, 1.0, -1.0),), waveform="tone"),
    ],
)
def test_invalid_specs(kwargs):
    with pytest.raises(InvalidSpec):
        FixtureSpec(**kwargs)


def test_clustered_prevalence_exact():
    for seed in range(3):
        spec = clustered_spec(60.0, 200, 0.4, seed)
        clip, labels = synthesize(spec)
        assert prevalence(window_labels(labels, make_grid(len(clip), 10, 16000))) == pytest.approx(0.4)


def test_clustered_leaves_silent_blocks():
    spec = clustered_spec(60.0, 200, 0.2, seed=5)
    clip, labels = synthesize(spec)
    track = window_labels(labels, make_grid(len(clip), 5000, 16000))
    assert 0 < prevalence(track) < 1


def test_clustered_too_dense():
    with pytest.raises(InvalidSpec):
        clustered_spec(10.0, 200, 0.9, seed=0)


def test_dataset_specs_distinct():
    specs = dataset_specs(3, 20.0, 200, 0.2, seed=1)
    assert len({s.speech_bursts for s in specs}) == 3


def test_written_files_roundtrip(tmp_path):
    spec = clustered_spec(10.0, 100, 0.2, seed=6)
    wav, lab = write_fixture(tmp_path, "f0", spec)
    clip, labels = synthesize(spec, "f0")
    loaded = load_wav(wav)
    np.testing.assert_array_equal(loaded.samples, clip.samples)
    assert parse_labels(lab).segments == labels.segments
