import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lifisim.audio_io import (
    AudioSignal,
    WavFormatError,
    generate_tone,
    normalize,
    read_wav,
    write_wav,
)


def _wav_bytes(payload: bytes, *, fmt=1, channels=1, rate=8000, bits=16, data_size=None):
    block = channels * bits // 8
    fmt_chunk = struct.pack("<4sIHHIIHH", b"fmt ", 16, fmt, channels, rate, rate * block, block, bits)
    size = len(payload) if data_size is None else data_size
    data_chunk = struct.pack("<4sI", b"data", size) + payload
    body = b"WAVE" + fmt_chunk + data_chunk
    return b"RIFF" + struct.pack("<I", len(body)) + body


def _write(tmp_path, blob, name="x.wav"):
    p = tmp_path / name
    p.write_bytes(blob)
    return p


def test_read_16bit_full_scale(tmp_path):
    p = _write(tmp_path, _wav_bytes(struct.pack("<h", 32767)))
    sig = read_wav(p)
    assert sig.sample_rate_hz == 8000
    np.testing.assert_array_equal(sig.samples, [32767 / 32768])


def test_read_stereo_downmix(tmp_path):
    p = _write(tmp_path, _wav_bytes(struct.pack("<hh", 16384, -16384), channels=2))
    np.testing.assert_array_equal(read_wav(p).samples, [0.0])


def test_read_empty_file(tmp_path):
    p = _write(tmp_path, b"")
    with pytest.raises(WavFormatError, match="truncated header") as info:
        read_wav(p)
    assert info.value.offset == 0


def test_read_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        read_wav(tmp_path / "nope.wav")


def test_read_truncated_data_reports_offset(tmp_path):
    blob = _wav_bytes(struct.pack("<hh", 1, 2), data_size=100)
    p = _write(tmp_path, blob)
    with pytest.raises(WavFormatError, match="truncated data") as info:
        read_wav(p)
    assert info.value.offset == len(blob)


def test_read_rejects_compressed(tmp_path):
    # 0x0011 is IMA ADPCM
    p = _write(tmp_path, _wav_bytes(b"\x00" * 4, fmt=0x11, bits=4 * 4))
    with pytest.raises(WavFormatError, match="non-PCM") as info:
        read_wav(p)
    assert info.value.offset == 20


@pytest.mark.parametrize(
    "bits, payload, expected",
    [
        (8, bytes([255, 128, 0]), [127 / 128, 0.0, -1.0]),
        (24, (0x400000).to_bytes(3, "little") + (0xC00000).to_bytes(3, "little"), [0.5, -0.5]),
    ],
)
def test_read_other_int_depths(tmp_path, bits, payload, expected):
    p = _write(tmp_path, _wav_bytes(payload, bits=bits))
    np.testing.assert_allclose(read_wav(p).samples, expected)


def test_read_float32(tmp_path):
    p = _write(tmp_path, _wav_bytes(np.array([0.25, -0.75], "<f4").tobytes(), fmt=3, bits=32))
    np.testing.assert_array_equal(read_wav(p).samples, [0.25, -0.75])


def test_read_skips_unknown_chunks(tmp_path):
    blob = _wav_bytes(struct.pack("<h", 16384))
    # splice a LIST chunk (odd size, padded) between RIFF header and fmt
    extra = b"LIST" + struct.pack("<I", 3) + b"abc\x00"
    blob = blob[:12] + extra + blob[12:]
    blob = blob[:4] + struct.pack("<I", len(blob) - 8) + blob[8:]
    np.testing.assert_array_equal(read_wav(_write(tmp_path, blob)).samples, [0.5])


def test_write_zero_and_clamp(tmp_path):
    p = tmp_path / "z.wav"
    write_wav(AudioSignal(8000, [0.0, 2.0, -2.0]), p)
    blob = p.read_bytes()
    assert len(blob) == 44 + 6
    assert struct.unpack("<hhh", blob[44:]) == (0, 32767, -32768)


def test_write_read_round_trip_random(tmp_path):
    rng = np.random.default_rng(7)
    sig = AudioSignal(8000, rng.uniform(-1, 1, 1000))
    p = tmp_path / "r.wav"
    write_wav(sig, p)
    back = read_wav(p)
    assert back.sample_rate_hz == 8000
    # brute-force comparison, sample by sample
    worst = max(abs(a - b) for a, b in zip(sig.samples.tolist(), back.samples.tolist()))
    assert worst <= 1 / 32768


@settings(max_examples=30, deadline=None)
@given(arrays(np.float64, st.integers(1, 200), elements=st.floats(-1, 1)))
def test_round_trip_property(tmp_path_factory, samples):
    p = tmp_path_factory.mktemp("rt") / "p.wav"
    write_wav(AudioSignal(16000, samples), p)
    assert np.max(np.abs(read_wav(p).samples - samples)) <= 1 / 32768


def test_write_unwritable_path(tmp_path):
    with pytest.raises(OSError):
        write_wav(AudioSignal(8000, [0.0]), tmp_path / "missing-dir" / "x.wav")


def test_tone_definition():
    tone = generate_tone(1000, 1.0, 8000, 1.0)
    assert len(tone) == 8000
    assert tone.samples[0] == 0.0
    assert tone.samples[2] == pytest.approx(1.0, abs=1e-15)


def test_tone_zero_amplitude():
    assert not np.any(generate_tone(440, 0.1, 8000, 0.0).samples)


@pytest.mark.parametrize("freq", [4000, 5000])
def test_tone_nyquist_rejected(freq):
    with pytest.raises(ValueError, match="Nyquist"):
        generate_tone(freq, 1.0, 8000)


def test_tone_zero_frequency_rejected():
    with pytest.raises(ValueError):
        generate_tone(0, 1.0, 8000)


@pytest.mark.parametrize("freq, amp", [(440.0, 0.3), (1000.0, 1.0), (3100.0, 0.7)])
def test_tone_rms(freq, amp):
    tone = generate_tone(freq, 200 / freq, 8000, amp)
    rms = np.sqrt(np.mean(tone.samples**2))
    assert rms == pytest.approx(amp / np.sqrt(2), rel=0.01)


def test_normalize_examples():
    np.testing.assert_array_equal(normalize(AudioSignal(8000, [0.5, -0.25])).samples, [1.0, -0.5])
    np.testing.assert_array_equal(normalize(AudioSignal(8000, [0, 0, 0])).samples, [0, 0, 0])
    with pytest.raises(ValueError):
        normalize(AudioSignal(8000, []))


@given(arrays(np.float64, st.integers(1, 100), elements=st.floats(-1e3, 1e3)))
def test_normalize_idempotent_and_keeps_argmax(samples):
    sig = AudioSignal(8000, samples)
    once = normalize(sig)
    np.testing.assert_array_equal(normalize(once).samples, once.samples)
    if np.any(samples):
        assert np.argmax(np.abs(once.samples)) == np.argmax(np.abs(samples))
        assert np.max(np.abs(once.samples)) == 1.0


def test_audio_signal_rejects_nonfinite():
    with pytest.raises(ValueError):
        AudioSignal(8000, [0.0, np.nan])
    with pytest.raises(ValueError):
        AudioSignal(0, [0.0])
