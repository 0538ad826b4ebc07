"""Audio signals: WAV reading/writing, test tones and peak normalization.

Everything inside the simulator is mono float64 in nominal [-1, 1].
"""

from __future__ import annotations

import os
import struct
import wave
from dataclasses import dataclass

import numpy as np

DEFAULT_SAMPLE_RATE_HZ = 8000

_WAVE_FORMAT_PCM = 0x0001
_WAVE_FORMAT_IEEE_FLOAT = 0x0003
_WAVE_FORMAT_EXTENSIBLE = 0xFFFE


class WavFormatError(ValueError):
    """Malformed or unsupported WAV data, with the byte offset where it was found."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


@dataclass(frozen=True)
class AudioSignal:
    """Sampled mono audio.

    Parameters
    ----------
    sample_rate_hz : int
        Samples per second, at least 1.
    samples : np.ndarray
        Real amplitudes, nominally within [-1, 1].
    """

    sample_rate_hz: int
    samples: np.ndarray

    def __post_init__(self):
        if int(self.sample_rate_hz) != self.sample_rate_hz or self.sample_rate_hz < 1:
            raise ValueError("sample_rate_hz must be a positive integer")
        samples = np.asarray(self.samples, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(samples)):
            raise ValueError("audio samples must be finite")
        object.__setattr__(self, "sample_rate_hz", int(self.sample_rate_hz))
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate_hz


def _decode_frames(raw: bytes, fmt: int, bits: int, channels: int, offset: int) -> np.ndarray:
    width = bits // 8
    n_frames = len(raw) // (width * channels)
    raw = raw[: n_frames * width * channels]
    if fmt == _WAVE_FORMAT_IEEE_FLOAT:
        if bits == 32:
            data = np.frombuffer(raw, dtype="<f4").astype(np.float64)
        elif bits == 64:
            data = np.frombuffer(raw, dtype="<f8").copy()
        else:
            raise WavFormatError(f"unsupported float sample width {bits}", offset)
    elif bits == 8:
        # 8-bit WAV is unsigned with a 128 midpoint
        data = (np.frombuffer(raw, dtype=np.uint8).astype(np.float64) - 128.0) / 128.0
    elif bits == 16:
        data = np.frombuffer(raw, dtype="<i2") / 32768.0
    elif bits == 24:
        b = np.frombuffer(raw, dtype=np.uint8).reshape(-1, 3).astype(np.int32)
        ints = b[:, 0] | (b[:, 1] << 8) | (b[:, 2] << 16)
        ints = np.where(ints & 0x800000, ints - (1 << 24), ints)
        data = ints / float(1 << 23)
    elif bits == 32:
        data = np.frombuffer(raw, dtype="<i4") / float(1 << 31)
    else:
        raise WavFormatError(f"unsupported PCM sample width {bits}", offset)
    return data.reshape(-1, channels).mean(axis=1)


def read_wav(path) -> AudioSignal:
    """Read a PCM or float WAV file as a mono :class:`AudioSignal`.

    Integer formats are scaled by their full-scale value (32768 for 16 bit)
    and multichannel files are downmixed by the channel mean.

    Raises
    ------
    FileNotFoundError
        If ``path`` does not exist.
    WavFormatError
        For truncated, compressed or otherwise unsupported files.
    """
    with open(path, "rb") as fh:
        blob = fh.read()

    if len(blob) < 12:
        raise WavFormatError("truncated header", len(blob))
    if blob[0:4] != b"RIFF":
        raise WavFormatError("not a RIFF file", 0)
    if blob[8:12] != b"WAVE":
        raise WavFormatError("RIFF form type is not WAVE", 8)

    fmt_info = None
    pos = 12
    while True:
        if pos + 8 > len(blob):
            raise WavFormatError("truncated header: no data chunk", pos)
        chunk_id = blob[pos : pos + 4]
        (size,) = struct.unpack_from("<I", blob, pos + 4)
        body = pos + 8
        if chunk_id == b"fmt ":
            if size < 16 or body + 16 > len(blob):
                raise WavFormatError("truncated header: short fmt chunk", body)
            fmt, channels, rate, _, _, bits = struct.unpack_from("<HHIIHH", blob, body)
            if fmt == _WAVE_FORMAT_EXTENSIBLE:
                if size < 40 or body + 26 > len(blob):
                    raise WavFormatError("truncated header: short extensible fmt chunk", body)
                (fmt,) = struct.unpack_from("<H", blob, body + 24)
            if fmt not in (_WAVE_FORMAT_PCM, _WAVE_FORMAT_IEEE_FLOAT):
                raise WavFormatError(f"unsupported (non-PCM) format tag 0x{fmt:04x}", body)
            if channels < 1 or rate < 1 or bits % 8:
                raise WavFormatError("invalid fmt chunk fields", body)
            fmt_info = (fmt, channels, rate, bits, body)
        elif chunk_id == b"data":
            if fmt_info is None:
                raise WavFormatError("data chunk before fmt chunk", pos)
            fmt, channels, rate, bits, fmt_offset = fmt_info
            if body + size > len(blob):
                raise WavFormatError(
                    f"truncated data chunk: {size} bytes declared, {len(blob) - body} present",
                    len(blob),
                )
            samples = _decode_frames(blob[body : body + size], fmt, bits, channels, fmt_offset)
            return AudioSignal(rate, samples)
        pos = body + size + (size & 1)


def write_wav(signal: AudioSignal, path) -> None:
    """Write ``signal`` as 16-bit PCM mono with a canonical 44-byte header.

    Samples are clamped to [-1, 1]; +1.0 saturates at 32767.
    """
    pcm = np.clip(np.round(np.clip(signal.samples, -1.0, 1.0) * 32768.0), -32768, 32767)
    with open(os.fspath(path), "wb") as fh, wave.open(fh, "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(signal.sample_rate_hz)
        wf.writeframes(pcm.astype("<i2").tobytes())


def generate_tone(
    freq_hz: float,
    duration_s: float,
    sample_rate_hz: int = DEFAULT_SAMPLE_RATE_HZ,
    amplitude: float = 1.0,
) -> AudioSignal:
    """Sine test tone ``amplitude * sin(2*pi*f*n/fs)`` starting at phase zero."""
    if freq_hz <= 0:
        raise ValueError("freq_hz must be positive")
    if freq_hz >= sample_rate_hz / 2:
        raise ValueError(
            f"freq_hz={freq_hz} is at or above Nyquist ({sample_rate_hz / 2} Hz)"
        )
    if duration_s <= 0:
        raise ValueError("duration_s must be positive")
    if not 0.0 <= amplitude <= 1.0:
        raise ValueError("amplitude must lie in [0, 1]")
    n = np.arange(int(round(duration_s * sample_rate_hz)))
    return AudioSignal(sample_rate_hz, amplitude * np.sin(2 * np.pi * freq_hz * n / sample_rate_hz))


def normalize(signal: AudioSignal) -> AudioSignal:
    """Scale so the peak magnitude is exactly 1; silence passes through."""
    if len(signal) == 0:
        raise ValueError("cannot normalize an empty signal")
    peak = np.max(np.abs(signal.samples))
    if peak == 0:
        return signal
    return AudioSignal(signal.sample_rate_hz, signal.samples / peak)
