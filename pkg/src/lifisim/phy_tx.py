"""LED transmitter: analog intensity modulation and on-off keying.

Two paths turn audio into LED drive:

* AIM - the audio swings the LED brightness linearly around a DC bias.
* OOK - the audio is PCM-quantized and each bit switches the LED between a
  high and a low level, NRZ or Manchester line-coded behind a preamble.

Intensities are normalized so that 1.0 is the LED peak optical power.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .audio_io import AudioSignal

DEFAULT_PREAMBLE = (1, 0) * 8


class LineCode(enum.Enum):
    NRZ = "nrz"
    MANCHESTER = "manchester"


@dataclass(frozen=True)
class OpticalWaveform:
    """Non-negative optical power samples.

    The transmitter never emits more than 1.0, but light arriving at the
    detector (ambient plus noise) may exceed it, so only non-negativity is
    enforced here.
    """

    sample_rate_hz: int
    intensity: np.ndarray

    def __post_init__(self):
        if int(self.sample_rate_hz) != self.sample_rate_hz or self.sample_rate_hz < 1:
            raise ValueError("sample_rate_hz must be a positive integer")
        intensity = np.asarray(self.intensity, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(intensity)):
            raise ValueError("optical intensity must be finite")
        if np.any(intensity < 0):
            raise ValueError("optical intensity cannot be negative")
        object.__setattr__(self, "sample_rate_hz", int(self.sample_rate_hz))
        object.__setattr__(self, "intensity", intensity)

    def __len__(self) -> int:
        return self.intensity.size


@dataclass(frozen=True)
class AimConfig:
    """LED quiescent drive ``dc_bias`` and the fraction of it swung by full-scale audio."""

    dc_bias: float = 0.5
    modulation_index: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.dc_bias < 1.0:
            raise ValueError("dc_bias must lie in (0, 1)")
        if not 0.0 < self.modulation_index <= 1.0:
            raise ValueError("modulation_index must lie in (0, 1]")


@dataclass(frozen=True)
class BitStream:
    """Binary payload. ``payload`` is the first ``payload_bit_count`` bits."""

    bits: np.ndarray
    payload_bit_count: int | None = None

    def __post_init__(self):
        bits = np.asarray(self.bits).reshape(-1)
        if bits.size and not np.all((bits == 0) | (bits == 1)):
            raise ValueError("bits must be 0 or 1")
        bits = bits.astype(np.uint8)
        count = bits.size if self.payload_bit_count is None else int(self.payload_bit_count)
        if not 0 <= count <= bits.size:
            raise ValueError("payload_bit_count must lie in [0, len(bits)]")
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "payload_bit_count", count)

    @property
    def payload(self) -> np.ndarray:
        return self.bits[: self.payload_bit_count]

    def __len__(self) -> int:
        return self.bits.size


@dataclass(frozen=True)
class OokConfig:
    samples_per_symbol: int = 8
    high_level: float = 1.0
    low_level: float = 0.0
    line_code: LineCode = LineCode.NRZ
    preamble: tuple = field(default=DEFAULT_PREAMBLE)

    def __post_init__(self):
        if int(self.samples_per_symbol) != self.samples_per_symbol or self.samples_per_symbol < 2:
            raise ValueError("samples_per_symbol must be an integer >= 2")
        if not 0.0 < self.high_level <= 1.0:
            raise ValueError("high_level must lie in (0, 1]")
        if not 0.0 <= self.low_level < self.high_level:
            raise ValueError("low_level must lie in [0, high_level)")
        preamble = tuple(int(b) for b in self.preamble)
        if any(b not in (0, 1) for b in preamble):
            raise ValueError("preamble must be a 0/1 pattern")
        object.__setattr__(self, "preamble", preamble)
        object.__setattr__(self, "line_code", LineCode(self.line_code))

    @property
    def frame_overhead_samples(self) -> int:
        return len(self.preamble) * self.samples_per_symbol


def aim_modulate(audio: AudioSignal, cfg: AimConfig) -> OpticalWaveform:
    """LED intensity ``clip(bias * (1 + m * x), 0, 1)``."""
    x = audio.samples
    if x.size and np.max(np.abs(x)) > 1.0:
        raise ValueError("AIM input must lie in [-1, 1]; normalize first")
    intensity = np.clip(cfg.dc_bias * (1.0 + cfg.modulation_index * x), 0.0, 1.0)
    return OpticalWaveform(audio.sample_rate_hz, intensity)


def aim_invert(tx: OpticalWaveform, cfg: AimConfig) -> AudioSignal:
    """Undo :func:`aim_modulate` (exact only when nothing was clipped)."""
    x = (tx.intensity / cfg.dc_bias - 1.0) / cfg.modulation_index
    return AudioSignal(tx.sample_rate_hz, x)


def _pcm_full_scale(bits_per_sample: int) -> int:
    if bits_per_sample not in (8, 16):
        raise ValueError(f"unsupported bits_per_sample {bits_per_sample}; use 8 or 16")
    return (1 << (bits_per_sample - 1)) - 1


def pcm_encode(audio: AudioSignal, bits_per_sample: int = 8) -> BitStream:
    """Mid-tread two's-complement quantization, serialized MSB first.

    Full scale is +/-(2**(b-1) - 1); ties round away from zero.
    """
    full_scale = _pcm_full_scale(bits_per_sample)
    x = audio.samples
    if x.size and np.max(np.abs(x)) > 1.0:
        raise ValueError("PCM input must lie in [-1, 1]")
    scaled = x * full_scale
    q = (np.sign(scaled) * np.floor(np.abs(scaled) + 0.5)).astype(np.int64)
    unsigned = q & ((1 << bits_per_sample) - 1)
    shifts = np.arange(bits_per_sample - 1, -1, -1)
    bits = (unsigned[:, None] >> shifts) & 1
    return BitStream(bits.reshape(-1), x.size * bits_per_sample)


def pcm_decode(bits: BitStream, bits_per_sample: int = 8, sample_rate_hz: int = 8000) -> AudioSignal:
    """Inverse of :func:`pcm_encode`; a trailing partial word is dropped."""
    full_scale = _pcm_full_scale(bits_per_sample)
    payload = bits.payload
    n = payload.size // bits_per_sample
    words = payload[: n * bits_per_sample].reshape(n, bits_per_sample).astype(np.int64)
    unsigned = words @ (1 << np.arange(bits_per_sample - 1, -1, -1))
    signed = np.where(unsigned >= 1 << (bits_per_sample - 1), unsigned - (1 << bits_per_sample), unsigned)
    # -2**(b-1) is never produced by the encoder but a corrupted word can decode to it
    return AudioSignal(sample_rate_hz, np.clip(signed / full_scale, -1.0, 1.0))


def line_code_symbols(bits: np.ndarray, cfg: OokConfig) -> np.ndarray:
    """Expand bits into per-sample 0/1 LED states, one symbol per bit."""
    bits = np.asarray(bits, dtype=np.uint8)
    sps = cfg.samples_per_symbol
    if cfg.line_code is LineCode.NRZ:
        return np.repeat(bits, sps)
    half = sps // 2
    # 1 -> high then low, 0 -> low then high
    shape = np.concatenate([np.ones(half, np.uint8), np.zeros(sps - half, np.uint8)])
    chips = np.where(bits[:, None] == 1, shape, 1 - shape)
    return chips.reshape(-1)


def ook_modulate(bits: BitStream, cfg: OokConfig, sample_rate_hz: int) -> OpticalWaveform:
    """Preamble followed by every bit of ``bits``, one symbol of ``samples_per_symbol`` each."""
    if len(bits) == 0:
        raise ValueError("nothing to modulate: empty bit stream")
    frame = np.concatenate([np.asarray(cfg.preamble, dtype=np.uint8), bits.bits])
    states = line_code_symbols(frame, cfg)
    intensity = np.where(states == 1, cfg.high_level, cfg.low_level)
    return OpticalWaveform(sample_rate_hz, intensity)
