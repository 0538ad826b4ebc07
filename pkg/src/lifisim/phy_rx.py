"""Solar-panel receiver chain.

photodetect -> dc_block -> amplify for the audio path, plus the OOK
demodulator and the Arduino-style ADC used for captures.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import correlate, lfilter

from .audio_io import AudioSignal
from .channel import lowpass_first_order
from .phy_tx import AimConfig, BitStream, LineCode, OokConfig, OpticalWaveform, line_code_symbols


class ThresholdMode(enum.Enum):
    FIXED = "fixed"
    ADAPTIVE = "adaptive"


class CaptureOrigin(enum.Enum):
    SIMULATED = "simulated"
    SERIAL_IMPORT = "serial_import"


class PreambleNotFound(RuntimeError):
    """The demodulator could not synchronize to the preamble."""


@dataclass(frozen=True)
class ReceiverConfig:
    """Panel, amplifier and ADC parameters.

    Amplifier defaults (24 dB, +/-2.5 V rail) are representative class-D
    figures for a PAM8403 board; the 10-bit / 5 V ADC matches an Arduino
    analog input.
    """

    responsivity: float = 100.0
    panel_cutoff_hz: float = 100e3
    dc_block_pole: float = 0.9995
    amp_gain_db: float = 24.0
    amp_rail: float = 2.5
    adc_bits: int = 10
    adc_vref: float = 5.0
    threshold_mode: ThresholdMode = ThresholdMode.ADAPTIVE
    fixed_threshold: float = 0.0

    def __post_init__(self):
        if not self.responsivity > 0:
            raise ValueError("responsivity must be positive")
        if not self.panel_cutoff_hz > 0:
            raise ValueError("panel_cutoff_hz must be positive")
        if not 0 < self.dc_block_pole < 1:
            raise ValueError("dc_block_pole must lie in (0, 1)")
        if not self.amp_rail > 0:
            raise ValueError("amp_rail must be positive")
        if int(self.adc_bits) != self.adc_bits or not 1 <= self.adc_bits <= 24:
            raise ValueError("adc_bits must be an integer in [1, 24]")
        if not self.adc_vref > 0:
            raise ValueError("adc_vref must be positive")
        object.__setattr__(self, "threshold_mode", ThresholdMode(self.threshold_mode))

    @property
    def amp_linear_gain(self) -> float:
        return 10.0 ** (self.amp_gain_db / 20.0)


@dataclass
class CaptureSeries:
    """Integer ADC counts, simulated or imported from a serial dump."""

    counts: np.ndarray
    adc_bits: int = 10
    origin: CaptureOrigin = CaptureOrigin.SIMULATED
    malformed_lines: int = 0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64).reshape(-1)
        top = (1 << self.adc_bits) - 1
        if counts.size and (counts.min() < 0 or counts.max() > top):
            raise ValueError(f"ADC counts must lie in [0, {top}]")
        self.counts = counts
        self.origin = CaptureOrigin(self.origin)

    def __len__(self) -> int:
        return self.counts.size


def photodetect(rx_light: OpticalWaveform, cfg: ReceiverConfig) -> AudioSignal:
    """Panel voltage: responsivity times light, through the panel's RC pole."""
    v = lowpass_first_order(cfg.responsivity * rx_light.intensity, cfg.panel_cutoff_hz, rx_light.sample_rate_hz)
    return AudioSignal(rx_light.sample_rate_hz, v)


def dc_block(v: AudioSignal, cfg: ReceiverConfig) -> AudioSignal:
    """``y[n] = v[n] - v[n-1] + p*y[n-1]`` with ``v[-1] = v[0]`` and ``y[-1] = 0``."""
    x = v.samples
    if x.size == 0:
        return v
    p = cfg.dc_block_pole
    y, _ = lfilter([1.0, -1.0], [1.0, -p], x, zi=[-x[0]])
    return AudioSignal(v.sample_rate_hz, y)


def amplify(v: AudioSignal, cfg: ReceiverConfig) -> AudioSignal:
    """Ideal gain with hard clipping at the supply rail."""
    y = np.clip(v.samples * cfg.amp_linear_gain, -cfg.amp_rail, cfg.amp_rail)
    return AudioSignal(v.sample_rate_hz, y)


def aim_demodulate(v: AudioSignal, aim: AimConfig, link_gain: float, rcfg: ReceiverConfig) -> AudioSignal:
    """Recover audio from the panel voltage of an AIM link.

    ``link_gain`` is channel gain times responsivity, known to the
    simulator; no AGC is attempted.
    """
    if not link_gain > 0:
        raise ValueError("link_gain must be positive")
    ac = dc_block(v, rcfg).samples
    x_hat = ac / (link_gain * aim.dc_bias * aim.modulation_index)
    return AudioSignal(v.sample_rate_hz, np.clip(x_hat, -1.0, 1.0))


def _preamble_template(cfg: OokConfig) -> np.ndarray:
    chips = line_code_symbols(np.asarray(cfg.preamble, dtype=np.uint8), cfg).astype(np.float64)
    return chips - chips.mean()


def _normalized_xcorr(x: np.ndarray, template: np.ndarray) -> np.ndarray:
    """Pearson correlation of ``template`` against every window of ``x``."""
    n = template.size
    t_norm = np.linalg.norm(template)
    # centering keeps the running sums below from cancelling catastrophically
    x = x - x.mean()
    num = correlate(x, template, mode="valid")
    c1 = np.concatenate([[0.0], np.cumsum(x)])
    c2 = np.concatenate([[0.0], np.cumsum(x * x)])
    s1 = c1[n:] - c1[:-n]
    s2 = c2[n:] - c2[:-n]
    var = np.maximum(s2 - s1 * s1 / n, 0.0)
    den = np.sqrt(var) * t_norm
    # flat windows (and cumsum round-off on them) carry no timing information
    flat = var <= 1e-12 * np.maximum(s2, 1e-300)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(flat | (den == 0), 0.0, num / den)
    return r


def find_preamble(x: np.ndarray, cfg: OokConfig, min_peak: float = 0.5) -> int:
    """Sample index where the preamble starts.

    Periodic preambles correlate just as well one period later when the
    payload happens to continue the pattern, so the earliest lag within 90 %
    of the global peak is taken and then refined to its local maximum.
    """
    if not cfg.preamble:
        return 0
    template = _preamble_template(cfg)
    if x.size < template.size:
        raise PreambleNotFound("preamble not found: waveform shorter than the preamble")
    r = _normalized_xcorr(x, template)
    peak = float(r.max())
    if peak < min_peak:
        raise PreambleNotFound(f"preamble not found (correlation peak {peak:.3f} < {min_peak})")
    first = int(np.argmax(r >= 0.9 * peak))
    stop = min(first + cfg.samples_per_symbol, r.size)
    return first + int(np.argmax(r[first:stop]))


def adaptive_threshold(preamble_span: np.ndarray) -> float:
    """Midpoint between the mean of the upper and lower halves of the span."""
    ordered = np.sort(preamble_span)
    half = ordered.size // 2
    return 0.5 * (ordered[:half].mean() + ordered[-half:].mean())


def ook_demodulate(
    v: AudioSignal,
    cfg: OokConfig,
    rcfg: ReceiverConfig,
    payload_bits: int | None = None,
) -> BitStream:
    """Synchronize on the preamble and slice the payload symbols.

    NRZ symbols are decided on their center sample against the adaptive (or
    fixed) threshold; Manchester symbols by comparing half-symbol means.
    Without ``payload_bits`` every complete symbol after the preamble is
    returned.

    Raises
    ------
    PreambleNotFound
        If the correlation peak is below half the ideal value.
    """
    x = v.samples
    sps = cfg.samples_per_symbol
    start = find_preamble(x, cfg)
    data_start = start + cfg.frame_overhead_samples
    # a symbol is decidable once its center sample exists; filter delay can
    # push the final symbol's tail past the end of the capture
    available = max(0, (x.size - data_start - sps // 2 - 1) // sps + 1)
    n = available if payload_bits is None else min(payload_bits, available)
    span = x[data_start : data_start + n * sps]
    if span.size < n * sps:
        span = np.pad(span, (0, n * sps - span.size), mode="edge")
    symbols = span.reshape(n, sps)

    if cfg.line_code is LineCode.NRZ:
        if rcfg.threshold_mode is ThresholdMode.FIXED:
            threshold = rcfg.fixed_threshold
        elif cfg.preamble:
            threshold = adaptive_threshold(x[start:data_start])
        else:
            threshold = adaptive_threshold(x)
        bits = symbols[:, sps // 2] > threshold
    else:
        half = sps // 2
        bits = symbols[:, :half].mean(axis=1) > symbols[:, half:].mean(axis=1)
    return BitStream(bits.astype(np.uint8))


def adc_quantize(v: AudioSignal, rcfg: ReceiverConfig) -> CaptureSeries:
    """Unipolar ADC, ties rounded away from zero, clamped to the code range."""
    top = (1 << rcfg.adc_bits) - 1
    scaled = v.samples / rcfg.adc_vref * top
    counts = np.clip(np.floor(scaled + 0.5), 0, top).astype(np.int64)
    return CaptureSeries(counts, rcfg.adc_bits, CaptureOrigin.SIMULATED)
