"""Line-of-sight optical channel from LED to solar panel.

The link is a Lambertian LED facing a detector of area ``detector_area_m2``
behind a concentrator, followed by the LED's own first-order bandwidth
limit, a DC ambient term and additive white Gaussian noise. All noise in the
simulator is injected here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .phy_tx import OokConfig, OpticalWaveform

_U64 = np.uint64
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class ChannelConfig:
    """Physical link parameters.

    The defaults are a calibration, not a measurement: a 25 cm^2 panel
    behind a 3x concentrator and a noise floor picked so that the default
    OOK link stays below 1e-3 BER out to 10 m.
    """

    distance_m: float = 1.0
    lambertian_order: float = 1.0
    emit_angle_deg: float = 0.0
    incidence_angle_deg: float = 0.0
    detector_area_m2: float = 25e-4
    concentrator_gain: float = 3.0
    led_bandwidth_hz: float = 1e6
    ambient_level: float = 0.0
    noise_std: float = 4e-6
    rng_seed: int = 0

    def __post_init__(self):
        if not self.distance_m > 0:
            raise ValueError("distance_m must be positive")
        if not self.lambertian_order >= 1:
            raise ValueError("lambertian_order must be >= 1")
        if not 0 <= self.emit_angle_deg < 90:
            raise ValueError("emit_angle_deg must lie in [0, 90)")
        if not 0 <= self.incidence_angle_deg < 90:
            raise ValueError("incidence_angle_deg must lie in [0, 90)")
        if not self.detector_area_m2 > 0:
            raise ValueError("detector_area_m2 must be positive")
        if not self.concentrator_gain >= 1:
            raise ValueError("concentrator_gain must be >= 1")
        if not self.led_bandwidth_hz > 0:
            raise ValueError("led_bandwidth_hz must be positive")
        if not self.ambient_level >= 0:
            raise ValueError("ambient_level must be >= 0")
        if not self.noise_std >= 0:
            raise ValueError("noise_std must be >= 0")
        if int(self.rng_seed) != self.rng_seed or not 0 <= self.rng_seed <= _MASK64:
            raise ValueError("rng_seed must be an unsigned 64-bit integer")


def lambertian_order_from_half_angle(half_power_angle_deg: float) -> float:
    """``-ln 2 / ln cos(theta_half)``; 60 degrees gives order 1."""
    return -math.log(2.0) / math.log(math.cos(math.radians(half_power_angle_deg)))


def los_gain(cfg: ChannelConfig) -> float:
    """DC gain of the line-of-sight path, including the concentrator."""
    if cfg.emit_angle_deg >= 90 or cfg.incidence_angle_deg >= 90:
        return 0.0
    m = cfg.lambertian_order
    cos_phi = math.cos(math.radians(cfg.emit_angle_deg))
    cos_psi = math.cos(math.radians(cfg.incidence_angle_deg))
    return (
        cfg.concentrator_gain
        * cfg.detector_area_m2
        * (m + 1)
        / (2 * math.pi * cfg.distance_m**2)
        * cos_phi**m
        * cos_psi
    )


def lowpass_alpha(cutoff_hz: float, sample_rate_hz: float) -> float:
    rc = 1.0 / (2 * math.pi * cutoff_hz)
    dt = 1.0 / sample_rate_hz
    return dt / (rc + dt)


def lowpass_first_order(samples, cutoff_hz: float, sample_rate_hz: int) -> np.ndarray:
    """Single-pole RC low-pass ``y[n] = y[n-1] + a*(x[n] - y[n-1])``.

    The state is warm-started at ``x[0]`` so a constant input passes through
    with no start-up transient.
    """
    if not cutoff_hz > 0:
        raise ValueError("cutoff_hz must be positive")
    x = np.asarray(samples, dtype=np.float64)
    if x.size == 0:
        return x.copy()
    a = lowpass_alpha(cutoff_hz, sample_rate_hz)
    y, _ = lfilter([a], [1.0, a - 1.0], x, zi=[(1.0 - a) * x[0]])
    return y


def _splitmix64(z: np.ndarray) -> np.ndarray:
    z = z + _U64(0x9E3779B97F4A7C15)
    z = (z ^ (z >> _U64(30))) * _U64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> _U64(27))) * _U64(0x94D049BB133111EB)
    return z ^ (z >> _U64(31))


def gaussian_noise(seed: int, start: int, count: int) -> np.ndarray:
    """Standard normal deviates for sample indices ``start .. start+count-1``.

    Each deviate is a pure function of ``(seed, index)`` (counter-based
    splitmix64 hashing plus Box-Muller), so a waveform processed in chunks
    sees exactly the noise it would see in one piece.
    """
    key = _splitmix64(np.array([seed & _MASK64], dtype=_U64))[0]
    idx = np.arange(start, start + count, dtype=_U64)
    with np.errstate(over="ignore"):
        h1 = _splitmix64((idx * _U64(2)) ^ key)
        h2 = _splitmix64((idx * _U64(2) + _U64(1)) ^ key)
    # 53-bit uniforms on the open interval (0, 1)
    u1 = ((h1 >> _U64(11)).astype(np.float64) + 0.5) * 2.0**-53
    u2 = ((h2 >> _U64(11)).astype(np.float64) + 0.5) * 2.0**-53
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


def propagate(tx: OpticalWaveform, cfg: ChannelConfig, start_index: int = 0) -> OpticalWaveform:
    """Light reaching the detector.

    ``max(0, H * lowpass(tx) + ambient + noise)``. ``start_index`` offsets
    the noise counter for chunked processing.
    """
    shaped = lowpass_first_order(tx.intensity, cfg.led_bandwidth_hz, tx.sample_rate_hz)
    rx = los_gain(cfg) * shaped + cfg.ambient_level
    if cfg.noise_std > 0:
        rx = rx + cfg.noise_std * gaussian_noise(cfg.rng_seed, start_index, rx.size)
    return OpticalWaveform(tx.sample_rate_hz, np.maximum(rx, 0.0))


def ook_snr_db(cfg: ChannelConfig, ook: OokConfig) -> float:
    """Detector-side OOK SNR ``(H*(high-low))**2 / (4*sigma**2)`` in dB.

    With ideal filtering the bit error rate is ``Q(sqrt(snr))``.
    """
    gap = los_gain(cfg) * (ook.high_level - ook.low_level)
    if cfg.noise_std == 0:
        return math.inf
    if gap == 0:
        return -math.inf
    return 20.0 * math.log10(gap / (2.0 * cfg.noise_std))
