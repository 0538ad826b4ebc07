"""Link metrics and the moving-average trend line."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .audio_io import AudioSignal
from .phy_tx import BitStream

DEFAULT_TREND_WINDOW = 10


class FramingError(ValueError):
    """Transmitted and received payloads differ in length (sync lost, not bit errors)."""


@dataclass
class LinkReport:
    snr_db: float
    mse: float
    distance_m: float
    ber: float | None = None
    psnr_db: float | None = None
    bits_total: int = 0
    bit_errors: int = 0

    def __post_init__(self):
        if self.mse < 0:
            raise ValueError("mse must be non-negative")
        if self.bits_total > 0 and self.ber is not None:
            if self.ber != self.bit_errors / self.bits_total:
                raise ValueError("ber must equal bit_errors / bits_total")


def moving_average(series, window: int = DEFAULT_TREND_WINDOW) -> np.ndarray:
    """Trailing mean over ``window`` samples.

    The first ``window - 1`` outputs average the available prefix, so the
    output has the same length as the input. Each output is the direct sum
    of its own window divided once, so integer input is exact and
    ``window=1`` returns the input unchanged.
    """
    if int(window) != window or window < 1:
        raise ValueError("window must be an integer >= 1")
    window = int(window)
    x = np.asarray(series)
    if x.size == 0:
        return np.zeros(0)
    x = x.astype(np.int64 if np.issubdtype(x.dtype, np.integer) else np.float64)
    sums = np.convolve(x, np.ones(window, dtype=x.dtype))[: x.size]
    counts = np.minimum(np.arange(1, x.size + 1), window)
    return sums / counts


def snr_db(clean, noisy) -> float:
    """``10 log10(sum(clean**2) / sum((noisy - clean)**2))``; ``inf`` for a perfect copy."""
    clean = np.asarray(clean, dtype=np.float64)
    noisy = np.asarray(noisy, dtype=np.float64)
    if clean.shape != noisy.shape:
        raise ValueError(f"length mismatch: {clean.size} vs {noisy.size}")
    signal = np.sum(clean**2)
    if signal == 0:
        raise ValueError("clean signal is all zero")
    err = np.sum((noisy - clean) ** 2)
    if err == 0:
        return math.inf
    return 10.0 * math.log10(signal / err)


def ber(tx: BitStream, rx: BitStream) -> float:
    a, b = tx.payload, rx.payload
    if a.size != b.size:
        raise FramingError(f"payload length mismatch: sent {a.size} bits, received {b.size}")
    if a.size == 0:
        return 0.0
    return int(np.count_nonzero(a != b)) / a.size


def mse(reference: AudioSignal, test: AudioSignal) -> float:
    if len(reference) != len(test):
        raise ValueError(f"length mismatch: {len(reference)} vs {len(test)}")
    if reference.sample_rate_hz != test.sample_rate_hz:
        raise ValueError("sample rate mismatch")
    return float(np.mean((test.samples - reference.samples) ** 2))


def psnr_db(reference: AudioSignal, test: AudioSignal) -> float:
    """PSNR against a full-scale peak of 1.0 (not the 2.0 peak-to-peak)."""
    err = mse(reference, test)
    if err == 0:
        return math.inf
    return 10.0 * math.log10(1.0 / err)


def threshold_detect(signal, threshold: float) -> np.ndarray:
    """Comparator output like the KY-038 digital pin: 1 strictly above ``threshold``."""
    return (np.asarray(signal) > threshold).astype(np.uint8)
