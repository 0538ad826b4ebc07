"""End-to-end link runs: source -> transmitter -> channel -> receiver -> audio."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import analysis
from .analysis import LinkReport
from .audio_io import DEFAULT_SAMPLE_RATE_HZ, AudioSignal
from .channel import ChannelConfig, los_gain, ook_snr_db, propagate
from .phy_rx import (
    CaptureSeries,
    ReceiverConfig,
    adc_quantize,
    aim_demodulate,
    amplify,
    dc_block,
    ook_demodulate,
    photodetect,
)
from .phy_tx import AimConfig, BitStream, OokConfig, aim_modulate, ook_modulate, pcm_decode, pcm_encode


@dataclass(frozen=True)
class LinkSettings:
    mode: str = "aim"
    sample_rate_hz: int = DEFAULT_SAMPLE_RATE_HZ
    bits_per_sample: int = 8
    warmup_s: float = 0.0
    aim: AimConfig = field(default_factory=AimConfig)
    ook: OokConfig = field(default_factory=OokConfig)
    channel: ChannelConfig = field(default_factory=ChannelConfig)
    receiver: ReceiverConfig = field(default_factory=ReceiverConfig)

    def __post_init__(self):
        if self.mode not in ("aim", "ook"):
            raise ValueError("mode must be 'aim' or 'ook'")
        if not self.warmup_s >= 0:
            raise ValueError("warmup_s must be >= 0")

    @property
    def ook_sample_rate_hz(self) -> int:
        """Optical sample rate that carries PCM audio in real time."""
        return self.sample_rate_hz * self.bits_per_sample * self.ook.samples_per_symbol


@dataclass
class LinkResult:
    audio: AudioSignal
    report: LinkReport
    speaker: AudioSignal
    link_gain: float


def _audio_metrics(source: AudioSignal, out: AudioSignal, skip: int) -> tuple[float, float, float]:
    ref = AudioSignal(source.sample_rate_hz, source.samples[skip:])
    test = AudioSignal(out.sample_rate_hz, out.samples[skip:])
    err = analysis.mse(ref, test)
    psnr = analysis.psnr_db(ref, test)
    try:
        snr = analysis.snr_db(ref.samples, test.samples)
    except ValueError:
        snr = math.nan
    return snr, err, psnr


def count_bit_errors(tx: BitStream, rx: BitStream) -> int:
    """Hamming distance over the received prefix; bits never received count as errors."""
    n = min(tx.payload_bit_count, rx.payload_bit_count)
    return int(np.count_nonzero(tx.payload[:n] != rx.payload[:n])) + tx.payload_bit_count - n


def run_aim(source: AudioSignal, settings: LinkSettings) -> LinkResult:
    """Analog intensity modulation; the receiver is told the link gain."""
    ch, rx = settings.channel, settings.receiver
    gain = los_gain(ch) * rx.responsivity
    light = propagate(aim_modulate(source, settings.aim), ch)
    v = photodetect(light, rx)
    audio = aim_demodulate(v, settings.aim, gain, rx)
    speaker = amplify(dc_block(v, rx), rx)
    skip = min(int(round(settings.warmup_s * source.sample_rate_hz)), len(source))
    snr, err, psnr = _audio_metrics(source, audio, skip)
    report = LinkReport(snr_db=snr, mse=err, distance_m=ch.distance_m, psnr_db=psnr)
    return LinkResult(audio, report, speaker, gain)


def run_ook(source: AudioSignal, settings: LinkSettings) -> LinkResult:
    """PCM over OOK; raises :class:`~lifisim.phy_rx.PreambleNotFound` on sync loss."""
    ch, rx = settings.channel, settings.receiver
    tx_bits = pcm_encode(source, settings.bits_per_sample)
    tx = ook_modulate(tx_bits, settings.ook, settings.ook_sample_rate_hz)
    v = photodetect(propagate(tx, ch), rx)
    rx_bits = ook_demodulate(v, settings.ook, rx, payload_bits=tx_bits.payload_bit_count)
    errors = count_bit_errors(tx_bits, rx_bits)
    total = tx_bits.payload_bit_count
    audio = pcm_decode(rx_bits, settings.bits_per_sample, source.sample_rate_hz)
    if len(audio) < len(source):
        audio = AudioSignal(audio.sample_rate_hz, np.pad(audio.samples, (0, len(source) - len(audio))))
    skip = min(int(round(settings.warmup_s * source.sample_rate_hz)), len(source))
    snr, err, psnr = _audio_metrics(source, audio, skip)
    report = LinkReport(
        snr_db=snr,
        mse=err,
        distance_m=ch.distance_m,
        ber=errors / total if total else 0.0,
        psnr_db=psnr,
        bits_total=total,
        bit_errors=errors,
    )
    return LinkResult(audio, report, amplify(dc_block(v, rx), rx), los_gain(ch) * rx.responsivity)


def run_link(source: AudioSignal, settings: LinkSettings) -> LinkResult:
    return run_aim(source, settings) if settings.mode == "aim" else run_ook(source, settings)


def random_bits(n_bits: int, seed: int) -> BitStream:
    rng = np.random.default_rng(seed)
    return BitStream(rng.integers(0, 2, n_bits, dtype=np.uint8))


def ook_ber_point(settings: LinkSettings, n_bits: int, seed: int) -> tuple[float, float]:
    """BER and detector SNR (dB) for one frame of ``n_bits`` random bits."""
    ch = replace(settings.channel, rng_seed=seed)
    tx_bits = random_bits(n_bits, seed)
    tx = ook_modulate(tx_bits, settings.ook, settings.ook_sample_rate_hz)
    v = photodetect(propagate(tx, ch), settings.receiver)
    rx_bits = ook_demodulate(v, settings.ook, settings.receiver, payload_bits=n_bits)
    return count_bit_errors(tx_bits, rx_bits) / n_bits, ook_snr_db(ch, settings.ook)


def simulate_capture(source: AudioSignal, settings: LinkSettings) -> CaptureSeries:
    """ADC counts of the panel voltage for an AIM link, as an Arduino would log them."""
    light = propagate(aim_modulate(source, settings.aim), settings.channel)
    return adc_quantize(photodetect(light, settings.receiver), settings.receiver)
