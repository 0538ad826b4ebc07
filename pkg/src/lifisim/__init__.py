"""Behavioral simulator for a LED-to-solar-panel LiFi audio link."""

from .analysis import LinkReport, ber, moving_average, psnr_db, snr_db, threshold_detect
from .audio_io import AudioSignal, generate_tone, normalize, read_wav, write_wav
from .capture import export_trend_csv, parse_serial_dump, take_first
from .channel import ChannelConfig, los_gain, lowpass_first_order, propagate
from .link import LinkSettings, run_link
from .phy_rx import (
    CaptureSeries,
    PreambleNotFound,
    ReceiverConfig,
    adc_quantize,
    aim_demodulate,
    amplify,
    dc_block,
    ook_demodulate,
    photodetect,
)
from .phy_tx import (
    AimConfig,
    BitStream,
    LineCode,
    OokConfig,
    OpticalWaveform,
    aim_modulate,
    ook_modulate,
    pcm_decode,
    pcm_encode,
)

__version__ = "0.1.0"
