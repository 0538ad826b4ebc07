"""Flat ``key = value`` configuration files.

Precedence per key is: command-line override, then config file, then the
built-in default. Every key maps onto one field of the link settings.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass

from .audio_io import AudioSignal, generate_tone, read_wav
from .channel import ChannelConfig
from .link import LinkSettings
from .phy_rx import ReceiverConfig
from .phy_tx import AimConfig, OokConfig


class ConfigError(ValueError):
    pass


def _parse_float(key, text):
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {text!r} as a number") from None


def _parse_int(key, text):
    try:
        return int(text, 0)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {text!r} as an integer") from None


def _parse_preamble(key, text):
    text = text.strip()
    if text in ("", "none"):
        return ()
    if set(text) - {"0", "1"}:
        raise ConfigError(f"{key}: preamble must be a string of 0/1 digits")
    return tuple(int(c) for c in text)


def _parse_str(key, text):
    return text.strip()


def _parse_choice(key, text):
    return text.strip().lower()


@dataclass(frozen=True)
class SourceSpec:
    """Where the transmitted audio comes from: a WAV file or a generated tone."""

    source: str = "tone"
    tone_freq_hz: float = 1000.0
    tone_duration_s: float = 1.0
    tone_amplitude: float = 0.8

    def load(self, sample_rate_hz: int) -> AudioSignal:
        if self.source == "tone":
            return generate_tone(self.tone_freq_hz, self.tone_duration_s, sample_rate_hz, self.tone_amplitude)
        return read_wav(self.source)


# key -> (section, parser); section None means LinkSettings itself
_KEYS = {
    "source": ("source", _parse_str),
    "tone_freq_hz": ("source", _parse_float),
    "tone_duration_s": ("source", _parse_float),
    "tone_amplitude": ("source", _parse_float),
    "mode": (None, _parse_choice),
    "sample_rate_hz": (None, _parse_int),
    "bits_per_sample": (None, _parse_int),
    "warmup_s": (None, _parse_float),
    "dc_bias": ("aim", _parse_float),
    "modulation_index": ("aim", _parse_float),
    "samples_per_symbol": ("ook", _parse_int),
    "high_level": ("ook", _parse_float),
    "low_level": ("ook", _parse_float),
    "line_code": ("ook", _parse_choice),
    "preamble": ("ook", _parse_preamble),
    "responsivity": ("receiver", _parse_float),
    "panel_cutoff_hz": ("receiver", _parse_float),
    "dc_block_pole": ("receiver", _parse_float),
    "amp_gain_db": ("receiver", _parse_float),
    "amp_rail": ("receiver", _parse_float),
    "adc_bits": ("receiver", _parse_int),
    "adc_vref": ("receiver", _parse_float),
    "threshold_mode": ("receiver", _parse_choice),
    "fixed_threshold": ("receiver", _parse_float),
    "rng_seed": ("channel", _parse_int),
}
for _f in dataclasses.fields(ChannelConfig):
    _KEYS.setdefault(_f.name, ("channel", _parse_float))
_KEYS["seed"] = _KEYS["rng_seed"]

KNOWN_KEYS = frozenset(_KEYS)


def parse_config_text(text: str, origin: str = "<config>") -> dict[str, str]:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"{origin}:{lineno}: expected 'key = value', got {raw!r}")
        values[key] = value.strip()
    return values


def load_config(path) -> dict[str, str]:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {os.fspath(path)!r}: {exc.strerror}") from None
    return parse_config_text(text, os.fspath(path))


def parse_overrides(pairs) -> dict[str, str]:
    values = {}
    for pair in pairs or ():
        key, sep, value = pair.partition("=")
        if not sep:
            raise ConfigError(f"override {pair!r} is not key=value")
        values[key.strip()] = value.strip()
    return values


def build_settings(values: dict[str, str]) -> tuple[LinkSettings, SourceSpec]:
    """Turn merged string values into validated settings.

    Raises :class:`ConfigError` naming the offending key or parameter.
    """
    sections: dict = {"source": {}, None: {}, "aim": {}, "ook": {}, "channel": {}, "receiver": {}}
    for key, text in values.items():
        if key not in _KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        section, parse = _KEYS[key]
        name = "rng_seed" if key == "seed" else key
        sections[section][name] = parse(key, text)

    try:
        source = SourceSpec(**sections["source"])
        settings = LinkSettings(
            aim=AimConfig(**sections["aim"]),
            ook=OokConfig(**sections["ook"]),
            channel=ChannelConfig(**sections["channel"]),
            receiver=ReceiverConfig(**sections["receiver"]),
            **sections[None],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if settings.sample_rate_hz < 1:
        raise ConfigError("sample_rate_hz must be positive")
    if settings.bits_per_sample not in (8, 16):
        raise ConfigError("bits_per_sample must be 8 or 16")
    return settings, source
