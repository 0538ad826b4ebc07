"""
Analog audio over light
=======================

A 1 kHz tone rides on the LED bias, crosses one meter of air and comes back
out of the solar panel. We look at how much of it survives.
"""

import sys
from dataclasses import replace

import numpy as np

from lifisim import ChannelConfig, LinkSettings, ReceiverConfig, generate_tone, write_wav
from lifisim.link import run_aim

out_dir = sys.argv[1] if len(sys.argv) > 1 else "."

tone = generate_tone(1000.0, 1.0, 8000, amplitude=0.8)
print("source:", len(tone), "samples at", tone.sample_rate_hz, "Hz")

# With noise off and filters wide open the link should be nearly transparent.
clean = LinkSettings(
    warmup_s=0.1,
    channel=ChannelConfig(noise_std=0.0, led_bandwidth_hz=10e6),
    receiver=ReceiverConfig(panel_cutoff_hz=10e6),
)
result = run_aim(tone, clean)
print(f"clean link: PSNR {result.report.psnr_db:.1f} dB, link gain {result.link_gain:.3e} V per unit power")

# Now walk the receiver away from the lamp with the default noise floor.
for d in (1.0, 3.0, 5.0, 10.0):
    settings = replace(clean, channel=replace(ChannelConfig(), distance_m=d))
    r = run_aim(tone, settings).report
    print(f"  {d:5.1f} m   SNR {r.snr_db:6.1f} dB   PSNR {r.psnr_db:6.1f} dB")

# The speaker path is the DC-blocked, amplified panel voltage.
peak = np.abs(result.speaker.samples).max()
print(f"speaker drive peaks at {peak:.3f} V")

write_wav(result.audio, f"{out_dir}/tone_loopback.wav")
print("wrote", f"{out_dir}/tone_loopback.wav")
