"""
Logging the receiver like an Arduino would
==========================================

The panel voltage goes through a 10-bit ADC, gets printed one count per line,
and the first 500 counts are smoothed with a 10-sample moving average.
"""

import sys
from pathlib import Path

from lifisim import ChannelConfig, LinkSettings, generate_tone
from lifisim.capture import export_trend_csv, parse_serial_dump, take_first
from lifisim.link import simulate_capture

out_dir = Path(sys.argv[1] if len(sys.argv) > 1 else ".")

tone = generate_tone(50.0, 0.2, 8000, amplitude=0.8)
counts = simulate_capture(tone, LinkSettings(channel=ChannelConfig(distance_m=0.3, noise_std=2e-4)))
print("captured", len(counts.counts), "counts, range", counts.counts.min(), "to", counts.counts.max())

# Write it out the way a serial monitor would save it, then read it back.
dump = out_dir / "serial_dump.txt"
dump.write_text("".join(f"{c}\r\n" for c in counts.counts))
series = parse_serial_dump(dump.read_bytes())
print("re-parsed", len(series.counts), "counts,", series.malformed_lines, "malformed lines")

first = take_first(series, 500)
export_trend_csv(first, 10, out_dir / "serial_dump_trend.csv")
print("wrote", out_dir / "serial_dump_trend.csv")
print("same thing from the shell:  lifisim analyze", dump)
