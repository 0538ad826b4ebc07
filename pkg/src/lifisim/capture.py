"""Serial ADC dumps in, trend-line CSV out.

A dump is what an Arduino sketch printing ``analogRead`` values over serial
produces: one integer per line, with the first and last lines often cut.
"""

from __future__ import annotations

import io
import os

import numpy as np

from .analysis import moving_average
from .phy_rx import CaptureOrigin, CaptureSeries

MIN_ADC_BITS = 10
TREND_SAMPLES = 500


class NoSamplesError(ValueError):
    """Nothing in the dump parsed as a sample; usually a wrong port or baud rate."""


class SerialDumpParser:
    """Incremental parser; feed text chunks as they arrive, then :meth:`finish`."""

    def __init__(self):
        self._pending = ""
        self._counts: list[int] = []
        self.malformed_lines = 0

    def _line(self, line: str) -> None:
        token = line.strip()
        if token.isascii() and token.isdigit():
            self._counts.append(int(token))
        else:
            self.malformed_lines += 1

    def feed(self, chunk) -> None:
        if isinstance(chunk, (bytes, bytearray)):
            chunk = chunk.decode("ascii", errors="replace")
        text = self._pending + chunk
        *lines, self._pending = text.split("\n")
        for line in lines:
            self._line(line)

    def finish(self) -> CaptureSeries:
        if self._pending:
            self._line(self._pending)
            self._pending = ""
        if not self._counts:
            raise NoSamplesError("no samples: dump contains no parseable lines")
        counts = np.array(self._counts, dtype=np.int64)
        bits = max(MIN_ADC_BITS, int(counts.max()).bit_length())
        return CaptureSeries(counts, bits, CaptureOrigin.SERIAL_IMPORT, self.malformed_lines)


def parse_serial_dump(text) -> CaptureSeries:
    """Parse a whole dump (str, bytes, or a readable text/binary stream).

    Blank lines count as malformed, except for the empty remainder after a
    trailing newline. CR/LF endings are accepted.
    """
    parser = SerialDumpParser()
    if hasattr(text, "read"):
        for chunk in iter(lambda: text.read(65536), "" if isinstance(text, io.TextIOBase) else b""):
            parser.feed(chunk)
    else:
        parser.feed(text)
    return parser.finish()


def read_serial_dump(path) -> CaptureSeries:
    with open(path, "rb") as fh:
        return parse_serial_dump(fh)


def take_first(series: CaptureSeries, n: int = TREND_SAMPLES) -> CaptureSeries:
    if n < 1:
        raise ValueError("n must be >= 1")
    return CaptureSeries(
        series.counts[:n].copy(), series.adc_bits, series.origin, series.malformed_lines, dict(series.meta)
    )


def trend_rows(series: CaptureSeries, window: int) -> list[str]:
    trend = moving_average(series.counts, window)
    return [f"{i},{raw},{avg:.6f}" for i, (raw, avg) in enumerate(zip(series.counts.tolist(), trend.tolist()))]


def export_trend_csv(series: CaptureSeries, window: int, path) -> None:
    """Write ``index,raw,moving_avg`` rows (UTF-8, LF endings)."""
    if len(series) == 0:
        raise ValueError("cannot export an empty series")
    body = "index,raw,moving_avg\n" + "".join(row + "\n" for row in trend_rows(series, window))
    with open(os.fspath(path), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(body)
