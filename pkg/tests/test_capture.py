import io

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lifisim.capture import (
    NoSamplesError,
    SerialDumpParser,
    export_trend_csv,
    parse_serial_dump,
    read_serial_dump,
    take_first,
)
from lifisim.phy_rx import CaptureOrigin, CaptureSeries

counts_strategy = st.lists(st.integers(0, 4095), min_size=1, max_size=200)


def test_two_clean_lines():
    series = parse_serial_dump("512\n600\n")
    np.testing.assert_array_equal(series.counts, [512, 600])
    assert series.malformed_lines == 0
    assert series.origin is CaptureOrigin.SERIAL_IMPORT
    assert series.adc_bits == 10


def test_skips_malformed():
    series = parse_serial_dump("5\n12x\n7\n")
    np.testing.assert_array_equal(series.counts, [5, 7])
    assert series.malformed_lines == 1


def test_empty_dump():
    with pytest.raises(NoSamplesError, match="no samples"):
        parse_serial_dump("")


@pytest.mark.parametrize("text", ["-5\n+3\n1.5\n\n", "garbage"])
def test_nothing_parses(text):
    with pytest.raises(NoSamplesError):
        parse_serial_dump(text)


def test_truncated_first_and_last_lines():
    series = parse_serial_dump("3x\n100\n101\n10")
    # the cut-off tail "10" still parses as an integer; only "3x" is malformed
    np.testing.assert_array_equal(series.counts, [100, 101, 10])
    assert series.malformed_lines == 1


def test_adc_bits_inferred():
    assert parse_serial_dump("4095\n").adc_bits == 12
    assert parse_serial_dump("1023\n").adc_bits == 10
    assert parse_serial_dump("1024\n").adc_bits == 11


@given(counts_strategy, st.sampled_from(["\n", "\r\n"]), st.booleans())
def test_line_ending_insensitive(counts, eol, trailing):
    text = eol.join(map(str, counts)) + (eol if trailing else "")
    series = parse_serial_dump(text)
    np.testing.assert_array_equal(series.counts, counts)
    assert series.malformed_lines == 0


@given(counts_strategy, st.integers(1, 7))
def test_incremental_feed_matches_whole(counts, chunk):
    text = "\n".join(map(str, counts)) + "\n"
    parser = SerialDumpParser()
    for i in range(0, len(text), chunk):
        parser.feed(text[i : i + chunk].encode())
    np.testing.assert_array_equal(parser.finish().counts, parse_serial_dump(text).counts)


def test_stream_inputs(tmp_path):
    np.testing.assert_array_equal(parse_serial_dump(io.StringIO("1\n2\n")).counts, [1, 2])
    np.testing.assert_array_equal(parse_serial_dump(io.BytesIO(b"3\r\n4\r\n")).counts, [3, 4])
    p = tmp_path / "dump.txt"
    p.write_bytes(b"9\n8\n")
    np.testing.assert_array_equal(read_serial_dump(p).counts, [9, 8])


def test_take_first():
    series = CaptureSeries(np.arange(1000) % 1024, 10, CaptureOrigin.SERIAL_IMPORT, malformed_lines=2)
    first = take_first(series, 500)
    np.testing.assert_array_equal(first.counts, np.arange(500))
    assert (first.adc_bits, first.origin, first.malformed_lines) == (10, CaptureOrigin.SERIAL_IMPORT, 2)
    assert len(take_first(CaptureSeries(np.arange(10)), 500)) == 10
    np.testing.assert_array_equal(take_first(series, 1).counts, [0])
    with pytest.raises(ValueError):
        take_first(series, 0)


@given(counts_strategy, st.integers(1, 300), st.integers(1, 300))
def test_take_first_composes(counts, a, b):
    series = CaptureSeries(counts, 12)
    n1, n2 = max(a, b), min(a, b)
    np.testing.assert_array_equal(take_first(take_first(series, n1), n2).counts, take_first(series, n2).counts)


def test_export_rows(tmp_path):
    p = tmp_path / "t.csv"
    export_trend_csv(CaptureSeries([4, 8]), 2, p)
    assert p.read_bytes() == b"index,raw,moving_avg\n0,4,4.000000\n1,8,6.000000\n"


def test_export_window_one(tmp_path):
    p = tmp_path / "t.csv"
    export_trend_csv(CaptureSeries([3, 1, 4, 1, 5]), 1, p)
    rows = [line.split(",") for line in p.read_text().splitlines()[1:]]
    assert all(float(raw) == float(avg) for _, raw, avg in rows)


def test_export_500_rows(tmp_path):
    p = tmp_path / "t.csv"
    export_trend_csv(CaptureSeries(np.random.default_rng(0).integers(0, 1024, 500)), 10, p)
    assert len(p.read_text().splitlines()) == 501


def test_export_errors(tmp_path):
    with pytest.raises(ValueError):
        export_trend_csv(CaptureSeries([]), 3, tmp_path / "e.csv")
    with pytest.raises(OSError):
        export_trend_csv(CaptureSeries([1]), 3, tmp_path / "no" / "e.csv")


@given(counts_strategy, st.integers(1, 20))
def test_export_reparse_round_trip(tmp_path_factory, counts, window):
    p = tmp_path_factory.mktemp("csv") / "t.csv"
    export_trend_csv(CaptureSeries(counts, 12), window, p)
    raw = "\n".join(line.split(",")[1] for line in p.read_text().splitlines()[1:])
    np.testing.assert_array_equal(parse_serial_dump(raw).counts, counts)
