"""``lifisim`` command line: simulate, analyze, bersweep.

Exit codes: 0 success, 1 usage or validation error, 2 runtime failure
(lost sync, I/O, empty capture).
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

from .audio_io import WavFormatError, write_wav
from .capture import TREND_SAMPLES, NoSamplesError, export_trend_csv, read_serial_dump, take_first
from .analysis import FramingError
from .config import ConfigError, build_settings, load_config, parse_overrides
from .link import LinkSettings, ook_ber_point, run_link
from .phy_rx import PreambleNotFound

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2
MIN_SWEEP_BITS = 1000


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(value) -> str:
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    return str(value)


def _atomic_write(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent if str(path.parent) else ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _merged_values(args) -> dict[str, str]:
    values = load_config(args.config) if args.config else {}
    values.update(parse_overrides(args.set))
    for key in ("mode", "source"):
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    if args.seed is not None:
        values["seed"] = str(args.seed)
    return values


def _settings(args) -> tuple:
    if args.seed is not None and not 0 <= args.seed < 1 << 64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    return build_settings(_merged_values(args))


def cmd_simulate(args) -> int:
    settings, source_spec = _settings(args)
    source = source_spec.load(settings.sample_rate_hz)
    if source.sample_rate_hz != settings.sample_rate_hz:
        settings = replace(settings, sample_rate_hz=source.sample_rate_hz)
    result = run_link(source, settings)

    out = Path(args.out or "lifi_out.wav")
    report_path = Path(args.report) if args.report else out.with_suffix(".report")
    write_wav(result.audio, out)

    r = result.report
    fields = [
        ("mode", settings.mode),
        ("source", source_spec.source),
        ("seed", settings.channel.rng_seed),
        ("distance_m", r.distance_m),
        ("los_gain", result.link_gain / settings.receiver.responsivity),
        ("sample_rate_hz", settings.sample_rate_hz),
        ("samples", len(source)),
        ("snr_db", r.snr_db),
        ("mse", r.mse),
        ("psnr_db", r.psnr_db),
    ]
    if r.ber is not None:
        fields += [("ber", r.ber), ("bits_total", r.bits_total), ("bit_errors", r.bit_errors)]
    fields.append(("speaker_peak_v", float(abs(result.speaker.samples).max(initial=0.0))))
    fields.append(("output_wav", out.name))
    _atomic_write(report_path, "".join(f"{k} = {_fmt(v)}\n" for k, v in fields))
    print(f"wrote {out} and {report_path}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    if args.first < 1:
        raise UsageError("--first must be >= 1")
    if args.window < 1:
        raise UsageError("--window must be >= 1")
    series = read_serial_dump(args.dump)
    if series.malformed_lines:
        print(f"warning: skipped {series.malformed_lines} malformed line(s)", file=sys.stderr)
    first = take_first(series, args.first)
    out = args.out or str(Path(args.dump).with_suffix("")) + "_trend.csv"
    export_trend_csv(first, args.window, out)
    print(f"wrote {len(first)} rows to {out}")
    return EXIT_OK


def _sweep_values(raw) -> list[float]:
    values = []
    for item in raw:
        for part in item.split(","):
            if part.strip():
                try:
                    values.append(float(part))
                except ValueError:
                    raise UsageError(f"invalid sweep value {part!r}") from None
    if not values:
        raise UsageError("at least one sweep point is required")
    return sorted(values)


def sweep_rows(settings: LinkSettings, axis: str, points, n_bits: int, seed: int, jobs: int = 1) -> list[tuple]:
    """One ``(abscissa, ber, snr_db)`` row per point, ordered by abscissa."""

    def one(x):
        ch = replace(settings.channel, **{axis: x})
        ber, snr = ook_ber_point(replace(settings, channel=ch), n_bits, seed)
        return x, ber, snr

    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            rows = list(pool.map(one, points))
    else:
        rows = [one(x) for x in points]
    return sorted(rows, key=lambda row: row[0])


def cmd_bersweep(args) -> int:
    if args.bits < MIN_SWEEP_BITS:
        raise UsageError(f"--bits must be >= {MIN_SWEEP_BITS}")
    settings, _ = _settings(args)
    if args.distances:
        axis, points = "distance_m", _sweep_values(args.distances)
        if any(p <= 0 for p in points):
            raise UsageError("distance_m must be positive")
    else:
        axis, points = "noise_std", _sweep_values(args.noise)
        if any(p < 0 for p in points):
            raise UsageError("noise_std must be >= 0")
    seed = settings.channel.rng_seed
    rows = sweep_rows(settings, axis, points, args.bits, seed, args.jobs)
    text = f"{axis},ber,snr_db\n" + "".join(f"{_fmt(x)},{_fmt(b)},{_fmt(s)}\n" for x, b, s in rows)
    if args.out:
        _atomic_write(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="key = value config file")
    common.add_argument("--seed", type=int, metavar="U64", help="RNG seed (overrides config)")
    common.add_argument("--out", metavar="PATH", help="output file")
    common.add_argument(
        "--set", action="append", metavar="KEY=VALUE", default=[], help="override one config key (repeatable)"
    )

    parser = _Parser(prog="lifisim", description="LiFi audio link simulator and capture analyzer")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", parents=[common], help="run source -> LED -> channel -> panel -> audio")
    sim.add_argument("--mode", choices=["aim", "ook"])
    sim.add_argument("--source", help="'tone' or path to an input WAV")
    sim.add_argument("--report", metavar="PATH", help="report path (default: <out>.report)")
    sim.set_defaults(func=cmd_simulate)

    ana = sub.add_parser("analyze", parents=[common], help="trend-line CSV from a serial ADC dump")
    ana.add_argument("dump", help="serial dump, one integer per line")
    ana.add_argument("--first", type=int, default=TREND_SAMPLES, metavar="N")
    ana.add_argument("--window", type=int, default=10, metavar="W")
    ana.set_defaults(func=cmd_analyze)

    sweep = sub.add_parser("bersweep", parents=[common], help="OOK BER versus distance or noise")
    axis = sweep.add_mutually_exclusive_group(required=True)
    axis.add_argument("--distances", nargs="+", metavar="M", help="distances in meters (space or comma separated)")
    axis.add_argument("--noise", nargs="+", metavar="SIGMA", help="noise_std values")
    sweep.add_argument("--bits", type=int, default=100_000, metavar="N")
    sweep.add_argument("--jobs", type=int, default=1, metavar="J")
    sweep.set_defaults(func=cmd_bersweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PreambleNotFound, FramingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (NoSamplesError, WavFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
