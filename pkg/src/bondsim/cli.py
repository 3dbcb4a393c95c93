"""Experiment runner.

Subcommands:

    run              one simulation, human-readable report
    sweep            grid of runs (channels x regime x scheme x seeds) -> CSV
                     plus one seed-average file per metric
    validate-tables  cross-check the compiled-in channel tables
    bench            compare the numba and numpy simulation kernels

Options may also come from a `key=value` config file (--config); explicit
flags win over file values.  BONDSIM_SEED is the seed fallback and
BONDSIM_BACKEND selects the simulation kernel.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import engine
from .bonding import SCHEME_NAMES
from .errors import ConfigurationError
from .metrics import MetricsReport
from .prmodel import (
    MAX_CHANNELS,
    MIN_CHANNELS,
    REGIMES,
    load_channel_file,
    table_validation_rows,
)
from .sensing import SensingErrorModel
from .simkernel import SimConfig, run, simulate_arrays, write_event_log

SEED_ENV = "BONDSIM_SEED"

CSV_HEADER = (
    "channels,regime,scheme,seed,delivery_ratio,hir,switches,energy_j,"
    "lifetime_packets,delivered,interfered,dropped_no_bond,dropped_guard"
)

AVERAGE_METRICS = ("delivery_ratio", "hir", "switches", "energy_j", "lifetime_packets")


@dataclass
class SweepSpec:
    """One output row per (channels, regime, scheme, seed) tuple."""

    channel_counts: tuple[int, ...]
    regimes: tuple[str, ...]
    schemes: tuple[str, ...]
    seeds: tuple[int, ...]
    overrides: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# option parsing and config-file merging


def _parse_int_list(text: str, what: str) -> tuple[int, ...]:
    values: list[int] = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        if "-" in token[1:]:  # allow negative single values, e.g. seeds
            lo_s, hi_s = token.split("-", 1)
            try:
                lo, hi = int(lo_s), int(hi_s)
            except ValueError as exc:
                raise ConfigurationError(f"bad {what} range {token!r}") from exc
            if hi < lo:
                raise ConfigurationError(f"bad {what} range {token!r}")
            values.extend(range(lo, hi + 1))
        else:
            try:
                values.append(int(token))
            except ValueError as exc:
                raise ConfigurationError(f"bad {what} value {token!r}") from exc
    if not values:
        raise ConfigurationError(f"empty {what} list")
    return tuple(values)


def _parse_names(text: str, valid: tuple[str, ...], what: str) -> tuple[str, ...]:
    if text.strip().lower() == "all":
        return valid
    names = tuple(t.strip().lower() for t in text.split(",") if t.strip())
    if not names:
        raise ConfigurationError(f"empty {what} list")
    for name in names:
        if name not in valid:
            raise ConfigurationError(
                f"unknown {what} {name!r}; valid {what}s: {', '.join(valid)}"
            )
    return names


def _load_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigurationError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            key, value = line.split("=", 1)
            values[key.strip().lower().replace("-", "_")] = value.strip()
    return values


class _Options:
    """Flag values merged over config-file values merged over defaults."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.file = _load_config_file(args.config) if getattr(args, "config", None) else {}

    def get(self, name: str, cast, default=None, required: bool = False):
        flag = getattr(self.args, name, None)
        if flag is not None:
            return flag
        if name in self.file:
            try:
                return cast(self.file[name])
            except ConfigurationError:
                raise
            except ValueError as exc:
                raise ConfigurationError(f"bad config value for {name}: {exc}") from exc
        if required and default is None:
            raise ConfigurationError(f"missing required option --{name.replace('_', '-')}")
        return default

    def seed_default(self) -> int:
        env = os.environ.get(SEED_ENV)
        if env is not None:
            try:
                return int(env)
            except ValueError as exc:
                raise ConfigurationError(f"bad {SEED_ENV} value {env!r}") from exc
        return 0


def _sensing_error(opt: _Options) -> SensingErrorModel:
    p_miss = opt.get("p_miss", float, 0.0)
    p_fa = opt.get("p_false_alarm", float, 0.0)
    try:
        return SensingErrorModel(p_miss=p_miss, p_false_alarm=p_fa)
    except ValueError as exc:
        raise ConfigurationError(str(exc)) from exc


def _single_config(opt: _Options) -> SimConfig:
    overrides = None
    channel_file = opt.get("channel_file", str)
    if channel_file:
        overrides = load_channel_file(channel_file)
    return SimConfig(
        n_channels=opt.get("channels", int, required=True),
        regime=opt.get("regime", str, "custom" if overrides else None, required=overrides is None),
        scheme=opt.get("scheme", str, required=True),
        n_packets=opt.get("packets", int, 10000),
        seed=opt.get("seed", int, opt.seed_default()),
        packet_airtime=opt.get("airtime", float, 0.01),
        inter_packet_gap=opt.get("gap", float, 0.0),
        bond_size=opt.get("bond_size", int, 3),
        sensing_error=_sensing_error(opt),
        channel_overrides=overrides,
    ).validate()


# ---------------------------------------------------------------------------
# run


def _format_report(config: SimConfig, report: MetricsReport) -> str:
    lifetime = "inf" if report.lifetime_packets == float("inf") else str(int(report.lifetime_packets))
    lines = [
        ("scheme", config.scheme),
        ("regime", config.regime),
        ("channels", config.n_channels),
        ("seed", config.seed),
        ("backend", engine.backend_name()),
        ("sent", report.sent),
        ("delivered", report.delivered),
        ("interfered", report.interfered),
        ("dropped_no_bond", report.dropped_no_bond),
        ("dropped_guard", report.dropped_guard),
        ("delivery_ratio", repr(report.delivery_ratio)),
        ("hir", repr(report.hir)),
        ("switches", report.switches),
        ("energy_j", repr(report.energy_consumed)),
        ("lifetime_packets", lifetime),
    ]
    return "\n".join(f"{key:<17} {value}" for key, value in lines)


def cmd_run(args: argparse.Namespace) -> int:
    opt = _Options(args)
    config = _single_config(opt)
    report, records = run(config)
    if args.event_log:
        write_event_log(records, args.event_log)
    print(_format_report(config, report))
    return 0


# ---------------------------------------------------------------------------
# sweep


def _sweep_worker(config: SimConfig) -> MetricsReport:
    return simulate_arrays(config).report


def _fmt_value(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        if value == float("inf"):
            return "inf"
        if value.is_integer() and abs(value) < 1e15:
            return str(int(value)) if float(int(value)) == value else repr(value)
        return repr(value)
    return str(value)


def _row_values(config: SimConfig, report: MetricsReport) -> dict:
    return {
        "channels": config.n_channels,
        "regime": config.regime,
        "scheme": config.scheme,
        "seed": config.seed,
        "delivery_ratio": report.delivery_ratio,
        "hir": report.hir,
        "switches": report.switches,
        "energy_j": report.energy_consumed,
        "lifetime_packets": report.lifetime_packets,
        "delivered": report.delivered,
        "interfered": report.interfered,
        "dropped_no_bond": report.dropped_no_bond,
        "dropped_guard": report.dropped_guard,
    }


def _format_row(row: dict) -> str:
    return ",".join(
        (
            str(row["channels"]),
            row["regime"],
            row["scheme"],
            str(row["seed"]),
            repr(float(row["delivery_ratio"])),
            repr(float(row["hir"])),
            str(row["switches"]),
            repr(float(row["energy_j"])),
            _fmt_value(float(row["lifetime_packets"])),
            str(row["delivered"]),
            str(row["interfered"]),
            str(row["dropped_no_bond"]),
            str(row["dropped_guard"]),
        )
    )


def _avg_path(out_path: str, metric: str) -> str:
    base = out_path[:-4] if out_path.endswith(".csv") else out_path
    return f"{base}.avg.{metric}.csv"


def write_average_files(rows: list[dict], out_path: str) -> None:
    """Per metric, seed-averaged values per (regime, scheme, channels) group."""
    groups: dict[tuple, list[dict]] = {}
    for row in rows:
        groups.setdefault((row["regime"], row["scheme"], row["channels"]), []).append(row)
    for metric in AVERAGE_METRICS:
        path = _avg_path(out_path, metric)
        lines = [f"regime,scheme,channels,mean_{metric}"]
        for (regime, scheme, channels), members in sorted(groups.items()):
            mean = sum(float(m[metric]) for m in members) / len(members)
            lines.append(f"{regime},{scheme},{channels},{_fmt_value(mean)}")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("\n".join(lines) + "\n")


def run_sweep(spec: SweepSpec, out_path: str, jobs: int = 1) -> list[dict]:
    """Execute every tuple of the spec and write the CSV plus average files."""
    if not (spec.channel_counts and spec.regimes and spec.schemes and spec.seeds):
        raise ConfigurationError("sweep lists must be non-empty")
    configs = [
        SimConfig(
            n_channels=channels,
            regime=regime,
            scheme=scheme,
            seed=seed,
            **spec.overrides,
        ).validate()
        for regime in sorted(set(spec.regimes))
        for scheme in sorted(set(spec.schemes))
        for channels in sorted(set(spec.channel_counts))
        for seed in sorted(set(spec.seeds))
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(_sweep_worker, configs, chunksize=8))
    else:
        reports = [_sweep_worker(c) for c in configs]
    rows = [_row_values(c, r) for c, r in zip(configs, reports)]
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(CSV_HEADER + "\n")
        for row in rows:
            fh.write(_format_row(row) + "\n")
    write_average_files(rows, out_path)
    return rows


def cmd_sweep(args: argparse.Namespace) -> int:
    opt = _Options(args)
    if args.channels is None and "channels" not in opt.file:
        raise ConfigurationError("missing required option --channels")
    channels_text = args.channels if args.channels is not None else opt.file["channels"]
    if channels_text.strip().lower() == "all":
        counts = tuple(range(MIN_CHANNELS, MAX_CHANNELS + 1))
    else:
        counts = _parse_int_list(channels_text, "channels")
    regimes = _parse_names(opt.get("regime", str, "all"), REGIMES, "regime")
    schemes = _parse_names(opt.get("scheme", str, "all"), SCHEME_NAMES, "scheme")
    seeds_text = opt.get("seeds", str)
    if seeds_text:
        seeds = _parse_int_list(seeds_text, "seeds")
    else:
        seeds = (opt.get("seed", int, opt.seed_default()),)
    out_path = opt.get("out", str, required=True)
    jobs = opt.get("jobs", int, 1)
    if jobs < 1:
        raise ConfigurationError("jobs must be at least 1")
    overrides = {
        "n_packets": opt.get("packets", int, 10000),
        "packet_airtime": opt.get("airtime", float, 0.01),
        "inter_packet_gap": opt.get("gap", float, 0.0),
        "bond_size": opt.get("bond_size", int, 3),
        "sensing_error": _sensing_error(opt),
    }
    spec = SweepSpec(counts, regimes, schemes, seeds, overrides)
    rows = run_sweep(spec, out_path, jobs=jobs)
    print(f"wrote {len(rows)} rows to {out_path}")
    return 0


# ---------------------------------------------------------------------------
# validate-tables


def cmd_validate_tables(args: argparse.Namespace) -> int:
    rows = table_validation_rows()
    failed = 0
    for row in rows:
        status = "ok" if row["ok"] else "FAIL(" + ",".join(row["failures"]) + ")"
        failed += 0 if row["ok"] else 1
        print(
            f"{row['regime']:<13} ch{row['channel']:02d}  "
            f"lamX*Ton={row['on_product']:.4f}  lamY*Toff={row['off_product']:.4f}  "
            f"u={row['utilization']:.4f}  mu={row['table_mu']:.2f}  {status}"
        )
    print(f"{len(rows)} rows checked: {len(rows) - failed} ok, {failed} failed")
    return 1 if failed else 0


# ---------------------------------------------------------------------------
# bench


def cmd_bench(args: argparse.Namespace) -> int:
    config = SimConfig(
        n_channels=args.channels,
        regime=args.regime,
        scheme=args.scheme,
        n_packets=args.packets,
        seed=args.seed,
    ).validate()
    results = []
    for name in ("numba", "numpy"):
        try:
            backend = engine.get_backend(name)
        except ImportError:
            print(f"{name:<8} unavailable")
            continue
        simulate_arrays(config, backend=backend)  # warm-up (JIT compile)
        timings = []
        for _ in range(args.repeats):
            t0 = time.perf_counter()
            simulate_arrays(config, backend=backend)
            timings.append((time.perf_counter() - t0) * 1e3)
        results.append((name, min(timings), sum(timings) / len(timings)))
        print(f"{name:<8} best {min(timings):8.2f} ms   mean {sum(timings) / len(timings):8.2f} ms")
    if len(results) == 2:
        print(f"speedup (numpy/numba, best): {results[1][1] / results[0][1]:.1f}x")
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_common_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--packets", type=int, default=None, help="packets per run (default 10000)")
    p.add_argument("--airtime", type=float, default=None, help="packet airtime in seconds (default 0.01)")
    p.add_argument("--gap", type=float, default=None, help="inter-packet gap in seconds (default 0)")
    p.add_argument("--bond-size", type=int, default=None, dest="bond_size",
                   help="requested bond width (default 3)")
    p.add_argument("--p-miss", type=float, default=None, dest="p_miss",
                   help="probability a busy channel is sensed idle (default 0)")
    p.add_argument("--p-false-alarm", type=float, default=None, dest="p_false_alarm",
                   help="probability an idle channel is sensed busy (default 0)")
    p.add_argument("--config", default=None, help="key=value config file; flags override")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bondsim", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command")

    p_run = sub.add_parser("run", help="run one simulation")
    p_run.add_argument("--channels", type=int, default=None, help="number of channels (3-15)")
    p_run.add_argument("--regime", default=None, help="activity regime: low, high, long, intermittent")
    p_run.add_argument("--scheme", default=None, help=f"bonding scheme: {', '.join(SCHEME_NAMES)}")
    p_run.add_argument("--seed", type=int, default=None,
                       help=f"master seed (fallback: ${SEED_ENV}, then 0)")
    p_run.add_argument("--event-log", default=None, dest="event_log",
                       help="write one line per packet to this file")
    p_run.add_argument("--channel-file", default=None, dest="channel_file",
                       help="override preset channels: one 'id lambda_x lambda_y' per line")
    _add_common_run_flags(p_run)
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a grid and write CSV results")
    p_sweep.add_argument("--channels", default=None,
                         help="channel counts, e.g. '3-15', '3,9,15', or 'all'")
    p_sweep.add_argument("--regime", default=None, help="regimes, comma list or 'all' (default all)")
    p_sweep.add_argument("--scheme", default=None, help="schemes, comma list or 'all' (default all)")
    p_sweep.add_argument("--seeds", default=None, help="seed list, e.g. '0-9' or '1,2,3'")
    p_sweep.add_argument("--seed", type=int, default=None, help="single seed if --seeds is absent")
    p_sweep.add_argument("--out", default=None, help="output CSV path")
    p_sweep.add_argument("--jobs", type=int, default=None, help="parallel worker processes (default 1)")
    _add_common_run_flags(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)

    p_val = sub.add_parser("validate-tables", help="cross-check the compiled-in channel tables")
    p_val.set_defaults(func=cmd_validate_tables)

    p_bench = sub.add_parser("bench", help="compare the numba and numpy kernels")
    p_bench.add_argument("--channels", type=int, default=15)
    p_bench.add_argument("--regime", default="high")
    p_bench.add_argument("--scheme", default="ritcb")
    p_bench.add_argument("--packets", type=int, default=10000)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--repeats", type=int, default=5)
    p_bench.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "command", None):
        parser.print_help()
        return 2
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
