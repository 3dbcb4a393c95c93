import os

import pytest

from bondsim.cli import (
    AVERAGE_METRICS,
    CSV_HEADER,
    SweepSpec,
    main,
    run_sweep,
)
from bondsim.errors import ConfigurationError


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _report_value(out, key):
    for line in out.splitlines():
        parts = line.split()
        if parts and parts[0] == key:
            return parts[1]
    raise AssertionError(f"{key} not found in output:\n{out}")


# --- run ----------------------------------------------------------------------


def test_run_ip_has_zero_hir(capsys):
    code, out, _ = run_cli(
        capsys, "run", "--channels", "15", "--regime", "low", "--scheme", "ritcb-ip",
        "--seed", "1", "--packets", "2000",
    )
    assert code == 0
    assert _report_value(out, "hir") == "0.0"
    assert _report_value(out, "interfered") == "0"
    assert _report_value(out, "lifetime_packets") == "56818"


def test_run_rejects_bad_channel_count(capsys):
    code, _, err = run_cli(
        capsys, "run", "--channels", "2", "--regime", "low", "--scheme", "ritcb",
    )
    assert code == 2
    assert "channels must be in [3,15]" in err


def test_run_rejects_unknown_scheme(capsys):
    code, _, err = run_cli(
        capsys, "run", "--channels", "5", "--regime", "low", "--scheme", "bogus",
    )
    assert code == 2
    for name in ("ritcb", "ritcb-ip", "pracb", "swa", "knows", "agile"):
        assert name in err


def test_run_requires_channels(capsys):
    code, _, err = run_cli(capsys, "run", "--regime", "low", "--scheme", "swa")
    assert code == 2
    assert "--channels" in err


def test_run_seed_env_fallback(capsys, monkeypatch):
    monkeypatch.setenv("BONDSIM_SEED", "7")
    code, out, _ = run_cli(
        capsys, "run", "--channels", "3", "--regime", "low", "--scheme", "swa",
        "--packets", "50",
    )
    assert code == 0
    assert _report_value(out, "seed") == "7"


def test_run_event_log(capsys, tmp_path):
    log = tmp_path / "events.log"
    code, _, _ = run_cli(
        capsys, "run", "--channels", "5", "--regime", "low", "--scheme", "ritcb",
        "--seed", "1", "--packets", "120", "--event-log", str(log),
    )
    assert code == 0
    assert len(log.read_text().splitlines()) == 120


def test_run_channel_file(capsys, tmp_path):
    path = tmp_path / "ch.txt"
    path.write_text("0 1.0 1.0\n1 2.0 1.0\n2 3.0 1.0\n3 4.0 1.0\n")
    code, out, _ = run_cli(
        capsys, "run", "--channels", "3", "--channel-file", str(path),
        "--scheme", "ritcb", "--seed", "2", "--packets", "100",
    )
    assert code == 0
    assert _report_value(out, "regime") == "custom"


def test_config_file_defaults_and_flag_override(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("channels=15\nregime=low\nscheme=swa\npackets=60\nseed=3\n# comment\n")
    code, out, _ = run_cli(capsys, "run", "--config", str(cfg))
    assert code == 0
    assert _report_value(out, "seed") == "3"
    assert _report_value(out, "scheme") == "swa"
    code, out, _ = run_cli(capsys, "run", "--config", str(cfg), "--seed", "9")
    assert code == 0
    assert _report_value(out, "seed") == "9"


# --- sweep ----------------------------------------------------------------------


def test_sweep_single_tuple(capsys, tmp_path):
    out_path = tmp_path / "one.csv"
    code, _, _ = run_cli(
        capsys, "sweep", "--channels", "5", "--regime", "low", "--scheme", "ritcb",
        "--seeds", "1", "--packets", "200", "--out", str(out_path),
    )
    assert code == 0
    lines = out_path.read_text().splitlines()
    assert len(lines) == 2
    assert lines[0] == CSV_HEADER
    assert lines[1].startswith("5,low,ritcb,1,")


def test_sweep_determinism_and_parallel_equivalence(tmp_path):
    spec = SweepSpec((3, 5), ("low", "high"), ("ritcb", "swa"), (0, 1),
                     overrides={"n_packets": 150})
    p1, p2, p3 = (tmp_path / n for n in ("a.csv", "b.csv", "c.csv"))
    run_sweep(spec, str(p1), jobs=1)
    run_sweep(spec, str(p2), jobs=1)
    run_sweep(spec, str(p3), jobs=2)
    assert p1.read_bytes() == p2.read_bytes() == p3.read_bytes()


def test_sweep_row_count_and_order(tmp_path):
    spec = SweepSpec((5, 3), ("low", "high"), ("swa", "ritcb"), (1, 0),
                     overrides={"n_packets": 40})
    rows = run_sweep(spec, str(tmp_path / "grid.csv"))
    assert len(rows) == 2 * 2 * 2 * 2
    keys = [(r["regime"], r["scheme"], r["channels"], r["seed"]) for r in rows]
    assert keys == sorted(keys)


def test_sweep_average_files_recomputable(tmp_path):
    spec = SweepSpec((3, 4), ("low",), ("ritcb",), (0, 1, 2),
                     overrides={"n_packets": 100})
    out = tmp_path / "avg.csv"
    rows = run_sweep(spec, str(out))
    for metric in AVERAGE_METRICS:
        path = tmp_path / f"avg.avg.{metric}.csv"
        lines = path.read_text().splitlines()
        assert lines[0] == f"regime,scheme,channels,mean_{metric}"
        for line in lines[1:]:
            regime, scheme, channels, value = line.split(",")
            members = [
                r for r in rows
                if (r["regime"], r["scheme"], str(r["channels"])) == (regime, scheme, channels)
            ]
            expected = sum(float(m[metric]) for m in members) / len(members)
            assert float(value) == pytest.approx(expected, rel=1e-12)


def test_sweep_full_grid_row_count(tmp_path):
    spec = SweepSpec(
        tuple(range(3, 16)),
        ("low", "high", "long", "intermittent"),
        ("ritcb", "ritcb-ip", "pracb", "swa", "knows", "agile"),
        tuple(range(10)),
        overrides={"n_packets": 5},
    )
    rows = run_sweep(spec, str(tmp_path / "full.csv"))
    assert len(rows) == 13 * 4 * 6 * 10 == 3120


def test_sweep_requires_out(capsys):
    code, _, err = run_cli(capsys, "sweep", "--channels", "3", "--seeds", "0")
    assert code == 2
    assert "--out" in err


def test_sweep_rejects_bad_lists():
    with pytest.raises(ConfigurationError):
        run_sweep(SweepSpec((), ("low",), ("swa",), (0,)), "/tmp/never.csv")


def test_sweep_unwritable_path(capsys, tmp_path):
    code, _, err = run_cli(
        capsys, "sweep", "--channels", "3", "--regime", "low", "--scheme", "swa",
        "--seeds", "0", "--packets", "10",
        "--out", str(tmp_path / "missing_dir" / "x.csv"),
    )
    assert code == 1
    assert "error" in err


# --- validate-tables --------------------------------------------------------------


def test_validate_tables_reports_truncated_rows(capsys):
    code, out, _ = run_cli(capsys, "validate-tables")
    assert code == 1  # the published tables carry truncation outliers
    lines = out.splitlines()
    assert len([l for l in lines if l.startswith(("low", "high", "long", "interm"))]) == 60
    assert "60 rows checked: 52 ok, 8 failed" in out
    assert sum("FAIL" in l for l in lines) == 8


# --- bench -------------------------------------------------------------------------


def test_bench_smoke(capsys):
    code, out, _ = run_cli(capsys, "bench", "--packets", "200", "--repeats", "1")
    assert code == 0
    assert "numpy" in out


def test_no_command_prints_help(capsys):
    assert main([]) == 2
