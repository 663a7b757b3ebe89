from __future__ import annotations

import json
import subprocess
import sys

import pytest

from ddmr.bench import loglog_slope, run_benchmarks, to_csv
from ddmr.cli import main
from ddmr.conflicts import Variant
from ddmr.engine import compute_extension
from ddmr.generate import FAMILIES, generate_theory, random_theory
from ddmr.model import (
    Literal,
    Mode,
    Theory,
    extended_superiority,
    theory_size,
    validate,
)
from ddmr.model import _has_cycle
from ddmr.text import render_theory

from .conftest import FIXTURES


def test_generators_deterministic():
    for family in FAMILIES:
        a = render_theory(generate_theory(family, 1000, 42))
        b = render_theory(generate_theory(family, 1000, 42))
        assert a == b, family


def test_chain_size_zero_is_empty():
    assert generate_theory("chain", 0, 7) == Theory.build()


def test_sizes_within_ten_percent():
    for family in FAMILIES:
        for size in (30, 100, 400):
            for seed in (0, 3):
                achieved = theory_size(generate_theory(family, size, seed))
                assert 0.9 * size <= achieved <= 1.1 * size, (family, size, achieved)


def test_team_family_shape():
    theory = generate_theory("team", 21, 5)
    ext = compute_extension(theory, Variant.CAUTIOUS)
    contested = {
        lit for lit in ext.positive(Mode.C) if lit.atom.startswith("l") and lit.positive
    }
    assert contested  # the supporting team wins each block
    assert any(
        lit.complement() in ext.negative(Mode.C) for lit in contested
    )
    assert theory.superiority


def test_random_theories_validate_cleanly():
    for seed in range(30):
        report = validate(random_theory(seed, 60))
        assert report.ok, report.errors


def test_random_acyclic_keeps_extended_superiority_acyclic():
    for seed in range(20):
        theory = random_theory(seed, 60, acyclic=True)
        assert not _has_cycle(extended_superiority(theory))


def test_unknown_family_rejected():
    with pytest.raises(ValueError, match="unknown family"):
        generate_theory("nope", 10, 0)


def test_bench_records_and_csv():
    records = run_benchmarks(["chain"], [30, 60], seed=1)
    assert [(r.family, r.variant) for r in records] == [
        ("chain", "simple"),
        ("chain", "cautious"),
        ("chain", "simple"),
        ("chain", "cautious"),
    ]
    text = to_csv(records)
    lines = text.strip().splitlines()
    assert lines[0] == "family,size,variant,wall_time_ms,decided,undetermined"
    assert len(lines) == 5


def test_bench_empty_sizes_gives_header_only():
    assert to_csv(run_benchmarks(["chain"], [], seed=1)).strip() == (
        "family,size,variant,wall_time_ms,decided,undetermined"
    )


def test_loglog_slope():
    assert loglog_slope([(10, 10.0), (100, 100.0)]) == pytest.approx(1.0)
    assert loglog_slope([(10, 5.0)]) == 0.0


# -- command line -------------------------------------------------------------


def run_cli(*argv):
    return main(list(argv))


def test_cli_extension_json(capsys):
    code = run_cli(
        "extension",
        str(FIXTURES / "execution1.ddl"),
        "--variant",
        "simple",
        "--format",
        "json",
    )
    out = capsys.readouterr().out
    assert code == 0
    data = json.loads(out)
    assert "c" in data["-dO"]


def test_cli_extension_matches_golden():
    for golden in sorted((FIXTURES / "golden").glob("*.json")):
        name, variant, _ = golden.name.split(".")
        proc = subprocess.run(
            [
                sys.executable,
                "-m",
                "ddmr.cli",
                "extension",
                str(FIXTURES / f"{name}.ddl"),
                "--variant",
                variant,
                "--format",
                "json",
            ],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        assert proc.stdout == golden.read_text(), golden.name


def test_cli_missing_file(capsys):
    with pytest.raises(SystemExit) as exc:
        run_cli("extension", "no-such-file.ddl")
    assert exc.value.code == 2


def test_cli_parse_error(tmp_path, capsys):
    bad = tmp_path / "bad.ddl"
    bad.write_text("alpha: a => Q l.")
    with pytest.raises(SystemExit) as exc:
        run_cli("extension", str(bad))
    assert exc.value.code == 2
    assert "unknown mode" in capsys.readouterr().err


def test_cli_validation_error(tmp_path, capsys):
    bad = tmp_path / "dup.ddl"
    bad.write_text("r: a => C b. r: a => C c.")
    with pytest.raises(SystemExit) as exc:
        run_cli("extension", str(bad))
    assert exc.value.code == 1


def test_cli_loop_has_undetermined(capsys):
    code = run_cli("extension", str(FIXTURES / "loop.ddl"), "--format", "json")
    assert code == 0
    data = json.loads(capsys.readouterr().out)
    assert data["undetermined"] == [{"mode": "C", "subject": "x"}]


def test_cli_query_exit_codes(capsys):
    assert run_cli("query", str(FIXTURES / "execution1.ddl"), "+dO a") == 0
    assert run_cli("query", str(FIXTURES / "execution1.ddl"), "+dmC nu") == 3
    assert run_cli("query", str(FIXTURES / "loop.ddl"), "+dC x") == 4
    assert run_cli("query", str(FIXTURES / "loop.ddl"), "+dC ghost") == 6
    out = capsys.readouterr().out
    assert "Proved" in out and "UnknownSubject" in out


def test_cli_validate(capsys):
    assert run_cli("validate", str(FIXTURES / "example8.ddl")) == 0
    out = capsys.readouterr().out
    assert "cyclic extended superiority" in out
    assert run_cli("validate", str(FIXTURES / "example1.ddl")) == 0


def test_cli_diff(capsys):
    assert run_cli("diff", str(FIXTURES / "execution2.ddl")) == 0
    out = capsys.readouterr().out
    assert "~zeta" in out
    assert run_cli("diff", str(FIXTURES / "nometa.ddl")) == 0
    assert "no differences" in capsys.readouterr().out


def test_cli_oracle_cross_check(capsys):
    assert (
        run_cli(
            "extension",
            str(FIXTURES / "execution2.ddl"),
            "--oracle",
            "--format",
            "json",
        )
        == 0
    )


def test_cli_oracle_budget_env(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("DDMR_ORACLE_BUDGET", "1")
    with pytest.raises(SystemExit) as exc:
        run_cli("extension", str(FIXTURES / "execution1.ddl"), "--oracle")
    assert exc.value.code == 1
    assert "budget" in capsys.readouterr().err


def test_cli_bench_csv(tmp_path, capsys):
    out = tmp_path / "bench.csv"
    code = run_cli(
        "bench",
        "--family",
        "chain",
        "--sizes",
        "30,60",
        "--seed",
        "2",
        "--variant",
        "cautious",
        "--variant-only",
        "--out",
        str(out),
    )
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0].startswith("family,size")
    assert len(lines) == 3


def test_console_script_installed():
    proc = subprocess.run(
        [sys.executable, "-m", "ddmr.cli", "--help"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert "extension" in proc.stdout
