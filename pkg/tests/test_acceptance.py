"""Acceptance suite: golden fixtures plus property sweeps.

Each test prints one PASS/FAIL line.  Tolerances and budgets are fixed
here, not configurable: exact set matches on the fixture extensions, zero
tolerance on the coherence/consistence/equivalence sweeps, wall-clock
ceilings as stated per criterion.
"""

from __future__ import annotations

import functools
import json
import subprocess
import sys
import time

from ddmr.bench import loglog_slope, run_benchmarks
from ddmr.conflicts import Variant, conflicts
from ddmr.engine import compute_extension, diff_variants, run_engine
from ddmr.generate import generate_theory, random_theory
from ddmr.model import Literal, Mode, RuleExpression, RuleRef, Sign, theory_size
from ddmr.oracle import check_equivalence
from ddmr.text import parse_theory

from .conftest import FIXTURES, load_fixture

L = Literal


def criterion(number: int, title: str):
    def wrap(fn):
        @functools.wraps(fn)
        def run():
            try:
                fn()
            except BaseException:
                print(f"ACCEPTANCE {number:02d} FAIL  {title}")
                raise
            print(f"ACCEPTANCE {number:02d} PASS  {title}")

        return run

    return wrap


def _strs(subjects):
    return {str(s) for s in subjects}


@criterion(1, "team defeat fixture: exact constitutive sets, under one second")
def test_criterion_01_team_defeat():
    theory = load_fixture("example1")
    facts = {"a", "b", "c", "d", "e"}
    start = time.perf_counter()
    for variant in Variant:
        ext = compute_extension(theory, variant)
        assert _strs(ext.positive(Mode.C)) == facts | {"l"}
        assert "~l" in _strs(ext.negative(Mode.C))
    assert time.perf_counter() - start < 1.0


@criterion(2, "deontic fixture: obligations, permissions and rejections exact")
def test_criterion_02_deontic_extension():
    theory = load_fixture("example3")
    facts = {"a", "b", "c", "d", "e"}
    for variant in Variant:
        ext = compute_extension(theory, variant)
        assert _strs(ext.positive(Mode.C)) == {"l", "q"} | facts
        assert _strs(ext.positive(Mode.O)) == {"~l", "p"}
        assert _strs(ext.positive(Mode.P)) == {"~l", "p"}
        assert {"l", "~p", "q", "~q"} <= _strs(ext.negative(Mode.P))


@criterion(3, "meta-rule run 1: derived rules, chain verdicts, variants agree")
def test_criterion_03_execution1():
    theory = load_fixture("execution1")
    for variant in Variant:
        ext = compute_extension(theory, variant)
        assert {"alpha", "beta", "zeta", "theta", "mu", "gamma"} <= _strs(
            ext.positive_rules(Mode.C)
        )
        assert {"nu", "kappa"} <= _strs(ext.negative_rules(Mode.C))
        assert {"f1", "f2", "~a", "b"} <= _strs(ext.positive(Mode.C))
        assert {"a", "b"} <= _strs(ext.positive(Mode.O))
        assert "c" in _strs(ext.negative(Mode.O))
    assert diff_variants(theory) == []


@criterion(4, "meta-rule run 2: cautious conclusions and the variant gap")
def test_criterion_04_execution2():
    theory = load_fixture("execution2")
    cautious = compute_extension(theory, Variant.CAUTIOUS)
    assert {"eta", "~zeta", "kappa"} <= _strs(cautious.positive_rules(Mode.O))
    assert "theta" in _strs(cautious.negative_rules(Mode.O))
    assert "theta" in _strs(cautious.negative_rules(Mode.P))
    assert "mu" in _strs(cautious.negative_rules(Mode.O))
    assert "~c" in _strs(cautious.positive(Mode.C))
    assert "c" in _strs(cautious.positive(Mode.O))
    simple = compute_extension(theory, Variant.SIMPLE)
    assert "~zeta" in _strs(simple.negative_rules(Mode.O))
    # the divergence is ~zeta flipping, and mu flipping as its consequence
    rows = {
        (str(mode), str(subject), a, b) for mode, _, subject, a, b in diff_variants(theory)
    }
    assert rows == {
        ("O", "~zeta", "Refuted", "Proved"),
        ("P", "~zeta", "Refuted", "Proved"),
        ("O", "mu", "Proved", "Refuted"),
        ("P", "mu", "Proved", "Refuted"),
    }


@criterion(5, "twin permissions fixture: permitted both ways, held neither way")
def test_criterion_05_twin_permissions():
    ext = compute_extension(load_fixture("example6"), Variant.SIMPLE)
    assert _strs(ext.positive_rules(Mode.P)) == {"alpha", "~alpha"}
    assert {"alpha", "~alpha"} <= _strs(ext.negative_rules(Mode.C))


@criterion(6, "levelled superiority fixture: both conflicting rules derived")
def test_criterion_06_levelled_superiority():
    from ddmr.model import validate

    theory = load_fixture("example8")
    report = validate(theory)
    assert any("cyclic extended superiority" in w for w in report.warnings)
    ext = compute_extension(theory, Variant.CAUTIOUS)
    assert {"gamma", "zeta"} <= _strs(ext.positive_rules(Mode.C))


@criterion(7, "size metric: the worked example measures exactly sixteen")
def test_criterion_07_size_metric():
    theory = parse_theory(
        """
        fact a. fact b. fact c.
        alpha: a => O d.
        beta: b => C ~d.
        gamma: c => C (zeta: a => C d).
        zeta > beta.
        """
    )
    assert theory_size(theory) == 16


@criterion(8, "coherence: 1000 random theories, both variants, no sign clash")
def test_criterion_08_coherence():
    start = time.perf_counter()
    for seed in range(1000):
        theory = random_theory(seed, 25 + (seed % 36))
        assert theory_size(theory) <= 66
        for variant in Variant:
            ext = compute_extension(theory, variant)
            for mode in Mode:
                assert not ext.positive(mode) & ext.negative(mode), (seed, variant)
                assert not ext.positive_rules(mode) & ext.negative_rules(mode), (
                    seed,
                    variant,
                )
    assert time.perf_counter() - start < 60.0


@criterion(9, "consistence: acyclic superiority never yields opposite conclusions")
def test_criterion_09_consistence():
    for seed in range(1000):
        theory = random_theory(seed + 50_000, 25 + (seed % 36), acyclic=True)
        by_label = theory.rules_by_label()
        top = theory.top_labels()
        for variant in Variant:
            ext = compute_extension(theory, variant)
            plus_o = ext.positive(Mode.O)
            for lit in plus_o:
                assert lit.complement() not in plus_o, (seed, variant, lit)
            for lit in ext.positive(Mode.C):
                if lit.complement() in ext.positive(Mode.C):
                    assert lit in theory.facts and lit.complement() in theory.facts
            # permissions of conflicting rules are compatible by design in
            # the simple reading (twin permissions), so the both-top-level
            # guarantee covers C and O there, and every mode when cautious
            modes = (Mode.C, Mode.O) if variant is Variant.SIMPLE else tuple(Mode)
            for mode in modes:
                proved = sorted(
                    ext.positive_rules(mode), key=lambda r: (r.label, r.positive)
                )
                for i, r1 in enumerate(proved):
                    e1 = RuleExpression(by_label[r1.label], r1.positive)
                    for r2 in proved[i + 1 :]:
                        e2 = RuleExpression(by_label[r2.label], r2.positive)
                        if conflicts(e1, e2, variant):
                            assert r1.positive and r1.label in top, (seed, variant, r1, r2)
                            assert r2.positive and r2.label in top, (seed, variant, r1, r2)


@criterion(10, "oracle equivalence: engine matches the proof conditions exactly")
def test_criterion_10_oracle_equivalence():
    for seed in range(1000):
        theory = random_theory(seed + 100_000, 25 + (seed % 36))
        for variant in Variant:
            assert check_equivalence(theory, variant) == {}, (seed, variant)
    for ddl in sorted(FIXTURES.glob("*.ddl")):
        for variant in ("simple", "cautious"):
            proc = subprocess.run(
                [
                    sys.executable,
                    "-m",
                    "ddmr.cli",
                    "extension",
                    str(ddl),
                    "--variant",
                    variant,
                    "--oracle",
                    "--format",
                    "json",
                ],
                capture_output=True,
                text=True,
            )
            assert proc.returncode == 0, (ddl.name, variant, proc.stderr)


@criterion(11, "obligation implies permission; scan order never matters")
def test_criterion_11_closure_and_order():
    for seed in range(100):
        theory = random_theory(seed + 200_000, 25 + (seed % 36))
        baseline = compute_extension(theory, Variant.CAUTIOUS)
        assert baseline.positive(Mode.O) <= baseline.positive(Mode.P)
        assert baseline.positive_rules(Mode.O) <= baseline.positive_rules(Mode.P)
        for shuffle in range(10):
            state = run_engine(theory, Variant.CAUTIOUS, order_seed=shuffle)
            assert state.extension() == baseline, (seed, shuffle)


@criterion(12, "scaling: three families over two decades, growth within degree five")
def test_criterion_12_scaling():
    sizes = (100, 1_000, 10_000)
    records = run_benchmarks(
        ["chain", "team", "meta-chain"], sizes, seed=7, variants=[Variant.CAUTIOUS]
    )
    by_family: dict = {}
    for record in records:
        assert record.decided + record.undetermined > 0
        by_family.setdefault(record.family, []).append(
            (record.size, record.wall_time_ms)
        )
        if record.size >= 9_000:
            assert record.wall_time_ms < 60_000.0, record
    for family, points in by_family.items():
        slope = loglog_slope(points)
        assert slope <= 5.0, (family, slope, points)
