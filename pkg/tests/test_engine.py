from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ddmr.conflicts import Variant
from ddmr.engine import (
    PROVED,
    REFUTED,
    UNDETERMINED,
    UNKNOWN_SUBJECT,
    compute_extension,
    diff_variants,
    query,
    run_engine,
)
from ddmr.generate import random_theory
from ddmr.model import (
    Literal,
    Mode,
    RuleRef,
    Theory,
    modal_herbrand_base,
)
from ddmr.text import parse_tagged_formula, parse_theory

from .conftest import load_fixture

L = Literal


def lits(ext, sign, mode):
    table = ext.positive(mode) if sign == "+" else ext.negative(mode)
    return {str(x) for x in table}


def rules_(ext, sign, mode):
    table = ext.positive_rules(mode) if sign == "+" else ext.negative_rules(mode)
    return {str(x) for x in table}


def test_empty_theory_has_empty_extension():
    ext = compute_extension(Theory.build(), Variant.CAUTIOUS)
    assert all(not s for s in ext.literals.values())
    assert all(not s for s in ext.rules.values())
    assert not ext.undetermined


def test_example1_team_defeat(load):
    for variant in Variant:
        ext = compute_extension(load("example1"), variant)
        assert lits(ext, "+", Mode.C) == {"a", "b", "c", "d", "e", "l"}
        assert "~l" in lits(ext, "-", Mode.C)
        assert "g" in lits(ext, "-", Mode.C)


def test_example1_needs_a_defeasible_witness():
    # supporters turned into defeaters: the attackers are still beaten, but
    # nothing defeasible remains to establish the conclusion
    source = """
    fact a. fact b. fact d. fact e.
    alpha: a ~> C l.
    beta: b ~> C l.
    phi: d => C ~l.
    psi: e => C ~l.
    alpha > phi.
    beta > psi.
    """
    ext = compute_extension(parse_theory(source), Variant.CAUTIOUS)
    assert "l" not in lits(ext, "+", Mode.C)
    # with no defeasible supporter left, the refutation holds vacuously
    assert "l" in lits(ext, "-", Mode.C)
    assert "~l" in lits(ext, "-", Mode.C)
    # adding one applicable defeasible supporter restores the conclusion
    ext2 = compute_extension(
        parse_theory(source + "fact c. gamma: c => C l."), Variant.CAUTIOUS
    )
    assert "l" in lits(ext2, "+", Mode.C)


def test_example3_deontic_extension(load):
    ext = compute_extension(load("example3"), Variant.CAUTIOUS)
    assert lits(ext, "+", Mode.C) == {"a", "b", "c", "d", "e", "l", "q"}
    assert lits(ext, "+", Mode.O) == {"~l", "p"}
    assert lits(ext, "+", Mode.P) == {"~l", "p"}
    assert {"l", "~p", "q", "~q"} <= lits(ext, "-", Mode.P)


def test_execution1_trace(load):
    for variant in Variant:
        ext = compute_extension(load("execution1"), variant)
        assert {"alpha", "beta", "zeta", "theta", "mu", "gamma"} <= rules_(
            ext, "+", Mode.C
        )
        assert {"nu", "kappa"} <= rules_(ext, "-", Mode.C)
        assert {"f1", "f2", "~a", "b"} <= lits(ext, "+", Mode.C)
        assert {"a", "b"} == lits(ext, "+", Mode.O)
        assert "c" in lits(ext, "-", Mode.O)


def test_execution2_cautious_and_simple(load):
    cautious = compute_extension(load("execution2"), Variant.CAUTIOUS)
    assert {"eta", "~zeta", "kappa"} <= rules_(cautious, "+", Mode.O)
    assert "theta" in rules_(cautious, "-", Mode.O)
    assert "theta" in rules_(cautious, "-", Mode.P)
    assert "mu" in rules_(cautious, "-", Mode.O)
    assert "~c" in lits(cautious, "+", Mode.C)
    assert "c" in lits(cautious, "+", Mode.O)
    simple = compute_extension(load("execution2"), Variant.SIMPLE)
    assert "~zeta" in rules_(simple, "-", Mode.O)


def test_example4_defeater_reinstates(load):
    ext = compute_extension(load("example4"), Variant.SIMPLE)
    assert "alpha" in rules_(ext, "+", Mode.C)
    assert "~eta" in rules_(ext, "-", Mode.C)
    assert "b" in lits(ext, "+", Mode.C)
    assert "~epsilon" in rules_(ext, "-", Mode.C)


def test_example4_label_mismatch_cannot_reinstate():
    # the reinstating conclusion names sigma, not alpha or epsilon, so the
    # simple variant cannot use it on alpha's behalf
    source = """
    fact a.
    beta: => C (alpha: a => C b).
    eta: => C c.
    gamma: c => C ~(epsilon: a => C b).
    nu: => C ~(sigma: a => C b).
    nu > gamma.
    """
    ext = compute_extension(parse_theory(source), Variant.SIMPLE)
    assert "alpha" in rules_(ext, "-", Mode.C)


def test_example4_cautious_reinstates_across_labels():
    # under the cautious reading any rule clashing with the attacker's
    # conclusion can defend, whatever label it concludes
    source = """
    fact a.
    beta: => C (alpha: a => C b).
    eta: => C c.
    lam: ~> C (sigma: a => C b).
    gamma: c => C ~(epsilon: a => C b).
    lam > gamma.
    """
    simple = compute_extension(parse_theory(source), Variant.SIMPLE)
    cautious = compute_extension(parse_theory(source), Variant.CAUTIOUS)
    assert "alpha" in rules_(simple, "-", Mode.C)
    assert "alpha" in rules_(cautious, "+", Mode.C)


def test_example6_simple_twin_permissions(load):
    ext = compute_extension(load("example6"), Variant.SIMPLE)
    assert {"alpha", "~alpha"} == rules_(ext, "+", Mode.P)
    assert {"alpha", "~alpha"} <= rules_(ext, "-", Mode.C)


def test_example8_both_conflicting_rules_proved(load):
    ext = compute_extension(load("example8"), Variant.CAUTIOUS)
    assert {"gamma", "zeta"} <= rules_(ext, "+", Mode.C)


def test_loop_is_undetermined(load):
    ext = compute_extension(load("loop"), Variant.CAUTIOUS)
    assert ext.undetermined == {(Mode.C, L("x"))}
    assert "x" in lits(ext, "-", Mode.O)
    assert "x" in lits(ext, "-", Mode.P)


def test_compensation_chain_fires_on_violation():
    source = """
    fact a.
    duty: a => O b * c.
    breach: a => C ~b.
    """
    ext = compute_extension(parse_theory(source), Variant.CAUTIOUS)
    assert {"b", "c"} <= lits(ext, "+", Mode.O)
    # complying instead stops the chain before the reparation
    ext2 = compute_extension(
        parse_theory("fact a. duty: a => O b * c. comply: a => C b."),
        Variant.CAUTIOUS,
    )
    assert "b" in lits(ext2, "+", Mode.O)
    assert "c" in lits(ext2, "-", Mode.O)


def test_obligation_of_rule_steps_chain_when_rule_absent(load):
    # the first chain element is an obliged rule that never enters the
    # system, which violates the obligation and activates the next element
    ext = compute_extension(load("execution2"), Variant.CAUTIOUS)
    assert "eta" in rules_(ext, "+", Mode.O)
    assert "eta" in rules_(ext, "-", Mode.C)
    assert "c" in lits(ext, "+", Mode.O)


def test_invalid_theory_is_rejected():
    theory = parse_theory("r: a => C b. r: a => C c.")
    with pytest.raises(ValueError, match="invalid theory"):
        compute_extension(theory, Variant.CAUTIOUS)


def test_query_outcomes(load):
    theory = load("execution1")
    assert query(theory, Variant.SIMPLE, parse_tagged_formula("+dO a")) == PROVED
    assert query(theory, Variant.SIMPLE, parse_tagged_formula("+dO c")) == REFUTED
    assert query(theory, Variant.SIMPLE, parse_tagged_formula("-dO c")) == PROVED
    assert query(theory, Variant.SIMPLE, parse_tagged_formula("+dmC nu")) == REFUTED
    assert (
        query(load("loop"), Variant.SIMPLE, parse_tagged_formula("+dC x"))
        == UNDETERMINED
    )
    assert (
        query(theory, Variant.SIMPLE, parse_tagged_formula("+dC ghost"))
        == UNKNOWN_SUBJECT
    )


def test_diff_variants_execution2(load):
    rows = diff_variants(load("execution2"))
    flagged = {(str(mode), str(subject)) for mode, _, subject, _, _ in rows}
    assert ("O", "~zeta") in flagged
    by_key = {(str(m), str(s)): (a, b) for m, _, s, a, b in rows}
    assert by_key[("O", "~zeta")] == (REFUTED, PROVED)


def test_diff_variants_empty_without_meta_rules(load):
    assert diff_variants(load("nometa")) == []


def test_diff_variants_twin_permissions(load):
    # permitting a rule and permitting its absence is fine in the simple
    # reading but a conflict in the cautious one, so the two permission
    # verdicts flip between the variants
    rows = diff_variants(load("example6"))
    by_key = {(str(m), str(s)): (a, b) for m, _, s, a, b in rows}
    assert by_key[("P", "alpha")] == (PROVED, REFUTED)
    assert by_key[("P", "~alpha")] == (PROVED, REFUTED)


def test_facts_and_top_rules_are_seeded(load):
    theory = load("execution2")
    for variant in Variant:
        ext = compute_extension(theory, variant)
        for fact in theory.facts:
            assert fact in ext.positive(Mode.C)
        for rule in theory.rules:
            assert RuleRef(rule.label) in ext.positive_rules(Mode.C)


@given(st.integers(min_value=0, max_value=10_000))
@settings(max_examples=50, deadline=None)
def test_obligation_implies_permission(seed):
    theory = random_theory(seed, 50)
    for variant in Variant:
        ext = compute_extension(theory, variant)
        assert ext.positive(Mode.O) <= ext.positive(Mode.P)
        assert ext.positive_rules(Mode.O) <= ext.positive_rules(Mode.P)


@given(st.integers(min_value=0, max_value=10_000))
@settings(max_examples=30, deadline=None)
def test_scan_order_does_not_change_the_extension(seed):
    theory = random_theory(seed, 45)
    baseline = compute_extension(theory, Variant.CAUTIOUS)
    for shuffle_seed in (1, 2):
        shuffled = run_engine(theory, Variant.CAUTIOUS, order_seed=shuffle_seed)
        assert shuffled.extension() == baseline


def test_iteration_count_is_bounded(load):
    for name in ("example3", "execution1", "execution2"):
        theory = load(name)
        state = run_engine(theory, Variant.CAUTIOUS)
        assert state.iterations <= len(modal_herbrand_base(theory)) + 1


def test_decided_and_undetermined_partition_the_base(load):
    theory = load("execution2")
    ext = compute_extension(theory, Variant.CAUTIOUS)
    decided = sum(len(s) for s in ext.literals.values()) + sum(
        len(s) for s in ext.rules.values()
    )
    assert decided + len(ext.undetermined) == len(modal_herbrand_base(theory))
