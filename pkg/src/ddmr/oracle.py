"""Literal-minded evaluator of the proof conditions, used as ground truth.

Where the engine maintains live indexes and simplifies the theory as it
goes, this module re-reads the original theory on every question: which
rules support a subject, which attack it, which defend it, whether a rule
is applicable or discarded against the tags established so far.  One
``step`` adds every tagged conclusion whose full proof condition the
current tag store satisfies; saturating to a fixpoint yields the
extension.  Tags never derived stay undetermined.

The derivation route is deliberately independent of the engine: no shared
indexes, no antecedent stripping, no rule deletion, only the conflict
predicates and the data model are common.  Slow by design -- use the size
budget -- and meant for cross-checking the engine at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .conflicts import Variant, conflicts
from .model import (
    DeonticRuleExpression,
    Extension,
    Literal,
    ModalLiteral,
    Mode,
    Rule,
    RuleExpression,
    RuleRef,
    Sign,
    Theory,
    content_key,
    herbrand_base,
    theory_size,
)

_ATTACK_MODES = {Mode.C: (Mode.C,), Mode.O: (Mode.O, Mode.P), Mode.P: (Mode.O,)}
_DEFEND_MODES = {Mode.C: (Mode.C,), Mode.O: (Mode.O,), Mode.P: (Mode.O, Mode.P)}

DEFAULT_BUDGET = 200


class OracleBudgetError(ValueError):
    """Theory too large for exhaustive proof-condition evaluation."""


@dataclass
class TagStore:
    """Established tags: (mode, subject) -> True for +, False for -."""

    lit: dict = field(default_factory=dict)
    rule: dict = field(default_factory=dict)

    def get(self, mode: Mode, subject):
        table = self.rule if isinstance(subject, RuleRef) else self.lit
        return table.get((mode, subject))

    def holds(self, mode: Mode, subject, positive: bool) -> bool:
        return self.get(mode, subject) is (True if positive else False)

    def size(self) -> int:
        return len(self.lit) + len(self.rule)


def _item_condition(item):
    """The (mode, subject, wanted sign) an antecedent item waits for."""
    if isinstance(item, Literal):
        return (Mode.C, item, True)
    if isinstance(item, ModalLiteral):
        return (item.mode, item.inner, not item.negated)
    if isinstance(item, RuleExpression):
        return (Mode.C, RuleRef(item.rule.label, item.positive), True)
    if isinstance(item, DeonticRuleExpression):
        return (
            item.mode,
            RuleRef(item.expr.rule.label, item.expr.positive),
            not item.negated,
        )
    raise TypeError(repr(item))


def applicable(theory: Theory, store: TagStore, rule: Rule, index: int = 1) -> bool:
    """Every antecedent item established, the rule itself constitutively held,
    and each chain element before the index in force and violated."""
    if index > 1 and rule.mode is not Mode.O:
        raise ValueError("chain index on a non-obligation rule")
    if not store.holds(Mode.C, RuleRef(rule.label, True), True):
        return False
    for item in rule.antecedent:
        mode, subject, wanted = _item_condition(item)
        if not store.holds(mode, subject, wanted):
            return False
    for j in range(index - 1):
        elem = rule.consequent[j]
        if isinstance(elem, Literal):
            if not (
                store.holds(Mode.O, elem, True)
                and store.holds(Mode.C, elem.complement(), True)
            ):
                return False
        else:
            ref = RuleRef(elem.rule.label, elem.positive)
            if not (store.holds(Mode.O, ref, True) and store.holds(Mode.C, ref, False)):
                return False
    return True


def discarded(theory: Theory, store: TagStore, rule: Rule, index: int = 1) -> bool:
    """The strong-negation dual of applicability: some condition refuted."""
    if index > 1 and rule.mode is not Mode.O:
        raise ValueError("chain index on a non-obligation rule")
    if store.holds(Mode.C, RuleRef(rule.label, True), False):
        return True
    for item in rule.antecedent:
        mode, subject, wanted = _item_condition(item)
        if store.holds(mode, subject, not wanted):
            return True
    for j in range(index - 1):
        elem = rule.consequent[j]
        if isinstance(elem, Literal):
            if store.holds(Mode.O, elem, False) or store.holds(
                Mode.C, elem.complement(), False
            ):
                return True
        else:
            ref = RuleRef(elem.rule.label, elem.positive)
            if store.holds(Mode.O, ref, False) or store.holds(Mode.C, ref, True):
                return True
    return False


class _Evaluator:
    def __init__(self, theory: Theory, variant: Variant):
        self.theory = theory
        self.variant = variant
        self.by_label = theory.rules_by_label()
        self.rules = sorted(self.by_label.values(), key=lambda r: r.label)
        self.top = theory.top_labels()
        self.sup = theory.superiority

    # -- static domains, rebuilt by scanning the theory ---------------------

    def supporters(self, mode: Mode, subject):
        out = []
        for rule in self.rules:
            if rule.mode is not mode:
                continue
            for pos, elem in enumerate(rule.consequent, start=1):
                if isinstance(subject, Literal):
                    if elem == subject:
                        out.append((rule, pos))
                elif isinstance(elem, RuleExpression):
                    if (
                        elem.rule.label == subject.label
                        and elem.positive == subject.positive
                    ):
                        out.append((rule, pos))
        return out

    def _expr_of(self, ref: RuleRef) -> RuleExpression:
        return RuleExpression(self.by_label[ref.label], ref.positive)

    def expr_positions(self, rule: Rule):
        return [
            pos
            for pos, e in enumerate(rule.consequent, start=1)
            if isinstance(e, RuleExpression)
        ]

    def stronger(self, a: Rule, b: Rule) -> bool:
        return (a.label, b.label) in self.sup

    def fallback_stronger(self, a: Rule, b: Rule) -> bool:
        for ea in a.consequent:
            if not isinstance(ea, RuleExpression):
                continue
            for eb in b.consequent:
                if isinstance(eb, RuleExpression) and (
                    (ea.rule.label, eb.rule.label) in self.sup
                ):
                    return True
        return False

    def overrules(self, a: Rule, b: Rule) -> bool:
        if self.variant is Variant.SIMPLE:
            return self.stronger(a, b)
        return self.stronger(a, b) or (
            not self.stronger(b, a) and self.fallback_stronger(a, b)
        )

    # -- literal proof conditions -------------------------------------------

    def decide_literal(self, store: TagStore, mode: Mode, lit: Literal):
        comp = lit.complement()
        if mode is Mode.C:
            if lit in self.theory.facts:
                return True
            if comp in self.theory.facts:
                return False
        if mode is Mode.P:
            if store.holds(Mode.O, lit, True):
                return True
        sup = self.supporters(mode, lit)
        attackers = [
            (g, j)
            for am in _ATTACK_MODES[mode]
            for g, j in self.supporters(am, comp)
        ]
        defenders = [
            (z, k)
            for dm in _DEFEND_MODES[mode]
            for z, k in self.supporters(dm, lit)
        ]
        if self._positive(store, sup, attackers, defenders, self._beats_plain):
            return True
        if mode is Mode.P and not store.holds(Mode.O, lit, False):
            return None
        if self._negative(store, sup, attackers, defenders, self._beats_plain):
            return False
        return None

    def _beats_plain(self, z: Rule, g: Rule) -> bool:
        return self.stronger(z, g)

    def _positive(self, store, sup, attackers, defenders, beats) -> bool:
        if not any(
            b.is_defeasible and applicable(self.theory, store, b, i) for b, i in sup
        ):
            return False
        for g, j in attackers:
            if discarded(self.theory, store, g, j):
                continue
            if not any(
                applicable(self.theory, store, z, k) and beats(z, g)
                for z, k in defenders
            ):
                return False
        return True

    def _negative(self, store, sup, attackers, defenders, beats) -> bool:
        for b, i in sup:
            if not b.is_defeasible:
                continue
            if discarded(self.theory, store, b, i):
                continue
            if not any(
                applicable(self.theory, store, g, j)
                and all(
                    discarded(self.theory, store, z, k) or not beats(z, g)
                    for z, k in defenders
                )
                for g, j in attackers
            ):
                return False
        return True

    # -- rule proof conditions ----------------------------------------------

    def decide_rule(self, store: TagStore, mode: Mode, ref: RuleRef):
        rule = self.by_label[ref.label]
        expr = self._expr_of(ref)
        if mode is Mode.C:
            if ref.positive and ref.label in self.top:
                return True
            if any(conflicts(self.by_label[t], expr, self.variant) for t in self.top):
                return False
        if mode is Mode.P and store.holds(Mode.O, ref, True):
            return True
        sup = self.supporters(mode, ref)
        if self.variant is Variant.SIMPLE:
            verdict = self._decide_rule_simple(store, mode, ref, sup)
        else:
            verdict = self._decide_rule_cautious(store, mode, ref, sup)
        if verdict is False and mode is Mode.P and not store.holds(Mode.O, ref, False):
            return None
        return verdict

    def _attack_modes(self, mode: Mode):
        if self.variant is Variant.CAUTIOUS and mode is Mode.P:
            return (Mode.O, Mode.P)
        return _ATTACK_MODES[mode]

    def _decide_rule_simple(self, store, mode, ref, sup):
        target_key = content_key(self.by_label[ref.label])
        attackers = []  # (rule, elem label, position)
        for rule in self.rules:
            if rule.mode not in self._attack_modes(mode):
                continue
            for pos, elem in enumerate(rule.consequent, start=1):
                if (
                    isinstance(elem, RuleExpression)
                    and elem.positive != ref.positive
                    and content_key(elem.rule) == target_key
                ):
                    attackers.append((rule, elem.rule.label, pos))

        def defenders(attacked_label):
            out = []
            for rule in self.rules:
                if rule.mode not in _DEFEND_MODES[mode]:
                    continue
                for pos, elem in enumerate(rule.consequent, start=1):
                    if (
                        isinstance(elem, RuleExpression)
                        and elem.positive == ref.positive
                        and elem.rule.label in (ref.label, attacked_label)
                        and content_key(elem.rule) == target_key
                    ):
                        out.append((rule, pos))
            return out

        if any(
            b.is_defeasible and applicable(self.theory, store, b, i) for b, i in sup
        ):
            if all(
                discarded(self.theory, store, g, j)
                or any(
                    applicable(self.theory, store, z, k) and self.stronger(z, g)
                    for z, k in defenders(glabel)
                )
                for g, glabel, j in attackers
            ):
                return True
        refutes = True
        for b, i in sup:
            if not b.is_defeasible or discarded(self.theory, store, b, i):
                continue
            if not any(
                applicable(self.theory, store, g, j)
                and all(
                    discarded(self.theory, store, z, k) or not self.stronger(z, g)
                    for z, k in defenders(glabel)
                )
                for g, glabel, j in attackers
            ):
                refutes = False
                break
        return False if refutes else None

    def _decide_rule_cautious(self, store, mode, ref, sup):
        def attackers(anchor: Rule):
            out = []
            for rule in self.rules:
                if rule.mode not in self._attack_modes(mode):
                    continue
                if conflicts(rule, anchor, Variant.CAUTIOUS):
                    out.extend((rule, j) for j in self.expr_positions(rule))
            return out

        def defenders(against: Rule):
            out = []
            for rule in self.rules:
                if rule.mode not in _DEFEND_MODES[mode]:
                    continue
                if conflicts(rule, against, Variant.CAUTIOUS):
                    out.extend((rule, k) for k in self.expr_positions(rule))
            return out

        proved = False
        for b, i in sup:
            if not b.is_defeasible or not applicable(self.theory, store, b, i):
                continue
            if all(
                discarded(self.theory, store, g, j)
                or any(
                    applicable(self.theory, store, z, k) and self.overrules(z, g)
                    for z, k in defenders(g)
                )
                for g, j in attackers(b)
            ):
                proved = True
                break
        if proved:
            return True
        refutes = True
        for b, i in sup:
            if not b.is_defeasible or discarded(self.theory, store, b, i):
                continue
            if not any(
                applicable(self.theory, store, g, j)
                and all(
                    discarded(self.theory, store, z, k) or not self.overrules(z, g)
                    for z, k in defenders(g)
                )
                for g, j in attackers(b)
            ):
                refutes = False
                break
        return False if refutes else None


def step(theory: Theory, store: TagStore, variant: Variant) -> TagStore:
    """One saturation round: add every tag whose condition now holds."""
    ev = _Evaluator(theory, variant)
    out = TagStore(dict(store.lit), dict(store.rule))
    for subject in sorted(herbrand_base(theory), key=str):
        if isinstance(subject, RuleExpression):
            subject = RuleRef(subject.rule.label, subject.positive)
        for mode in Mode:
            if store.get(mode, subject) is not None:
                continue
            if isinstance(subject, Literal):
                verdict = ev.decide_literal(store, mode, subject)
            else:
                verdict = ev.decide_rule(store, mode, subject)
            if verdict is not None:
                key = (mode, subject)
                table = out.rule if isinstance(subject, RuleRef) else out.lit
                if key in table and table[key] != verdict:
                    raise AssertionError(f"incoherent oracle step at {key}")
                table[key] = verdict
    return out


def oracle_extension(
    theory: Theory, variant: Variant, budget: int = DEFAULT_BUDGET
) -> Extension:
    """Least fixpoint of ``step``; subjects never decided are undetermined."""
    size = theory_size(theory)
    if budget is not None and size > budget:
        raise OracleBudgetError(
            f"theory size {size} exceeds the oracle budget {budget}"
        )
    store = TagStore()
    while True:
        nxt = step(theory, store, variant)
        if nxt.size() == store.size():
            break
        store = nxt

    ext = Extension()
    for (mode, lit), positive in store.lit.items():
        ext.literals[(Sign.PLUS if positive else Sign.MINUS, mode)].add(lit)
    for (mode, ref), positive in store.rule.items():
        ext.rules[(Sign.PLUS if positive else Sign.MINUS, mode)].add(ref)
    for subject in herbrand_base(theory):
        if isinstance(subject, RuleExpression):
            subject = RuleRef(subject.rule.label, subject.positive)
        for mode in Mode:
            if store.get(mode, subject) is None:
                ext.undetermined.add((mode, subject))
    return ext


def check_equivalence(
    theory: Theory, variant: Variant, budget: int = DEFAULT_BUDGET
) -> dict:
    """Symmetric differences between the engine and oracle extensions.

    Empty dict on agreement; otherwise maps a set name to the pair of
    subject sets (engine only, oracle only).
    """
    from .engine import compute_extension

    engine_ext = compute_extension(theory, variant)
    oracle_ext = oracle_extension(theory, variant, budget)
    diffs: dict = {}
    for sign in Sign:
        for mode in Mode:
            for name, a, b in (
                (
                    f"{sign}d{mode}",
                    engine_ext.literals[(sign, mode)],
                    oracle_ext.literals[(sign, mode)],
                ),
                (
                    f"{sign}dm{mode}",
                    engine_ext.rules[(sign, mode)],
                    oracle_ext.rules[(sign, mode)],
                ),
            ):
                if a != b:
                    diffs[name] = (a - b, b - a)
    if engine_ext.undetermined != oracle_ext.undetermined:
        diffs["undetermined"] = (
            engine_ext.undetermined - oracle_ext.undetermined,
            oracle_ext.undetermined - engine_ext.undetermined,
        )
    return diffs
