"""Conflict relations between rules and the opposition index built from them.

Two rules can clash in two senses:

* **simple** -- one concludes, or is, the negation of a rule with exactly
  the other's content (labels are free), recursively through the reparation
  chains of meta-rules;
* **cautious** -- additionally, rules with the same antecedent whose
  conclusions are incompatible: complementary heads under one mode, an
  obligation against a permission of the complement, and obligation chains
  that disagree at some position or where one is a proper prefix of the
  other.

Every simple conflict is a cautious conflict.  Both relations are symmetric
and irreflexive; a rule never conflicts with a content-identical copy of
itself of the same polarity.

``build_conflict_index`` precomputes, per rule appearing in a theory, who
produces it, who opposes it and who can come to its defence, for either
variant.  The index is immutable once built; the inference engine keeps its
own mutable record of defeated opposers.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .model import (
    Arrow,
    Literal,
    Mode,
    Rule,
    RuleExpression,
    RuleRef,
    Theory,
    content_key,
)


class Variant(enum.Enum):
    SIMPLE = "simple"
    CAUTIOUS = "cautious"

    def __str__(self) -> str:
        return self.value


def _as_expr(x) -> RuleExpression:
    if isinstance(x, Rule):
        return RuleExpression(x, True)
    return x


def _chain_elements_conflict(a: RuleExpression, b: RuleExpression, variant: Variant) -> bool:
    if variant is Variant.SIMPLE:
        return simply_conflicts(a, b)
    return cautiously_conflicts(a, b)


def _recursive_chain_clash(x: Rule, y: Rule, variant: Variant) -> bool:
    """Meta-rules clash when some chain elements of theirs do, at any indices."""
    if not (x.is_meta() and y.is_meta()):
        return False
    for ex in x.consequent:
        if not isinstance(ex, RuleExpression):
            continue
        for ey in y.consequent:
            if isinstance(ey, RuleExpression) and _chain_elements_conflict(
                ex, ey, variant
            ):
                return True
    return False


def simply_conflicts(a, b) -> bool:
    """One side is the negation of a rule with the other's exact content.

    Accepts rules or rule expressions.  For two positive meta-rules the
    check recurses into their chains: conflicting rule expressions at any
    positions make the meta-rules conflict.
    """
    ea, eb = _as_expr(a), _as_expr(b)
    if ea.positive != eb.positive:
        return content_key(ea.rule) == content_key(eb.rule)
    if ea.positive:
        return _recursive_chain_clash(ea.rule, eb.rule, Variant.SIMPLE)
    return False


def _elements_equal(x, y) -> bool:
    if isinstance(x, Literal) and isinstance(y, Literal):
        return x == y
    if isinstance(x, RuleExpression) and isinstance(y, RuleExpression):
        return (
            x.positive == y.positive
            and x.rule.label == y.rule.label
            and content_key(x.rule) == content_key(y.rule)
        )
    return False


def _elements_complementary(x, y) -> bool:
    if isinstance(x, Literal) and isinstance(y, Literal):
        return x == y.complement()
    if isinstance(x, RuleExpression) and isinstance(y, RuleExpression):
        return x.positive != y.positive and content_key(x.rule) == content_key(y.rule)
    return False


def _obligation_chains_clash(x: Rule, y: Rule) -> bool:
    """Same-antecedent defeasible obligation rules with incompatible chains.

    Incompatible means: equal up to some position where the elements are
    complementary, or one chain is a proper prefix of the other.
    """
    if not (
        x.mode is Mode.O
        and y.mode is Mode.O
        and x.arrow is Arrow.DEFEASIBLE
        and y.arrow is Arrow.DEFEASIBLE
    ):
        return False
    if frozenset(map(_hashable_item, x.antecedent)) != frozenset(
        map(_hashable_item, y.antecedent)
    ):
        return False
    cx, cy = x.consequent, y.consequent
    for i in range(min(len(cx), len(cy))):
        if _elements_complementary(cx[i], cy[i]):
            return True
        if not _elements_equal(cx[i], cy[i]):
            return False
    return len(cx) != len(cy)


def _hashable_item(item):
    from .model import _item_key

    return _item_key(item)


def _same_antecedent(x: Rule, y: Rule) -> bool:
    return frozenset(map(_hashable_item, x.antecedent)) == frozenset(
        map(_hashable_item, y.antecedent)
    )


def cautiously_conflicts(a, b) -> bool:
    """The simple-conflict shape, plus content-level incompatibility.

    Content clashes only arise between positive rules: same antecedent with
    complementary single conclusions under one mode and arrow, an O rule
    against a P rule for the complement, or incompatible obligation chains.
    Meta-rule chains are compared element-wise, at any pair of positions.
    """
    ea, eb = _as_expr(a), _as_expr(b)
    if ea.positive != eb.positive:
        return content_key(ea.rule) == content_key(eb.rule)
    if not ea.positive:
        return False
    x, y = ea.rule, eb.rule
    if content_key(x) == content_key(y):
        # identical content never clashes with itself, but a reparation
        # chain carrying two mutually conflicting expressions makes the
        # rule (and its content twins) self-conflicting
        return _recursive_chain_clash(x, y, Variant.CAUTIOUS)
    if (
        x.mode is y.mode
        and x.arrow is y.arrow
        and len(x.consequent) == 1
        and len(y.consequent) == 1
        and _same_antecedent(x, y)
        and _elements_complementary(x.consequent[0], y.consequent[0])
    ):
        return True
    if (
        {x.mode, y.mode} == {Mode.O, Mode.P}
        and x.arrow is y.arrow
        and len(x.consequent) == 1
        and len(y.consequent) == 1
        and _same_antecedent(x, y)
        and _elements_complementary(x.consequent[0], y.consequent[0])
    ):
        return True
    if _obligation_chains_clash(x, y):
        return True
    return _recursive_chain_clash(x, y, Variant.CAUTIOUS)


def conflicts(a, b, variant: Variant) -> bool:
    if variant is Variant.SIMPLE:
        return simply_conflicts(a, b)
    return cautiously_conflicts(a, b)


@dataclass
class ConflictIndex:
    """A theory's conflict relation over signed rule labels, plus lookups.

    ``conflicting`` maps each RuleRef (a rule label with a polarity) to the
    set of RuleRefs it clashes with under the chosen variant; the relation
    is symmetric.  ``producers`` maps a RuleRef to the (meta-)rules that
    conclude it, with the 1-based position it occupies in the producer's
    chain.  ``by_content`` supports the simple variant's defence lookup:
    rules concluding an element with a given content and polarity.
    """

    variant: Variant
    conflicting: dict = field(default_factory=dict)  # RuleRef -> set[RuleRef]
    producers: dict = field(default_factory=dict)  # RuleRef -> set[(label, index)]
    by_content: dict = field(default_factory=dict)  # (ckey, pos) -> [(label, elem_label, index)]
    modes: dict = field(default_factory=dict)  # label -> Mode
    infd: dict = field(default_factory=dict)  # (Mode, label) -> set[label], engine-owned

    _OPP_MODES = {
        Mode.C: (Mode.C,),
        Mode.O: (Mode.O, Mode.P),
        Mode.P: (Mode.O,),
    }
    _SUPP_MODES = {Mode.C: (Mode.C,), Mode.O: (Mode.O,), Mode.P: (Mode.O, Mode.P)}

    def rule_level(self, label: str) -> set:
        """Labels of rules conflicting with the positive rule ``label``."""
        return {
            ref.label for ref in self.conflicting.get(RuleRef(label), ()) if ref.positive
        }

    def meta_producers(self, label: str) -> set:
        """Rules concluding the positive expression of ``label``."""
        return {who for who, _ in self.producers.get(RuleRef(label), ())}

    def _opp_modes(self, mode: Mode):
        if self.variant is Variant.CAUTIOUS and mode is Mode.P:
            return (Mode.O, Mode.P)
        return self._OPP_MODES[mode]

    def opp(self, label: str, mode: Mode) -> set:
        """Rules whose conclusions conflict with ``label``, filtered by the
        modes that may oppose a conclusion of the given mode."""
        return {
            g
            for g in self.rule_level(label)
            if self.modes[g] in self._opp_modes(mode)
        }

    def supp(self, label: str, mode: Mode) -> set:
        """Other rules concluding something in conflict with an opposer."""
        out: set = set()
        for g in self.opp(label, mode):
            for z in self.rule_level(g):
                if z != label and self.modes[z] in self._SUPP_MODES[mode]:
                    out.add(z)
        return out


def build_conflict_index(theory: Theory, variant: Variant) -> ConflictIndex:
    """Precompute the conflict relation and conclusion lookups for a theory.

    Pair generation is bucketed -- by content for negation clashes and by
    antecedent for content clashes -- so only candidate pairs ever reach the
    full predicates; meta-rule chain clashes are joined through the element
    pairs found first.  The outcome matches the pairwise predicates exactly.
    """
    index = ConflictIndex(variant)
    by_label = theory.rules_by_label()
    labels = sorted(by_label)
    ckeys = {label: content_key(by_label[label]) for label in labels}

    for label in labels:
        index.conflicting[RuleRef(label, True)] = set()
        index.conflicting[RuleRef(label, False)] = set()
        index.producers.setdefault(RuleRef(label, True), set())
        index.producers.setdefault(RuleRef(label, False), set())
        index.modes[label] = by_label[label].mode
        for mode in Mode:
            index.infd[(mode, label)] = set()

    member_of: dict = {}  # chain element RuleRef -> set[(meta label, index)]
    for label in labels:
        rule = by_label[label]
        for pos, elem in enumerate(rule.consequent, start=1):
            if isinstance(elem, RuleExpression):
                ref = RuleRef(elem.rule.label, elem.positive)
                index.producers[ref].add((label, pos))
                member_of.setdefault(ref, set()).add((label, pos))
                key = (ckeys[elem.rule.label], elem.positive)
                index.by_content.setdefault(key, []).append(
                    (label, elem.rule.label, pos)
                )

    def connect(a: RuleRef, b: RuleRef) -> None:
        index.conflicting[a].add(b)
        index.conflicting[b].add(a)

    # Negation clashes: same content, opposite polarity.
    content_groups: dict = {}
    for label in labels:
        content_groups.setdefault(ckeys[label], []).append(label)
    for group in content_groups.values():
        for u in group:
            for v in group:
                connect(RuleRef(u, True), RuleRef(v, False))

    # Cautious content clashes need equal antecedents, so bucket on those.
    if variant is Variant.CAUTIOUS:
        ant_groups: dict = {}
        for label in labels:
            key = frozenset(map(_hashable_item, by_label[label].antecedent))
            ant_groups.setdefault(key, []).append(label)
        for group in ant_groups.values():
            for i, u in enumerate(group):
                for v in group[i + 1 :]:
                    if _content_clash(by_label[u], by_label[v]):
                        connect(RuleRef(u, True), RuleRef(v, True))

    # Meta-rule chains clash when elements of theirs do, at any positions.
    element_pairs = [
        (a, b)
        for a, others in index.conflicting.items()
        if a in member_of
        for b in others
        if b in member_of
    ]
    for a, b in element_pairs:
        for meta_a, _ in member_of[a]:
            for meta_b, _ in member_of[b]:
                connect(RuleRef(meta_a, True), RuleRef(meta_b, True))

    return index


def _content_clash(x: Rule, y: Rule) -> bool:
    """Cautious positive-pair clash, antecedent equality already established."""
    if (
        len(x.consequent) == 1
        and len(y.consequent) == 1
        and x.arrow is y.arrow
        and (x.mode is y.mode or {x.mode, y.mode} == {Mode.O, Mode.P})
        and _elements_complementary(x.consequent[0], y.consequent[0])
    ):
        return True
    return _obligation_chains_clash_same_antecedent(x, y)


def _obligation_chains_clash_same_antecedent(x: Rule, y: Rule) -> bool:
    if not (
        x.mode is Mode.O
        and y.mode is Mode.O
        and x.arrow is Arrow.DEFEASIBLE
        and y.arrow is Arrow.DEFEASIBLE
    ):
        return False
    cx, cy = x.consequent, y.consequent
    for i in range(min(len(cx), len(cy))):
        if _elements_complementary(cx[i], cy[i]):
            return True
        if not _elements_equal(cx[i], cy[i]):
            return False
    return len(cx) != len(cy)
