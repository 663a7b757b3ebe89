"""Object language for defeasible deontic theories with meta-rules.

A theory is a triple (facts, rules, superiority).  Facts are plain literals.
Rules are labelled conditionals carrying one of three modes -- constitutive
(C), obligation (O), permission (P) -- and one of two arrows: defeasible
rules can establish their conclusion, defeaters can only block the opposite
conclusion.  An obligation rule may conclude a reparation chain ``c1 * c2 *
...`` whose later elements come in force only when the earlier obligations
are violated.

A *meta-rule* is a rule that mentions other rules: rule expressions (a rule
or its negation) may occur among a rule's antecedents or conclusion
elements.  Only one level of nesting is allowed -- a meta-rule never occurs
inside another rule.

This module holds the immutable data types plus the structural helpers the
rest of the package is built on: complements, label-insensitive content
comparison, Herbrand bases, the size metric, the extended superiority
relation and theory validation.  Everything here is pure; values can be
shared freely between threads.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator, Union


class Mode(enum.Enum):
    """Derivation mode: constitutive, obligation or permission."""

    C = "C"
    O = "O"
    P = "P"

    def __str__(self) -> str:
        return self.value


DEONTIC_MODES = (Mode.O, Mode.P)


class Arrow(enum.Enum):
    DEFEASIBLE = "=>"
    DEFEATER = "~>"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Literal:
    """A propositional atom or its negation."""

    atom: str
    positive: bool = True

    def complement(self) -> "Literal":
        return Literal(self.atom, not self.positive)

    def __str__(self) -> str:
        return self.atom if self.positive else "~" + self.atom


@dataclass(frozen=True)
class ModalLiteral:
    """O(l) / P(l), possibly under outer negation: ~O(l), ~P(l).

    The mode is never C; constitutive statements are bare literals.
    """

    mode: Mode
    inner: Literal
    negated: bool = False

    def __post_init__(self) -> None:
        if self.mode not in DEONTIC_MODES:
            raise ValueError("modal literals take mode O or P")

    def complement(self) -> "ModalLiteral":
        return ModalLiteral(self.mode, self.inner, not self.negated)

    def __str__(self) -> str:
        neg = "~" if self.negated else ""
        return f"{neg}{self.mode}({self.inner})"


@dataclass(frozen=True)
class RuleExpression:
    """A rule or its negation.

    ``~alpha`` asserts that the rule named alpha (with that exact content) is
    absent from, or removed from, the rule system.
    """

    rule: "Rule"
    positive: bool = True

    def complement(self) -> "RuleExpression":
        return RuleExpression(self.rule, not self.positive)

    @property
    def label(self) -> str:
        return self.rule.label

    def __str__(self) -> str:
        neg = "" if self.positive else "~"
        return f"{neg}({self.rule})"


@dataclass(frozen=True)
class DeonticRuleExpression:
    """O[...] / P[...] over a rule expression, possibly negated outside."""

    mode: Mode
    expr: RuleExpression
    negated: bool = False

    def __post_init__(self) -> None:
        if self.mode not in DEONTIC_MODES:
            raise ValueError("deontic rule expressions take mode O or P")

    def complement(self) -> "DeonticRuleExpression":
        return DeonticRuleExpression(self.mode, self.expr, not self.negated)

    def __str__(self) -> str:
        neg = "~" if self.negated else ""
        return f"{neg}{self.mode}[{self.expr}]"


AntecedentItem = Union[Literal, ModalLiteral, RuleExpression, DeonticRuleExpression]
ChainElement = Union[Literal, RuleExpression]


@dataclass(frozen=True)
class Rule:
    """A labelled conditional ``label: antecedent arrow_mode consequent``.

    The consequent is stored as a non-empty tuple of chain elements; it has
    length one except for defeasible obligation rules, which may carry a
    reparation chain.  Chain elements are plain literals or rule
    expressions, never modal literals.
    """

    label: str
    antecedent: frozenset
    arrow: Arrow
    mode: Mode
    consequent: tuple

    def __post_init__(self) -> None:
        if not self.consequent:
            raise ValueError(f"rule {self.label}: empty consequent")
        if len(self.consequent) > 1 and (
            self.arrow is Arrow.DEFEATER or self.mode is not Mode.O
        ):
            raise ValueError(
                f"rule {self.label}: chains are restricted to defeasible obligation rules"
            )

    @property
    def is_defeasible(self) -> bool:
        return self.arrow is Arrow.DEFEASIBLE

    def is_meta(self) -> bool:
        """True when some antecedent item or conclusion element mentions a rule."""
        for item in self.antecedent:
            if isinstance(item, (RuleExpression, DeonticRuleExpression)):
                return True
        return any(isinstance(e, RuleExpression) for e in self.consequent)

    def nested_rules(self) -> Iterator["Rule"]:
        for item in self.antecedent:
            if isinstance(item, RuleExpression):
                yield item.rule
            elif isinstance(item, DeonticRuleExpression):
                yield item.expr.rule
        for elem in self.consequent:
            if isinstance(elem, RuleExpression):
                yield elem.rule

    def __str__(self) -> str:
        body = ", ".join(sorted(str(i) for i in self.antecedent))
        head = " * ".join(str(e) for e in self.consequent)
        sep = ", " if body else ""
        return f"{self.label}: {body}{sep}{self.arrow} {self.mode} {head}".replace(
            ":  ", ": "
        )


def complement(x):
    """Flip the outermost polarity of a literal, modal literal or rule expression."""
    return x.complement()


def content_key(rule: Rule):
    """Canonical form of a rule ignoring its own label.

    Nested rules keep their labels: two meta-rules only share content when
    the rules they mention are the same rules, not merely lookalikes.
    """
    return (
        frozenset(_item_key(i) for i in rule.antecedent),
        rule.arrow,
        rule.mode,
        tuple(_element_key(e) for e in rule.consequent),
    )


def _item_key(item: AntecedentItem):
    if isinstance(item, Literal):
        return ("lit", item.atom, item.positive)
    if isinstance(item, ModalLiteral):
        return ("mod", item.mode, item.negated, item.inner.atom, item.inner.positive)
    if isinstance(item, RuleExpression):
        return ("rex", item.positive, item.rule.label, content_key(item.rule))
    if isinstance(item, DeonticRuleExpression):
        return (
            "drex",
            item.mode,
            item.negated,
            item.expr.positive,
            item.expr.rule.label,
            content_key(item.expr.rule),
        )
    raise TypeError(f"not an antecedent item: {item!r}")


def _element_key(elem: ChainElement):
    if isinstance(elem, Literal):
        return ("lit", elem.atom, elem.positive)
    if isinstance(elem, RuleExpression):
        return ("rex", elem.positive, elem.rule.label, content_key(elem.rule))
    raise TypeError(f"not a chain element: {elem!r}")


def content_equal(a: Rule, b: Rule) -> bool:
    """Label-insensitive rule equality: same antecedent set, arrow, mode and chain."""
    return content_key(a) == content_key(b)


@dataclass(frozen=True)
class Theory:
    """Facts, rules and a superiority relation over rule labels."""

    facts: frozenset
    rules: tuple
    superiority: frozenset = frozenset()

    @staticmethod
    def build(facts=(), rules=(), superiority=()) -> "Theory":
        return Theory(frozenset(facts), tuple(rules), frozenset(superiority))

    def rules_by_label(self) -> dict:
        """Every rule appearing in the theory, nested ones included, by label."""
        out: dict = {}
        for rule in self.all_rules():
            out.setdefault(rule.label, rule)
        return out

    def all_rules(self) -> Iterator[Rule]:
        """Top-level rules first, then the rules nested inside them."""
        for rule in self.rules:
            yield rule
        for rule in self.rules:
            yield from rule.nested_rules()

    def top_labels(self) -> set:
        return {r.label for r in self.rules}


def _literal_occurrences(rule: Rule) -> Iterator[Literal]:
    for item in rule.antecedent:
        if isinstance(item, Literal):
            yield item
        elif isinstance(item, ModalLiteral):
            yield item.inner
        elif isinstance(item, RuleExpression):
            yield from _literal_occurrences(item.rule)
        elif isinstance(item, DeonticRuleExpression):
            yield from _literal_occurrences(item.expr.rule)
    for elem in rule.consequent:
        if isinstance(elem, Literal):
            yield elem
        else:
            yield from _literal_occurrences(elem.rule)


def _rule_occurrences(rule: Rule) -> int:
    n = 1
    for nested in rule.nested_rules():
        n += _rule_occurrences(nested)
    return n


def theory_size(t: Theory) -> int:
    """Occurrences of literals, plus occurrences of rules, plus 2 per superiority pair."""
    n = len(t.facts)
    for rule in t.rules:
        n += sum(1 for _ in _literal_occurrences(rule))
        n += _rule_occurrences(rule)
    return n + 2 * len(t.superiority)


def herbrand_base(t: Theory):
    """All literals and rule expressions the theory can speak about.

    Closed under complement: contains l and ~l for every literal occurring
    anywhere, and both polarities of every rule appearing in the theory.
    """
    literals: set = set()
    for fact in t.facts:
        literals.add(fact)
    for rule in t.rules:
        literals.update(_literal_occurrences(rule))
    lit_base = set()
    for lit in literals:
        lit_base.add(lit)
        lit_base.add(lit.complement())
    rule_base = set()
    for rule in t.all_rules():
        expr = RuleExpression(rule, True)
        rule_base.add(expr)
        rule_base.add(expr.complement())
    return lit_base | rule_base


def modal_herbrand_base(t: Theory):
    """The cross product of the three modes with the Herbrand base."""
    base = herbrand_base(t)
    return {(mode, subject) for mode in Mode for subject in base}


def concluded_labels(rule: Rule):
    """Labels of the rules a meta-rule concludes (the embedded label, under negation too)."""
    return [e.rule.label for e in rule.consequent if isinstance(e, RuleExpression)]


def extended_superiority(t: Theory):
    """The superiority relation plus pairs inherited from concluded rules.

    When two rules conclude rule expressions whose embedded labels are
    ordered by the superiority relation, the concluding rules inherit that
    ordering unless the relation already speaks about them.
    """
    sup = set(t.superiority)
    rules = [r for r in t.rules_by_label().values() if concluded_labels(r)]
    for a in rules:
        for b in rules:
            if a.label == b.label or (a.label, b.label) in sup:
                continue
            for u in concluded_labels(a):
                if any((u, v) in sup for v in concluded_labels(b)):
                    sup.add((a.label, b.label))
                    break
    return sup


class Sign(enum.Enum):
    PLUS = "+"
    MINUS = "-"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class RuleRef:
    """A rule expression by name: a label, or its negation, as a derivation subject."""

    label: str
    positive: bool = True

    def complement(self) -> "RuleRef":
        return RuleRef(self.label, not self.positive)

    def __str__(self) -> str:
        return self.label if self.positive else "~" + self.label


@dataclass(frozen=True)
class TaggedFormula:
    """±mode over a literal, or ±mode over a rule reference (the meta level)."""

    sign: Sign
    mode: Mode
    subject: Union[Literal, RuleRef]

    @property
    def meta(self) -> bool:
        return isinstance(self.subject, RuleRef)

    def __str__(self) -> str:
        level = "m" if self.meta else ""
        return f"{self.sign}d{level}{self.mode} {self.subject}"


TAG_KEYS = (
    "+dC", "-dC", "+dO", "-dO", "+dP", "-dP",
    "+dmC", "-dmC", "+dmO", "-dmO", "+dmP", "-dmP",
)


@dataclass
class Extension:
    """The decided tag sets of a theory, plus the subjects left undecided.

    ``literals[(sign, mode)]`` is a set of Literal; ``rules[(sign, mode)]``
    a set of RuleRef.  ``undetermined`` holds the (mode, subject) pairs the
    fixpoint never settled, subject being a Literal or RuleRef.
    """

    literals: dict = field(default_factory=dict)
    rules: dict = field(default_factory=dict)
    undetermined: set = field(default_factory=set)

    def __post_init__(self) -> None:
        for sign in Sign:
            for mode in Mode:
                self.literals.setdefault((sign, mode), set())
                self.rules.setdefault((sign, mode), set())

    def positive(self, mode: Mode):
        return self.literals[(Sign.PLUS, mode)]

    def negative(self, mode: Mode):
        return self.literals[(Sign.MINUS, mode)]

    def positive_rules(self, mode: Mode):
        return self.rules[(Sign.PLUS, mode)]

    def negative_rules(self, mode: Mode):
        return self.rules[(Sign.MINUS, mode)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Extension):
            return NotImplemented
        return (
            self.literals == other.literals
            and self.rules == other.rules
            and self.undetermined == other.undetermined
        )


def _has_cycle(pairs) -> bool:
    graph: dict = {}
    for a, b in pairs:
        graph.setdefault(a, set()).add(b)
        graph.setdefault(b, set())
    state = dict.fromkeys(graph, 0)  # 0 unvisited, 1 on stack, 2 done

    def visit(node) -> bool:
        state[node] = 1
        for succ in graph[node]:
            if state[succ] == 1 or (state[succ] == 0 and visit(succ)):
                return True
        state[node] = 2
        return False

    return any(state[n] == 0 and visit(n) for n in graph)


@dataclass
class ValidationReport:
    errors: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors


def validate(t: Theory) -> ValidationReport:
    """Structural checks.  Never raises; malformed theories come back as errors.

    Errors make a theory unusable for the reasoner; warnings flag shapes the
    reasoner accepts but that signal an inconsistent rule corpus (clashing
    facts, cycles in the plain or extended superiority relation).
    """
    report = ValidationReport()
    seen: dict = {}
    for rule in t.all_rules():
        key = content_key(rule)
        if rule.label in seen and seen[rule.label] != key:
            report.errors.append(
                f"label {rule.label} is used for two rules with different content"
            )
        seen[rule.label] = key
        if len(set(_element_key(e) for e in rule.consequent)) != len(rule.consequent):
            report.errors.append(f"rule {rule.label}: duplicate chain elements")
        for nested in rule.nested_rules():
            if nested.is_meta():
                report.errors.append(
                    f"rule {nested.label} nested inside {rule.label} is itself a meta-rule"
                )
    for fact in t.facts:
        if not isinstance(fact, Literal):
            report.errors.append(f"fact {fact} is not a plain literal")
    for a, b in sorted(t.superiority):
        for lab in (a, b):
            if lab not in seen:
                report.errors.append(f"superiority names unknown rule label {lab}")
    facts = set(t.facts)
    clashing = sorted(str(f) for f in facts if f.complement() in facts and f.positive)
    if clashing:
        report.warnings.append("contradictory facts: " + ", ".join(clashing))
    known_pairs = {(a, b) for a, b in t.superiority if a in seen and b in seen}
    if _has_cycle(known_pairs):
        report.warnings.append("cyclic superiority relation")
    elif not report.errors and _has_cycle(extended_superiority(t)):
        report.warnings.append("cyclic extended superiority relation")
    return report
