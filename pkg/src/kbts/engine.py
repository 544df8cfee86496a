"""Forward-chaining inference and the interactive questionnaire.

The reasoner matches rule conditions against fact *values* only; slot
names ("category", "symptom", "conclusion") are labels for people, not
for the matcher. Fired conclusions are asserted back into working
memory, so rules can chain. Refraction (a rule fires at most once)
guarantees termination.

The questionnaire side compiles a rule-base into a two-level decision
tree: first question picks the problem category (condition_a), second
picks the symptom (condition_b), and every leaf is the diagnosis of
exactly one rule.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass, field
from typing import Iterable, Protocol, Sequence

from .rules import Diagnosis, Fact, KnowledgeBaseError, Rule, RuleBase, match_key


class EmptyRuleBaseError(KnowledgeBaseError):
    """A questionnaire cannot be built from zero rules."""


class SessionClosedError(KnowledgeBaseError):
    """The session already delivered its diagnosis (or was discarded)."""


class InvalidChoiceError(KnowledgeBaseError):
    """The answer matched no outgoing edge; carries the valid options."""

    def __init__(self, choice: str, valid_options: Sequence[str]):
        self.choice = choice
        self.valid_options = tuple(valid_options)
        super().__init__(
            f"{choice!r} is not one of: " + ", ".join(self.valid_options)
        )


class ConditionRule(Protocol):
    """What the matcher needs from a rule; arity is whatever len(conditions) says."""

    id: int
    conclusion: str
    solution: str

    @property
    def conditions(self) -> tuple[str, ...]: ...


@dataclass
class WorkingMemory:
    """Facts gathered so far plus the refraction record of fired rule ids."""

    facts: set[Fact] = field(default_factory=set)
    fired: set[int] = field(default_factory=set)

    def __post_init__(self) -> None:
        self._values = {match_key(f.value) for f in self.facts}

    def add(self, fact: Fact) -> bool:
        """Insert a fact; returns False if an equal fact was already held."""
        if fact in self.facts:
            return False
        self.facts.add(fact)
        self._values.add(match_key(fact.value))
        return True

    def holds_value(self, text: str) -> bool:
        """True iff some fact's value equals ``text`` (normalized, case-folded)."""
        return match_key(text) in self._values

    def __contains__(self, fact: Fact) -> bool:
        return fact in self.facts


def match_rule(rule: ConditionRule, memory: WorkingMemory) -> bool:
    """True iff every condition of ``rule`` is satisfied by some fact value."""
    return all(memory.holds_value(term) for term in rule.conditions)


def resolve_conflicts(
    candidates: Iterable[ConditionRule], memory: WorkingMemory
) -> list[ConditionRule]:
    """Order a conflict set: drop fired rules, then most-specific first.

    Specificity is the number of condition terms; ties break by
    ascending rule id, so the order is total and runs are repeatable.
    """
    live = [rule for rule in candidates if rule.id not in memory.fired]
    return sorted(live, key=lambda rule: (-len(rule.conditions), rule.id))


def forward_chain(
    rulebase: Iterable[ConditionRule], initial_facts: Iterable[Fact]
) -> list[Diagnosis]:
    """Run the rule-base to fixpoint over the initial facts.

    Each pass collects every unfired rule whose conditions all hold,
    fires them in conflict-resolution order, and asserts each fired
    conclusion as Fact("conclusion", text) so later passes can chain on
    it. Stops when a pass fires nothing. Every pass fires at least one
    rule, so there are at most as many passes as rules.

    Returns the diagnoses in firing order; empty input facts yield [].
    """
    memory = WorkingMemory()
    for fact in initial_facts:
        memory.add(fact)

    rules = list(rulebase)
    diagnoses: list[Diagnosis] = []
    while True:
        matched = (rule for rule in rules if match_rule(rule, memory))
        batch = resolve_conflicts(matched, memory)
        if not batch:
            return diagnoses
        for rule in batch:
            memory.fired.add(rule.id)
            memory.add(Fact("conclusion", rule.conclusion))
            diagnoses.append(Diagnosis(rule.id, rule.conclusion, rule.solution))


# --- decision-tree questionnaire ----------------------------------------

CATEGORY_QUESTION = "What type of problem are you having?"
SYMPTOM_QUESTION = "Which symptom do you observe?"


@dataclass(frozen=True)
class Leaf:
    """Terminal node: the diagnosis of the single rule this path encodes."""

    diagnosis: Diagnosis


@dataclass(frozen=True)
class Node:
    """Question node; edges are (label, child) ordered for stable option lists."""

    question: str
    edges: tuple[tuple[str, "Node | Leaf"], ...]

    @property
    def options(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.edges)

    def follow(self, choice: str) -> "Node | Leaf":
        """Child for ``choice``, compared normalized and case-folded."""
        wanted = match_key(choice)
        for label, child in self.edges:
            if match_key(label) == wanted:
                return child
        raise InvalidChoiceError(choice, self.options)


@dataclass(frozen=True)
class DecisionTree:
    root: Node

    def leaves(self) -> list[Leaf]:
        """All leaves in option order (depth-first)."""
        found: list[Leaf] = []
        stack: list[Node | Leaf] = [self.root]
        while stack:
            node = stack.pop()
            if isinstance(node, Leaf):
                found.append(node)
            else:
                stack.extend(child for _, child in reversed(node.edges))
        return found


def build_decision_tree(rulebase: RuleBase | Iterable[Rule]) -> DecisionTree:
    """Compile a rule-base into the two-question tree.

    The category level has one edge per distinct condition_a, the
    symptom level one edge per condition_b within that category; both
    are sorted by normalized label and keep the spelling of the
    first-seen occurrence. Condition-pair uniqueness in the rule-base
    makes every leaf correspond to exactly one rule.
    """
    rules = list(rulebase)
    if not rules:
        raise EmptyRuleBaseError("cannot build a questionnaire from zero rules")

    labels: dict[str, str] = {}
    by_category: dict[str, list[Rule]] = {}
    for rule in rules:
        key = match_key(rule.condition_a)
        labels.setdefault(key, rule.condition_a)
        by_category.setdefault(key, []).append(rule)

    category_edges = []
    for key in sorted(by_category):
        symptom_edges = tuple(
            (rule.condition_b,
             Leaf(Diagnosis(rule.id, rule.conclusion, rule.solution)))
            for rule in sorted(by_category[key], key=lambda r: match_key(r.condition_b))
        )
        category_edges.append((labels[key], Node(SYMPTOM_QUESTION, symptom_edges)))
    return DecisionTree(Node(CATEGORY_QUESTION, tuple(category_edges)))


@dataclass(frozen=True)
class Question:
    """A question to put to the user together with its legal answers."""

    text: str
    options: tuple[str, ...]


@dataclass
class Session:
    """One walk through the questionnaire, pinned to the tree it started on.

    The tree is captured at creation, so later rule-base edits never
    shift the ground under an open session. ``cursor`` is None once the
    diagnosis has been delivered.
    """

    session_id: str
    tree_version: int
    tree: DecisionTree
    cursor: Node | None
    transcript: list[tuple[str, str]] = field(default_factory=list)

    @property
    def closed(self) -> bool:
        return self.cursor is None


def start_session(rulebase: RuleBase) -> tuple[Session, Question]:
    """Open a questionnaire session; returns it with the first question."""
    tree = build_decision_tree(rulebase)
    session = Session(
        session_id=uuid.uuid4().hex,
        tree_version=rulebase.version,
        tree=tree,
        cursor=tree.root,
    )
    return session, Question(tree.root.question, tree.root.options)


def answer(session: Session, choice: str) -> Question | Diagnosis:
    """Advance the session by one answer.

    Returns the next Question, or the Diagnosis once a leaf is reached
    (which also closes the session). Raises InvalidChoiceError for an
    answer that matches no option and SessionClosedError afterwards.
    """
    if session.cursor is None:
        raise SessionClosedError(f"session {session.session_id} is closed")
    node = session.cursor
    wanted = match_key(choice)
    for label, child in node.edges:
        if match_key(label) == wanted:
            break
    else:
        raise InvalidChoiceError(choice, node.options)
    session.transcript.append((node.question, label))
    if isinstance(child, Leaf):
        session.cursor = None
        return child.diagnosis
    session.cursor = child
    return Question(child.question, child.options)
