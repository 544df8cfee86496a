"""Production rules, facts, and the persisted rule-base.

A rule reads ``IF <category> AND <symptom> THEN <cause> -> <repair>``.
The rule-base keeps rules ordered by id, enforces uniqueness of the
condition pair, and round-trips losslessly through a JSON file.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator


class KnowledgeBaseError(Exception):
    """Base class for rule-base errors."""


class EmptyFieldError(KnowledgeBaseError):
    """A rule field normalized to the empty string."""


class DuplicateRuleError(KnowledgeBaseError):
    """The normalized condition pair already exists in the rule-base."""


class RuleNotFoundError(KnowledgeBaseError):
    """No rule with the requested id."""


class ParseError(KnowledgeBaseError):
    """A rule file could not be parsed; the message names the bad record."""


def normalize(text: str) -> str:
    """Collapse whitespace runs to single spaces and strip the ends.

    Character case is preserved; comparisons elsewhere case-fold the
    result. Idempotent, and empty input stays empty (callers reject
    empties where they matter).
    """
    return " ".join(text.split())


def match_key(text: str) -> str:
    """Canonical comparison key: normalized and case-folded."""
    return normalize(text).casefold()


@dataclass(frozen=True, eq=False)
class Fact:
    """An attribute/value assertion held in working memory.

    Two facts are equal iff both slot and value match after
    normalization, case-insensitively.
    """

    slot: str
    value: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "slot", normalize(self.slot))
        object.__setattr__(self, "value", normalize(self.value))
        if not self.slot or not self.value:
            raise EmptyFieldError("fact slot and value must be non-empty")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Fact):
            return NotImplemented
        return (self.slot.casefold(), self.value.casefold()) == (
            other.slot.casefold(),
            other.value.casefold(),
        )

    def __hash__(self) -> int:
        return hash((self.slot.casefold(), self.value.casefold()))


@dataclass(frozen=True)
class Rule:
    """One production rule: two conditions, a conclusion, and a repair action."""

    id: int
    condition_a: str
    condition_b: str
    conclusion: str
    solution: str

    def __post_init__(self) -> None:
        for name in ("condition_a", "condition_b", "conclusion", "solution"):
            value = normalize(getattr(self, name))
            if not value:
                raise EmptyFieldError(f"rule field {name!r} is empty")
            object.__setattr__(self, name, value)
        if self.id < 1:
            raise ValueError(f"rule id must be positive, got {self.id}")

    @property
    def conditions(self) -> tuple[str, ...]:
        """Condition terms in matching order; the engine treats arity generically."""
        return (self.condition_a, self.condition_b)

    @property
    def pair(self) -> tuple[str, str]:
        """Comparison key of the condition pair (uniqueness and dedup key)."""
        return (match_key(self.condition_a), match_key(self.condition_b))


@dataclass(frozen=True)
class Diagnosis:
    """Outcome of firing a rule: the identified cause and its repair."""

    rule_id: int
    conclusion: str
    solution: str


@dataclass(eq=False)
class RuleBase:
    """Ordered, versioned collection of rules with unique condition pairs.

    ``version`` increases by one on every successful mutation. Ids are
    assigned by the store and never reused within the lifetime of the
    instance; a reloaded base continues above the highest stored id.

    A RuleBase handed to the inference side is treated as
    immutable-after-read; concurrent mutation is the caller's problem
    (the service layer serializes writers and swaps snapshots).
    """

    rules: list[Rule] = field(default_factory=list)
    version: int = 0
    _top_id: int = field(default=0, repr=False)

    def __post_init__(self) -> None:
        self.rules.sort(key=lambda r: r.id)
        self._check_consistent()
        self._top_id = max(self._top_id, max((r.id for r in self.rules), default=0))

    def _check_consistent(self) -> None:
        seen_ids: set[int] = set()
        seen_pairs: set[tuple[str, str]] = set()
        for rule in self.rules:
            if rule.id in seen_ids:
                raise DuplicateRuleError(f"duplicate rule id {rule.id}")
            if rule.pair in seen_pairs:
                raise DuplicateRuleError(
                    f"duplicate condition pair {rule.pair!r}"
                )
            seen_ids.add(rule.id)
            seen_pairs.add(rule.pair)

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self) -> Iterator[Rule]:
        return iter(self.rules)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RuleBase):
            return NotImplemented
        return self.rules == other.rules and self.version == other.version

    def get(self, rule_id: int) -> Rule:
        """Return the rule with ``rule_id`` or raise RuleNotFoundError."""
        for rule in self.rules:
            if rule.id == rule_id:
                return rule
        raise RuleNotFoundError(f"no rule with id {rule_id}")

    def find_pair(self, condition_a: str, condition_b: str) -> Rule | None:
        """Look up a rule by its normalized condition pair."""
        wanted = (match_key(condition_a), match_key(condition_b))
        for rule in self.rules:
            if rule.pair == wanted:
                return rule
        return None

    def categories(self) -> list[str]:
        """Distinct first conditions, first-occurrence spelling, sorted."""
        seen: dict[str, str] = {}
        for rule in self.rules:
            seen.setdefault(match_key(rule.condition_a), rule.condition_a)
        return [seen[k] for k in sorted(seen)]

    def add_rule(
        self, condition_a: str, condition_b: str, conclusion: str, solution: str
    ) -> Rule:
        """Append a new rule and bump the version.

        Raises:
            EmptyFieldError: any field normalizes to empty.
            DuplicateRuleError: the condition pair is already present.
        """
        rule = Rule(self._top_id + 1, condition_a, condition_b, conclusion, solution)
        if self.find_pair(rule.condition_a, rule.condition_b) is not None:
            raise DuplicateRuleError(
                f"rule with conditions ({rule.condition_a!r}, {rule.condition_b!r}) "
                "already exists"
            )
        self.rules.append(rule)
        self._top_id = rule.id
        self.version += 1
        return rule

    def update_rule(self, rule_id: int, **fields: str) -> Rule:
        """Replace fields of an existing rule in place, keeping its id.

        Accepts any of condition_a, condition_b, conclusion, solution.
        Raises RuleNotFoundError, EmptyFieldError, or DuplicateRuleError
        (when the new condition pair collides with another rule).
        """
        unknown = set(fields) - {"condition_a", "condition_b", "conclusion", "solution"}
        if unknown:
            raise ValueError(f"unknown rule fields: {sorted(unknown)}")
        index = next(
            (i for i, r in enumerate(self.rules) if r.id == rule_id), None
        )
        if index is None:
            raise RuleNotFoundError(f"no rule with id {rule_id}")
        current = self.rules[index]
        updated = Rule(
            rule_id,
            fields.get("condition_a", current.condition_a),
            fields.get("condition_b", current.condition_b),
            fields.get("conclusion", current.conclusion),
            fields.get("solution", current.solution),
        )
        clash = self.find_pair(updated.condition_a, updated.condition_b)
        if clash is not None and clash.id != rule_id:
            raise DuplicateRuleError(
                f"conditions ({updated.condition_a!r}, {updated.condition_b!r}) "
                f"collide with rule {clash.id}"
            )
        self.rules[index] = updated
        self.version += 1
        return updated

    def delete_rule(self, rule_id: int) -> None:
        """Remove a rule; its id is retired, never handed out again."""
        index = next(
            (i for i, r in enumerate(self.rules) if r.id == rule_id), None
        )
        if index is None:
            raise RuleNotFoundError(f"no rule with id {rule_id}")
        del self.rules[index]
        self.version += 1

    def clone(self) -> RuleBase:
        """Independent copy sharing the (immutable) Rule values."""
        copy = RuleBase(list(self.rules), self.version)
        copy._top_id = self._top_id
        return copy


# On-disk field names mirror the four rule-table columns.
_FILE_KEYS = ("id", "if", "and", "then", "solution")


def to_file_dict(rulebase: RuleBase) -> dict:
    """Plain-dict form of ``rulebase`` in the canonical file layout."""
    return {
        "version": rulebase.version,
        "rules": [
            {
                "id": r.id,
                "if": r.condition_a,
                "and": r.condition_b,
                "then": r.conclusion,
                "solution": r.solution,
            }
            for r in rulebase.rules
        ],
    }


def dumps(rulebase: RuleBase) -> str:
    """Canonical serialization; identical bases produce identical bytes."""
    return json.dumps(to_file_dict(rulebase), indent=2, ensure_ascii=False) + "\n"


def from_file_dict(data: object) -> RuleBase:
    """Build a RuleBase from parsed JSON, validating every record.

    Raises ParseError naming the offending record index (0-based within
    the ``rules`` array), including both indices for duplicate pairs.
    """
    if not isinstance(data, dict):
        raise ParseError("top level must be a JSON object")
    version = data.get("version")
    if not isinstance(version, int) or isinstance(version, bool) or version < 0:
        raise ParseError("'version' must be a non-negative integer")
    records = data.get("rules")
    if not isinstance(records, list):
        raise ParseError("'rules' must be an array")

    rules: list[Rule] = []
    ids: dict[int, int] = {}
    pairs: dict[tuple[str, str], int] = {}
    for index, record in enumerate(records):
        if not isinstance(record, dict):
            raise ParseError(f"record {index}: not an object")
        missing = [k for k in _FILE_KEYS if k not in record]
        if missing:
            raise ParseError(f"record {index}: missing fields {missing}")
        rule_id = record["id"]
        if not isinstance(rule_id, int) or isinstance(rule_id, bool) or rule_id < 1:
            raise ParseError(f"record {index}: 'id' must be a positive integer")
        texts = {}
        for key in ("if", "and", "then", "solution"):
            value = record[key]
            if not isinstance(value, str):
                raise ParseError(f"record {index}: {key!r} must be a string")
            texts[key] = value
        try:
            rule = Rule(rule_id, texts["if"], texts["and"], texts["then"], texts["solution"])
        except EmptyFieldError as exc:
            raise ParseError(f"record {index}: {exc}") from exc
        if rule.id in ids:
            raise ParseError(
                f"records {ids[rule.id]} and {index} share rule id {rule.id}"
            )
        if rule.pair in pairs:
            raise ParseError(
                f"records {pairs[rule.pair]} and {index} share the condition pair "
                f"({rule.condition_a!r}, {rule.condition_b!r})"
            )
        ids[rule.id] = index
        pairs[rule.pair] = index
        rules.append(rule)

    return RuleBase(rules, version)


def load(path: str | Path) -> RuleBase:
    """Read and validate a rule-base file.

    Raises ParseError for malformed content; OSError surfaces untouched
    for I/O failures.
    """
    raw = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return from_file_dict(data)


def save(rulebase: RuleBase, path: str | Path) -> None:
    """Write the rule-base atomically (temp file + rename in one directory)."""
    target = Path(path)
    payload = dumps(rulebase)
    fd, tmp_name = tempfile.mkstemp(
        dir=target.parent, prefix=f".{target.name}.", suffix=".tmp"
    )
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(payload)
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(tmp_name, target)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise
