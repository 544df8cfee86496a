"""Fuzzy classification of power-on self-test beep patterns.

A beep is described by the duration of one tone in seconds plus a flag
for an unending train of beeps. Duration is fuzzified over five
overlapping trapezoids (very short through continuous); "infinite" is
not a point on the duration axis but the repeating-train flag, which
short-circuits classification. Each linguistic value carries one fixed
diagnosis message.

Trapezoid breakpoints are configuration: operators can replace them
(see MembershipFunctions.from_breakpoints) as long as the set still
covers every non-negative duration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence


class NegativeDurationError(ValueError):
    """Beep durations are lengths of time; negatives are rejected."""


class NotDefuzzifiableError(ValueError):
    """Requested a crisp duration for a value with no duration semantics."""


class LinguisticValue(Enum):
    VERY_SHORT = "very short"
    SHORT = "short"
    LONG = "long"
    VERY_LONG = "very long"
    CONTINUOUS = "continuous"
    INFINITE = "infinite"


# Ascending beep length; ties in classification resolve toward the
# later entry (report the more severe reading, never the milder one).
DURATION_ORDER = (
    LinguisticValue.VERY_SHORT,
    LinguisticValue.SHORT,
    LinguisticValue.LONG,
    LinguisticValue.VERY_LONG,
    LinguisticValue.CONTINUOUS,
)

DIAGNOSIS_MESSAGES: Mapping[LinguisticValue, str] = {
    LinguisticValue.VERY_SHORT: "normal POST, system is OK",
    LinguisticValue.SHORT: "POST error",
    LinguisticValue.LONG: "system board problem",
    LinguisticValue.VERY_LONG: "3270 keyboard card",
    LinguisticValue.CONTINUOUS: "power supply, system board, or keyboard problem",
    LinguisticValue.INFINITE: "power supply or system board problem or keyboard",
}


@dataclass(frozen=True)
class BeepPattern:
    """One observed beep: tone length in seconds, plus the unending-train flag."""

    duration_seconds: float
    repeating_without_end: bool = False

    def __post_init__(self) -> None:
        if not math.isfinite(self.duration_seconds) or self.duration_seconds < 0:
            raise NegativeDurationError(
                f"duration must be a finite non-negative number of seconds, "
                f"got {self.duration_seconds!r}"
            )


@dataclass(frozen=True)
class Trapezoid:
    """Membership shape: rises a->b, plateau b->c, falls c->d.

    c and d may be infinite for a right-open plateau.
    """

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self) -> None:
        if not (self.a <= self.b <= self.c <= self.d):
            raise ValueError(f"breakpoints must be ordered, got {self}")
        if math.isinf(self.a) or math.isinf(self.b):
            raise ValueError("left side of a trapezoid must be finite")

    def degree(self, x: float) -> float:
        if x < self.a or x > self.d:
            return 0.0
        if x < self.b:
            return (x - self.a) / (self.b - self.a)
        if x <= self.c:
            return 1.0
        return (self.d - x) / (self.d - self.c)


_DEFAULT_SHAPES: Mapping[LinguisticValue, Trapezoid] = {
    LinguisticValue.VERY_SHORT: Trapezoid(0.0, 0.0, 0.2, 0.5),
    LinguisticValue.SHORT: Trapezoid(0.2, 0.5, 0.9, 1.2),
    LinguisticValue.LONG: Trapezoid(0.9, 1.2, 2.0, 2.5),
    LinguisticValue.VERY_LONG: Trapezoid(2.0, 2.5, 4.0, 4.5),
    LinguisticValue.CONTINUOUS: Trapezoid(4.0, 4.5, math.inf, math.inf),
}


@dataclass(frozen=True)
class MembershipFunctions:
    """The five duration trapezoids, validated to leave no duration uncovered."""

    shapes: Mapping[LinguisticValue, Trapezoid] = field(
        default_factory=lambda: dict(_DEFAULT_SHAPES)
    )

    def __post_init__(self) -> None:
        expected = set(DURATION_ORDER)
        if set(self.shapes) != expected:
            missing = sorted(v.value for v in expected - set(self.shapes))
            extra = sorted(v.value for v in set(self.shapes) - expected)
            raise ValueError(
                f"need exactly the five duration values; missing {missing}, "
                f"unexpected {extra}"
            )
        ordered = [self.shapes[v] for v in DURATION_ORDER]
        if ordered[0].a > 0:
            raise ValueError("first trapezoid must start at 0")
        for left, right in zip(ordered, ordered[1:]):
            # strict overlap: equal edges would leave a zero-membership point
            if right.a >= left.d:
                raise ValueError(
                    f"coverage gap between {left} and {right}"
                )
        if not math.isinf(ordered[-1].d):
            raise ValueError("last trapezoid must be right-open (unbounded)")

    @classmethod
    def from_breakpoints(
        cls, raw: Mapping[str, Sequence[float | None]]
    ) -> "MembershipFunctions":
        """Build from configuration: value name -> [a, b, c, d], null = unbounded."""
        by_name = {v.value: v for v in DURATION_ORDER}
        shapes: dict[LinguisticValue, Trapezoid] = {}
        for name, points in raw.items():
            value = by_name.get(name.strip().casefold())
            if value is None:
                raise ValueError(f"unknown linguistic value {name!r}")
            if len(points) != 4:
                raise ValueError(f"{name!r} needs 4 breakpoints, got {len(points)}")
            a, b, c, d = (math.inf if p is None else float(p) for p in points)
            shapes[value] = Trapezoid(a, b, c, d)
        return cls(shapes)

    def degrees(self, duration_seconds: float) -> dict[LinguisticValue, float]:
        if not math.isfinite(duration_seconds) or duration_seconds < 0:
            raise NegativeDurationError(
                f"duration must be a finite non-negative number of seconds, "
                f"got {duration_seconds!r}"
            )
        return {
            value: self.shapes[value].degree(duration_seconds)
            for value in DURATION_ORDER
        }


DEFAULT_MEMBERSHIP = MembershipFunctions()


def fuzzify(
    duration_seconds: float, membership: MembershipFunctions = DEFAULT_MEMBERSHIP
) -> dict[LinguisticValue, float]:
    """Membership degree of the duration in each of the five duration values."""
    return membership.degrees(duration_seconds)


def classify(
    pattern: BeepPattern, membership: MembershipFunctions = DEFAULT_MEMBERSHIP
) -> LinguisticValue:
    """Single linguistic value for a pattern.

    An unending train is Infinite regardless of tone length. Otherwise
    the highest membership degree wins, and a tie goes to the longer
    (more severe) value. Ties are judged with a small tolerance: the
    crossover degrees are equal in real arithmetic but drift apart by
    an ulp or two in floats.
    """
    if pattern.repeating_without_end:
        return LinguisticValue.INFINITE
    degrees = membership.degrees(pattern.duration_seconds)
    best = DURATION_ORDER[0]
    for value in DURATION_ORDER[1:]:
        if degrees[value] > degrees[best] or math.isclose(
            degrees[value], degrees[best], rel_tol=1e-9, abs_tol=1e-12
        ):
            best = value
    return best


@dataclass(frozen=True)
class PostDiagnosis:
    """Classification outcome paired with its fixed diagnosis message."""

    linguistic: LinguisticValue
    message: str


def diagnose_beep(
    pattern: BeepPattern, membership: MembershipFunctions = DEFAULT_MEMBERSHIP
) -> PostDiagnosis:
    """Classify a beep pattern and attach the matching diagnosis message."""
    value = classify(pattern, membership)
    return PostDiagnosis(value, DIAGNOSIS_MESSAGES[value])


def defuzzify(
    value: LinguisticValue, membership: MembershipFunctions = DEFAULT_MEMBERSHIP
) -> float:
    """Representative crisp duration: the midpoint of the value's plateau.

    A right-open plateau has no midpoint; its representative sits half a
    second past the plateau start (5.0 s with the default shapes).
    Infinite has no duration semantics at all and raises.
    """
    if value is LinguisticValue.INFINITE:
        raise NotDefuzzifiableError("an unending beep train has no duration")
    shape = membership.shapes[value]
    if math.isinf(shape.c):
        return shape.b + 0.5
    return (shape.b + shape.c) / 2
