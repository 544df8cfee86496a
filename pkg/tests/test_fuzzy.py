"""Beep-pattern fuzzification, classification, messages, and defuzzification."""

import math

import pytest
from hypothesis import given, strategies as st

from kbts.fuzzy import (
    DEFAULT_MEMBERSHIP,
    DIAGNOSIS_MESSAGES,
    DURATION_ORDER,
    BeepPattern,
    LinguisticValue as LV,
    MembershipFunctions,
    NegativeDurationError,
    NotDefuzzifiableError,
    PostDiagnosis,
    Trapezoid,
    classify,
    defuzzify,
    diagnose_beep,
    fuzzify,
)

GRID = [round(i * 0.01, 2) for i in range(1001)]  # 0.00 .. 10.00


# --- fuzzification -------------------------------------------------------

def test_short_tone_is_purely_very_short():
    degrees = fuzzify(0.1)
    assert degrees[LV.VERY_SHORT] == 1.0
    assert all(degrees[v] == 0.0 for v in DURATION_ORDER if v is not LV.VERY_SHORT)

def test_overlap_point_splits_membership():
    degrees = fuzzify(0.35)
    assert degrees[LV.VERY_SHORT] == pytest.approx(0.5)
    assert degrees[LV.SHORT] == pytest.approx(0.5)

def test_way_past_the_scale_is_continuous():
    assert fuzzify(10.0)[LV.CONTINUOUS] == 1.0

def test_infinite_never_appears_in_degrees():
    assert LV.INFINITE not in fuzzify(1.0)

@pytest.mark.parametrize("bad", [-0.1, -5, math.nan, math.inf])
def test_bad_durations_rejected(bad):
    with pytest.raises(NegativeDurationError):
        fuzzify(bad)
    with pytest.raises(NegativeDurationError):
        BeepPattern(bad)


# --- classification ------------------------------------------------------

def test_three_seconds_is_very_long():
    assert classify(BeepPattern(3.0)) is LV.VERY_LONG

def test_repeating_flag_short_circuits_duration():
    assert classify(BeepPattern(0.1, repeating_without_end=True)) is LV.INFINITE

def test_exact_tie_escalates_to_longer_value():
    assert classify(BeepPattern(0.35)) is LV.SHORT

@given(st.floats(min_value=0, max_value=50, allow_nan=False))
def test_classify_is_total_and_deterministic(duration):
    pattern = BeepPattern(duration)
    first = classify(pattern)
    assert first in set(DURATION_ORDER)
    assert classify(pattern) is first


# --- diagnosis messages --------------------------------------------------

@pytest.mark.parametrize("duration,repeating,message", [
    (0.1, False, "normal POST, system is OK"),
    (0.7, False, "POST error"),
    (1.5, False, "system board problem"),
    (3.0, False, "3270 keyboard card"),
    (6.0, False, "power supply, system board, or keyboard problem"),
    (2.0, True, "power supply or system board problem or keyboard"),
])
def test_each_rule_message_verbatim(duration, repeating, message):
    result = diagnose_beep(BeepPattern(duration, repeating))
    assert result.message == message

def test_diagnosis_pairs_value_with_its_message():
    result = diagnose_beep(BeepPattern(1.5))
    assert result == PostDiagnosis(LV.LONG, DIAGNOSIS_MESSAGES[LV.LONG])

def test_exactly_six_messages_exist():
    assert len(DIAGNOSIS_MESSAGES) == 6
    assert set(DIAGNOSIS_MESSAGES) == set(LV)


# --- defuzzification -----------------------------------------------------

@pytest.mark.parametrize("value,crisp", [
    (LV.VERY_SHORT, 0.1),
    (LV.SHORT, 0.7),
    (LV.LONG, 1.6),
    (LV.VERY_LONG, 3.25),
    (LV.CONTINUOUS, 5.0),
])
def test_plateau_midpoints(value, crisp):
    assert defuzzify(value) == pytest.approx(crisp)

def test_infinite_has_no_crisp_duration():
    with pytest.raises(NotDefuzzifiableError):
        defuzzify(LV.INFINITE)

@pytest.mark.parametrize("value", DURATION_ORDER)
def test_defuzzify_then_classify_round_trips(value):
    assert classify(BeepPattern(defuzzify(value))) is value


# --- membership function sweep invariants --------------------------------

def test_degrees_stay_inside_unit_interval():
    for duration in GRID:
        for degree in fuzzify(duration).values():
            assert 0.0 <= degree <= 1.0

def test_every_duration_is_covered():
    for duration in GRID:
        assert max(fuzzify(duration).values()) > 0.0

def test_exactly_one_certain_value_strictly_inside_each_plateau():
    for duration in GRID:
        inside = [
            v for v in DURATION_ORDER
            if DEFAULT_MEMBERSHIP.shapes[v].b + 1e-9 < duration
            < DEFAULT_MEMBERSHIP.shapes[v].c - 1e-9
        ]
        if inside:
            certain = [v for v, d in fuzzify(duration).items() if d == 1.0]
            assert certain == inside

def test_ramps_are_monotone_on_the_grid():
    for value in DURATION_ORDER:
        shape = DEFAULT_MEMBERSHIP.shapes[value]
        degrees = [fuzzify(x)[value] for x in GRID]
        for x1, x2, d1, d2 in zip(GRID, GRID[1:], degrees, degrees[1:]):
            if shape.a <= x1 and x2 <= shape.b:
                assert d1 <= d2 + 1e-12
            if not math.isinf(shape.d) and shape.c <= x1 and x2 <= shape.d:
                assert d1 >= d2 - 1e-12


# --- configurable breakpoints --------------------------------------------

def custom_membership():
    return MembershipFunctions.from_breakpoints({
        "very short": [0, 0, 0.1, 0.3],
        "short": [0.1, 0.3, 0.6, 1.0],
        "long": [0.6, 1.0, 1.5, 2.0],
        "very long": [1.5, 2.0, 3.0, 4.0],
        "continuous": [3.0, 4.0, None, None],
    })

def test_custom_breakpoints_change_classification():
    membership = custom_membership()
    assert classify(BeepPattern(2.2), membership) is LV.VERY_LONG
    assert classify(BeepPattern(2.2)) is LV.LONG  # defaults draw the line later
    assert classify(BeepPattern(0.8), membership) is LV.LONG
    assert classify(BeepPattern(0.8)) is LV.SHORT

def test_custom_breakpoints_keep_coverage_invariants():
    membership = custom_membership()
    for duration in GRID:
        degrees = membership.degrees(duration)
        assert max(degrees.values()) > 0.0
        assert all(0.0 <= d <= 1.0 for d in degrees.values())

@pytest.mark.parametrize("raw", [
    {},                                                    # nothing defined
    {"very short": [0, 0, 0.1, 0.3]},                      # four values missing
    {"warp speed": [0, 0, 1, 2]},                          # unknown name
    {"very short": [0, 0, 0.1]},                           # wrong arity
])
def test_incomplete_breakpoint_configs_rejected(raw):
    with pytest.raises(ValueError):
        MembershipFunctions.from_breakpoints(raw)

def test_coverage_gap_rejected():
    with pytest.raises(ValueError, match="gap"):
        MembershipFunctions.from_breakpoints({
            "very short": [0, 0, 0.1, 0.2],
            "short": [0.3, 0.4, 0.5, 0.6],  # hole between 0.2 and 0.3
            "long": [0.5, 0.6, 0.7, 0.8],
            "very long": [0.7, 0.8, 0.9, 1.0],
            "continuous": [0.9, 1.0, None, None],
        })

def test_bounded_last_trapezoid_rejected():
    with pytest.raises(ValueError, match="unbounded"):
        MembershipFunctions.from_breakpoints({
            "very short": [0, 0, 0.2, 0.5],
            "short": [0.2, 0.5, 0.9, 1.2],
            "long": [0.9, 1.2, 2.0, 2.5],
            "very long": [2.0, 2.5, 4.0, 4.5],
            "continuous": [4.0, 4.5, 9.0, 9.5],
        })

def test_misordered_trapezoid_rejected():
    with pytest.raises(ValueError):
        Trapezoid(1.0, 0.5, 2.0, 3.0)
