from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from affectfuse.fuzzy import (
    FuzzyRule,
    InvalidRuleBase,
    MembershipFunction,
    ZeroActivation,
    aggregate_outputs,
    defuzzify_centroid,
    evaluate_rules,
    infer_w_text,
    load_rule_base,
    membership,
    parse_rule_base,
)

TRACE_BASE = load_rule_base(builtin="trace")
DEFAULT_BASE = load_rule_base(builtin="default")

GOLDEN_INPUTS = (0.9582073547338185, 0.12, 0.02)
GOLDEN_W_TEXT = 0.5843812629945782
GOLDEN_HIGH = 0.9164147094658042


def oracle_centroid(out_sets, output, points=1_000_000):
    """Independent dense-grid center of mass over the aggregated output."""
    xs = np.linspace(output.domain[0], output.domain[1], points)
    agg = np.zeros_like(xs)
    for label, act in out_sets.items():
        mf = output.sets[label]
        mu = np.zeros_like(xs)
        if mf.b > mf.a:
            sel = (xs > mf.a) & (xs < mf.b)
            mu[sel] = (xs[sel] - mf.a) / (mf.b - mf.a)
        if mf.d > mf.c:
            sel = (xs > mf.c) & (xs < mf.d)
            mu[sel] = (mf.d - xs[sel]) / (mf.d - mf.c)
        mu[(xs >= mf.b) & (xs <= mf.c)] = 1.0
        agg = np.maximum(agg, np.minimum(mu, act))
    total = agg.sum()
    if total == 0:
        return None
    return float((xs * agg).sum() / total)


# --- membership -------------------------------------------------------------

def test_membership_matches_published_high_ramp():
    high = TRACE_BASE.variables["asr_conf"].sets["high"]
    assert membership(high, 0.9582073547) == pytest.approx(0.9164147095, abs=1e-9)
    assert membership(high, GOLDEN_INPUTS[0]) == pytest.approx(GOLDEN_HIGH, abs=1e-6)


def test_membership_zero_at_left_foot():
    mf = MembershipFunction(0.1, 0.3, 0.6, 0.9)
    assert membership(mf, 0.1) == 0.0
    assert membership(mf, 0.9) == 0.0


def test_membership_plateau_is_one():
    neu = TRACE_BASE.variables["valence"].sets["neu"]
    assert membership(neu, 0.02) == 1.0


def test_membership_ordering_validated():
    with pytest.raises(InvalidRuleBase):
        MembershipFunction(0.5, 0.4, 0.6, 0.7)


@given(
    st.lists(st.floats(min_value=-1, max_value=1, allow_nan=False), min_size=4, max_size=4),
    st.floats(min_value=-1.5, max_value=1.5, allow_nan=False),
)
@settings(max_examples=200, deadline=None)
def test_membership_properties(points, x):
    a, b, c, d = sorted(points)
    mf = MembershipFunction(a, b, c, d)
    mu = membership(mf, x)
    assert 0.0 <= mu <= 1.0
    if x < a or x > d:
        assert mu == 0.0
    if b <= x <= c:
        assert mu == 1.0


@given(st.data())
@settings(max_examples=100, deadline=None)
def test_membership_monotone_on_ramps(data):
    pts = sorted(data.draw(st.lists(
        st.floats(min_value=0, max_value=1, allow_nan=False), min_size=4, max_size=4)))
    mf = MembershipFunction(*pts)
    x1 = data.draw(st.floats(min_value=pts[0], max_value=pts[1], allow_nan=False))
    x2 = data.draw(st.floats(min_value=x1, max_value=pts[1], allow_nan=False))
    assert membership(mf, x2) >= membership(mf, x1) - 1e-12
    y1 = data.draw(st.floats(min_value=pts[2], max_value=pts[3], allow_nan=False))
    y2 = data.draw(st.floats(min_value=y1, max_value=pts[3], allow_nan=False))
    assert membership(mf, y2) <= membership(mf, y1) + 1e-12


# --- rule evaluation --------------------------------------------------------

def test_golden_rule_strengths():
    fired = evaluate_rules(TRACE_BASE, dict(zip(("asr_conf", "arousal", "valence"), GOLDEN_INPUTS)))
    assert [round(r.strength, 7) for r in fired] == [
        pytest.approx(0.9164147, abs=1e-6), 0.0, 1.0
    ]
    assert fired[1].conditions == ("arousal is low", "valence is pos")
    assert fired[1].strength == 0.0


def test_single_antecedent_full_membership():
    fired = evaluate_rules(TRACE_BASE, {"asr_conf": 1.0, "arousal": 0.5, "valence": 0.5})
    assert fired[0].strength == 1.0


def test_min_of_two_antecedents():
    # arousal low at 0.25 -> (0.4-0.25)/0.2 = 0.75; valence pos at 0.13 -> 0.4
    fired = evaluate_rules(TRACE_BASE, {"asr_conf": 0.0, "arousal": 0.25, "valence": 0.13})
    rule2 = fired[1]
    assert rule2.strength == pytest.approx(min(0.75, 0.4))


def test_every_rule_listed_once_in_order():
    fired = evaluate_rules(DEFAULT_BASE, {"asr_conf": 0.5, "arousal": 0.5, "valence": 0.0})
    assert len(fired) == len(DEFAULT_BASE.rules)


# --- aggregation ------------------------------------------------------------

def test_golden_out_sets():
    fired = evaluate_rules(TRACE_BASE, dict(zip(("asr_conf", "arousal", "valence"), GOLDEN_INPUTS)))
    out = aggregate_outputs(fired, ["low", "mid", "high"])
    assert out["low"] == 0.0
    assert out["mid"] == 1.0
    assert out["high"] == pytest.approx(GOLDEN_HIGH, abs=1e-6)


def test_aggregate_empty_is_zero():
    assert aggregate_outputs([], ["low", "mid", "high"]) == {"low": 0.0, "mid": 0.0, "high": 0.0}


def test_aggregate_takes_max():
    from affectfuse.fuzzy import FiredRule

    fired = [
        FiredRule(("a is b",), "w_text is high", 0.3),
        FiredRule(("a is c",), "w_text is high", 0.8),
    ]
    assert aggregate_outputs(fired, ["low", "mid", "high"])["high"] == 0.8


# --- defuzzification ---------------------------------------------------------

def test_symmetric_triangle_centroid():
    out = defuzzify_centroid({"low": 0.0, "mid": 1.0, "high": 0.0}, TRACE_BASE.output)
    assert out == pytest.approx(0.5, abs=1e-9)


def test_golden_centroid_within_tolerance():
    out = defuzzify_centroid({"low": 0.0, "mid": 1.0, "high": GOLDEN_HIGH}, TRACE_BASE.output)
    assert out == pytest.approx(GOLDEN_W_TEXT, abs=0.01)


def test_half_activated_high_matches_piecewise_oracle():
    # closed-form piecewise integration gives 59/108 for {0, 1, 0.5}
    out = defuzzify_centroid({"low": 0.0, "mid": 1.0, "high": 0.5}, TRACE_BASE.output)
    assert out == pytest.approx(59.0 / 108.0, abs=0.002)
    dense = oracle_centroid({"low": 0.0, "mid": 1.0, "high": 0.5}, TRACE_BASE.output)
    assert dense == pytest.approx(59.0 / 108.0, abs=1e-6)


def test_zero_activation_raises():
    with pytest.raises(ZeroActivation):
        defuzzify_centroid({"low": 0.0, "mid": 0.0, "high": 0.0}, TRACE_BASE.output)


def test_centroid_within_hull_of_active_supports():
    rng = np.random.default_rng(13)
    sets = TRACE_BASE.output.sets
    for _ in range(50):
        out_sets = {k: float(rng.uniform(0, 1)) if rng.random() < 0.7 else 0.0
                    for k in ("low", "mid", "high")}
        active = [k for k, v in out_sets.items() if v > 0.0]
        if not active:
            continue
        lo = min(sets[k].a for k in active)
        hi = max(sets[k].d for k in active)
        w = defuzzify_centroid(out_sets, TRACE_BASE.output)
        assert lo <= w <= hi
        assert 0.0 <= w <= 1.0


def test_grid_matches_dense_oracle_on_random_activations():
    rng = np.random.default_rng(5)
    for _ in range(25):
        out_sets = {k: float(rng.uniform(0, 1)) for k in ("low", "mid", "high")}
        if sum(out_sets.values()) == 0.0:
            continue
        grid = defuzzify_centroid(out_sets, TRACE_BASE.output)
        dense = oracle_centroid(out_sets, TRACE_BASE.output, points=200_001)
        assert grid == pytest.approx(dense, abs=1e-3)


# --- full inference ----------------------------------------------------------

def test_golden_trace_full():
    trace = infer_w_text(TRACE_BASE, *GOLDEN_INPUTS)
    assert trace.w_text == pytest.approx(GOLDEN_W_TEXT, abs=0.01)
    strengths = [r.strength for r in trace.fired_rules]
    assert strengths[0] == pytest.approx(0.9164147, abs=1e-6)
    assert strengths[1] == 0.0
    assert strengths[2] == 1.0
    assert trace.out_sets["low"] == 0.0
    assert trace.out_sets["mid"] == 1.0
    assert trace.out_sets["high"] == pytest.approx(0.9164147, abs=1e-6)
    assert trace.inputs == {
        "asr_conf": GOLDEN_INPUTS[0], "arousal": 0.12, "valence": 0.02,
    }


def test_only_neutral_valence_fires():
    trace = infer_w_text(TRACE_BASE, 0.2, 0.9, 0.0)
    assert trace.out_sets == {"low": 0.0, "mid": 1.0, "high": 0.0}
    assert trace.w_text == pytest.approx(0.5, abs=1e-9)


def test_partial_high_activation():
    trace = infer_w_text(TRACE_BASE, 0.75, 0.9, 0.0)
    assert trace.out_sets["high"] == pytest.approx(0.5)
    assert trace.w_text == pytest.approx(0.546, abs=0.002)


def test_trace_is_recomputable():
    trace = infer_w_text(DEFAULT_BASE, 0.7, 0.6, -0.1)
    assert len(trace.fired_rules) == len(DEFAULT_BASE.rules)
    recomputed = aggregate_outputs(trace.fired_rules, list(trace.out_sets))
    assert recomputed == trace.out_sets


def test_default_base_monotone_in_confidence():
    sweep = [
        infer_w_text(DEFAULT_BASE, c, 0.5, 0.0).w_text for c in np.linspace(0, 1, 101)
    ]
    assert all(b >= a - 1e-12 for a, b in zip(sweep, sweep[1:]))


def test_inputs_clamped_to_domain():
    trace = infer_w_text(TRACE_BASE, 1.7, -0.3, 2.5)
    assert trace.inputs == {"asr_conf": 1.0, "arousal": 0.0, "valence": 1.0}


# --- loading ----------------------------------------------------------------

def test_unresolvable_set_rejected_at_load():
    bad_base = {
        "id": "bad",
        "variables": {
            "asr_conf": {"domain": [0, 1], "sets": {"low": [0, 0, 0.3, 0.5]}},
            "arousal": {"domain": [0, 1], "sets": {"low": [0, 0, 0.2, 0.4]}},
            "valence": {"domain": [-1, 1], "sets": {"neu": [-0.25, -0.05, 0.05, 0.25]}},
        },
        "output": {"name": "w_text", "domain": [0, 1], "sets": {"mid": [0, 0.5, 0.5, 1]}},
        "rules": [{"if": ["asr_conf is nosuch"], "then": "w_text is mid"}],
    }
    with pytest.raises(InvalidRuleBase):
        parse_rule_base(bad_base)


def test_rule_without_antecedents_rejected():
    with pytest.raises(InvalidRuleBase):
        FuzzyRule(antecedents=(), consequent="mid")


def test_support_outside_domain_rejected():
    bad_base = {
        "id": "bad",
        "variables": {
            "asr_conf": {"domain": [0, 1], "sets": {"low": [-0.5, 0, 0.3, 0.5]}},
            "arousal": {"domain": [0, 1], "sets": {"low": [0, 0, 0.2, 0.4]}},
            "valence": {"domain": [-1, 1], "sets": {"neu": [-0.25, -0.05, 0.05, 0.25]}},
        },
        "output": {"name": "w_text", "domain": [0, 1], "sets": {"mid": [0, 0.5, 0.5, 1]}},
        "rules": [],
    }
    with pytest.raises(InvalidRuleBase):
        parse_rule_base(bad_base)


def test_builtin_ids():
    assert TRACE_BASE.rule_base_id == "trace"
    assert DEFAULT_BASE.rule_base_id == "default-r1r4"
