import random
from fractions import Fraction

import numpy as np
import pytest

import gynibell as gb
from gynibell import gyni
from gynibell.core import (
    Scenario,
    apply_symmetry_to_box,
    drop_party,
    relabel_outcomes,
)


def test_scenario_counts():
    s = Scenario((2, 2, 2, 3), (2, 2, 2, 2))
    assert s.parties == 4
    assert s.n_inputs == 24
    assert s.n_outputs == 16
    assert s.strategy_count() == 4 * 4 * 4 * 8 == 512


def test_scenario_validation():
    with pytest.raises(ValueError):
        Scenario((), ())
    with pytest.raises(ValueError):
        Scenario((2, 0), (2, 2))
    with pytest.raises(ValueError):
        Scenario((2,), (2, 2))


def test_mixed_radix_round_trip():
    s = Scenario((2, 3, 2), (2, 2, 4))
    for xs in s.input_tuples():
        assert s.decode_input(s.encode_input(xs)) == xs
    for aa in s.outcome_tuples():
        assert s.decode_outcome(s.encode_outcome(aa)) == aa
    # party 0 is most significant
    assert s.encode_input((1, 0, 0)) == 6


def test_strategy_enumeration_counts():
    assert len(gb.enumerate_deterministic_strategies(gb.binary_scenario(2))) == 16
    assert len(gb.enumerate_deterministic_strategies(gb.binary_scenario(3))) == 64
    s = Scenario((2, 2, 2, 3), (2, 2, 2, 2))
    assert len(gb.enumerate_deterministic_strategies(s)) == 512


def test_strategy_enumeration_cap():
    with pytest.raises(ValueError, match="1048576"):
        gb.enumerate_deterministic_strategies(gb.binary_scenario(10), cap=1000)


def test_strategy_enumeration_lexicographic_and_unique():
    strategies = gb.enumerate_deterministic_strategies(gb.binary_scenario(2))
    tables = [s.responses for s in strategies]
    assert tables == sorted(tables)
    assert len(set(tables)) == len(tables)


def test_box_from_strategy_all_zero():
    s = gb.binary_scenario(3)
    st = gb.DeterministicStrategy(((0, 0), (0, 0), (0, 0)))
    box = gb.box_from_strategy(s, st)
    for xs in s.input_tuples():
        assert box.prob(xs, (0, 0, 0)) == 1


def test_box_from_strategy_identity_responders():
    s = gb.binary_scenario(2)
    st = gb.DeterministicStrategy(((0, 1), (0, 1)))
    box = gb.box_from_strategy(s, st)
    for xs in s.input_tuples():
        for aa in s.outcome_tuples():
            assert box.prob(xs, aa) == (1 if aa == xs else 0)


def test_deterministic_boxes_are_nonsignaling():
    s = gb.binary_scenario(3)
    for st in gb.enumerate_deterministic_strategies(s)[::7]:
        box = gb.box_from_strategy(s, st)
        assert gb.is_nonsignaling(box).is_nonsignaling
        # rows normalized exactly
        box.validate()


def test_signaling_box_detected():
    # party 2 outputs party 1's input: blatant signaling
    s = gb.binary_scenario(2)
    arr = np.zeros((4, 4))
    for x1 in range(2):
        for x2 in range(2):
            x_idx = s.encode_input((x1, x2))
            arr[x_idx, s.encode_outcome((0, x1))] = 1.0
    box = gb.Box.numeric(s, arr)
    report = gb.is_nonsignaling(box)
    assert not report.is_nonsignaling
    # violations are keyed by the signaling party (whose input we vary)
    assert any(v.party == 0 for v in report.violations)


def test_gyni_strategy_wins_exactly_y_and_complement():
    # fix the guessed string and respond accordingly on both inputs:
    # the strategy scores on y and on its complement, nowhere else
    game = gyni.gyni_expression(3, gyni.uniform_promise(3))
    y = (0, 1, 1)
    ybar = (1, 0, 0)
    responses = []
    for i in range(3):
        target = y[(i + 1) % 3]
        resp = [0, 0]
        resp[y[i]] = target
        resp[ybar[i]] = 1 - target
        responses.append(tuple(resp))
    st = gb.DeterministicStrategy(tuple(responses))
    box = gb.box_from_strategy(game.expression.scenario, st)
    assert gb.bell_value(game.expression, box) == Fraction(2, 8)
    scen = game.expression.scenario
    wins = [
        xs
        for xs in scen.input_tuples()
        if box.prob(xs, tuple(xs[1:] + xs[:1])) == 1
    ]
    assert set(wins) == {y, ybar}


def test_bell_value_linearity_on_mixtures():
    rng = random.Random(7)
    s = gb.binary_scenario(2)
    strategies = gb.enumerate_deterministic_strategies(s)
    game = gyni.gyni_expression(2)
    e = game.expression
    for _ in range(10):
        picks = rng.sample(range(len(strategies)), 3)
        raw = [Fraction(rng.randint(1, 5)) for _ in picks]
        total = sum(raw)
        weights = [w / total for w in raw]
        boxes = [gb.box_from_strategy(s, strategies[k]) for k in picks]
        mixed = gb.mix_boxes(boxes, weights)
        expect = sum(
            (w * gb.bell_value(e, b) for w, b in zip(weights, boxes)), Fraction(0)
        )
        assert gb.bell_value(e, mixed) == expect


def test_bell_value_scenario_mismatch():
    e = gyni.gyni_expression(3).expression
    box = gb.box_from_strategy(
        gb.binary_scenario(2),
        gb.DeterministicStrategy(((0, 0), (0, 0))),
    )
    with pytest.raises(ValueError):
        gb.bell_value(e, box)


def _product_box(tables):
    """Exact product box from per-party single-party tables."""
    parties = len(tables)
    s = gb.binary_scenario(parties)
    entries = {}
    for xs in s.input_tuples():
        for aa in s.outcome_tuples():
            p = Fraction(1)
            for i in range(parties):
                p *= tables[i][xs[i]][aa[i]]
            entries[(s.encode_input(xs), s.encode_outcome(aa))] = p
    return gb.Box.exact(s, entries)


def test_postselect_product_box_leaves_rest_unchanged():
    t = [
        [[Fraction(1, 2), Fraction(1, 2)], [Fraction(1, 4), Fraction(3, 4)]],
        [[Fraction(1, 3), Fraction(2, 3)], [Fraction(1), Fraction(0)]],
        [[Fraction(3, 5), Fraction(2, 5)], [Fraction(1, 2), Fraction(1, 2)]],
    ]
    box = _product_box(t)
    reduced = gb.postselect(box, 2, 0, 1)
    expected = _product_box(t[:2])
    assert reduced == expected


def test_postselect_rows_renormalize():
    game = gyni.gyni_expression(3)
    ns = gb.ns_max(game.expression)
    reduced = gb.postselect(ns.box, 0, 0, 0)
    reduced.validate()
    s = reduced.scenario
    for x in range(s.n_inputs):
        assert sum(reduced.value(x, a) for a in range(s.n_outputs)) == 1


def test_postselect_zero_probability_errors():
    s = gb.binary_scenario(2)
    st = gb.DeterministicStrategy(((0, 0), (0, 0)))
    box = gb.box_from_strategy(s, st)
    with pytest.raises(ZeroDivisionError):
        gb.postselect(box, 0, 0, 1)


def test_postselect_commutes_with_marginal_for_independent_party():
    t = [
        [[Fraction(1, 2), Fraction(1, 2)], [Fraction(1, 4), Fraction(3, 4)]],
        [[Fraction(1, 3), Fraction(2, 3)], [Fraction(2, 5), Fraction(3, 5)]],
        [[Fraction(3, 5), Fraction(2, 5)], [Fraction(1, 2), Fraction(1, 2)]],
    ]
    box = _product_box(t)
    a = drop_party(gb.postselect(box, 2, 1, 0), 1)
    b = gb.postselect(drop_party(box, 1), 1, 1, 0)
    assert a == b


def test_lift_box_preserves_ns_and_echoes_input():
    game = gyni.gyni_expression(3)
    ns = gb.ns_max(game.expression)
    lifted = gb.lift_box(ns.box)
    assert lifted.scenario.parties == 4
    assert gb.is_nonsignaling(lifted).is_nonsignaling
    s = lifted.scenario
    for xs in s.input_tuples():
        for aa in s.outcome_tuples():
            if aa[3] != xs[3]:
                assert lifted.prob(xs, aa) == 0


def test_lift_box_requires_binary():
    s = Scenario((2, 3), (2, 2))
    entries = {}
    for x in range(s.n_inputs):
        entries[(x, 0)] = Fraction(1)
    box = gb.Box.exact(s, entries)
    with pytest.raises(ValueError):
        gb.lift_box(box)


def test_box_json_round_trip():
    game = gyni.gyni_expression(3)
    ns = gb.ns_max(game.expression)
    obj = ns.box.to_json()
    back = gb.Box.from_json(obj)
    assert back == ns.box


def test_expression_json_round_trip():
    e = gyni.gyni_expression(3).expression
    back = gb.BellExpression.from_json(e.to_json())
    assert back.scenario == e.scenario
    assert back.coeffs == e.coeffs
    assert back.classical_bound == e.classical_bound


def test_input_distribution_json_round_trip():
    q = gyni.parity_promise(4)
    back = gb.InputDistribution.from_json(q.to_json())
    assert back.scenario == q.scenario
    assert back.q == {k: v for k, v in q.q.items() if v}


def test_input_distribution_validation():
    s = gb.binary_scenario(2)
    with pytest.raises(ValueError):
        gb.InputDistribution(s, {0: Fraction(1, 2)})
    with pytest.raises(ValueError):
        gb.InputDistribution(s, {0: Fraction(3, 2), 1: Fraction(-1, 2)})


def test_symmetry_preserves_box_validity_and_ns():
    game = gyni.gyni_expression(3)
    ns = gb.ns_max(game.expression)
    for sym in game.expression.party_symmetries:
        image = apply_symmetry_to_box(ns.box, sym)
        image.validate()
        assert gb.is_nonsignaling(image).is_nonsignaling
        # the optimal box value is invariant when the expression is
        assert gb.bell_value(game.expression, image) == ns.value


def test_relabel_outcomes_involution():
    e = gyni.gyni_sum_expression(3)
    twice = relabel_outcomes(relabel_outcomes(e, 1, 1, (1, 0)), 1, 1, (1, 0))
    assert twice.coeffs == e.coeffs
