import random
from fractions import Fraction

import pytest

import gynibell as gb
from gynibell import gyni
from gynibell.core import InputDistribution, binary_scenario

F = Fraction


def test_parity_promise_n3_support():
    q = gyni.parity_promise(3)
    scen = q.scenario
    support = {scen.decode_input(x) for x in q.support()}
    assert support == {(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)}
    assert all(q.prob(x) == F(1, 4) for x in q.support())


def test_parity_promise_n2_uses_first_bit_only():
    q = gyni.parity_promise(2)
    scen = q.scenario
    support = {scen.decode_input(x) for x in q.support()}
    assert support == {(0, 0), (0, 1)}
    assert all(q.prob(x) == F(1, 2) for x in q.support())


@pytest.mark.parametrize("n", range(2, 9))
def test_parity_promise_normalized(n):
    q = gyni.parity_promise(n)
    assert sum(q.q.values()) == 1
    assert len(q.support()) == 2 ** (n - 1)


def test_gyni3_expression_terms(gyni_games):
    e = gyni_games[3].expression
    terms = {(xs, aa) for xs, aa, _ in e.terms()}
    assert terms == {
        ((0, 0, 0), (0, 0, 0)),
        ((0, 1, 1), (1, 1, 0)),
        ((1, 0, 1), (0, 1, 1)),
        ((1, 1, 0), (1, 0, 1)),
    }
    assert all(c == F(1, 4) for _, _, c in e.terms())
    assert e.classical_bound == F(1, 4)


def test_gyni2_uniform_terms():
    game = gyni.gyni_expression(2, gyni.uniform_promise(2))
    for xs, aa, c in game.expression.terms():
        assert aa == (xs[1], xs[0])
        assert c == F(1, 4)
    assert len(game.expression.coeffs) == 4


def test_term_count_equals_support(gyni_games):
    for n, game in gyni_games.items():
        assert len(game.expression.coeffs) == len(game.promise.support())


def test_classical_bound_formula_cases():
    assert gyni.classical_bound_formula(gyni.parity_promise(3)) == F(1, 4)
    for n in (2, 3, 4):
        assert gyni.classical_bound_formula(gyni.uniform_promise(n)) == F(2, 2**n)
    scen = binary_scenario(3)
    point = InputDistribution(scen, {5: F(1)})
    assert gyni.classical_bound_formula(point) == 1


def _random_distribution(rng, n):
    scen = binary_scenario(n)
    raw = [rng.randint(0, 8) for _ in range(scen.n_inputs)]
    if sum(raw) == 0:
        raw[0] = 1
    total = sum(raw)
    q = {x: F(v, total) for x, v in enumerate(raw) if v}
    return InputDistribution(scen, q)


@pytest.mark.parametrize("n", range(2, 7))
def test_formula_matches_vertex_enumeration(n):
    rng = random.Random(100 + n)
    for _ in range(20):
        q = _random_distribution(rng, n)
        game = gyni.gyni_expression(n, q)
        assert gb.classical_max(game.expression).value == game.expression.classical_bound


def test_ns_bounded_by_twice_classical_random_n3():
    rng = random.Random(77)
    for _ in range(20):
        q = _random_distribution(rng, 3)
        game = gyni.gyni_expression(3, q)
        ns = gb.ns_max(game.expression)
        assert ns.value <= 2 * game.expression.classical_bound
        assert ns.value >= game.expression.classical_bound


@pytest.mark.parametrize("n", (3, 4))
def test_uniform_promise_gives_no_ns_advantage(n):
    game = gyni.gyni_expression(n, gyni.uniform_promise(n))
    assert gb.ns_max(game.expression).value == game.expression.classical_bound


def test_ns_advantage_for_parity_promise(gyni_games, ns_optima):
    for n in range(3, 7):
        assert ns_optima[n].value > gyni_games[n].expression.classical_bound


def test_known_ratios(ns_optima, gyni_games):
    ratios = {
        n: ns_optima[n].value / gyni_games[n].expression.classical_bound
        for n in range(3, 7)
    }
    assert ratios[3] == F(4, 3)
    assert ratios[4] == F(4, 3)
    assert ratios[5] == F(16, 11)
    assert ratios[6] == F(16, 11)


def test_lifting_preserves_ratio(ns_optima, gyni_games):
    """Feeding a lifted optimal N-party box to the (N+1)-party game yields
    exactly half the N-party optimum, for some cyclic relabeling of the
    embedded parties (the parity promise of the larger game conditions on a
    rotated window of the smaller one's inputs), so the no-signaling optimum
    can never drop by more than the factor 1/2 per added party."""
    for n in (3, 4, 5):
        box = ns_optima[n].box
        best = F(0)
        for r in range(n):
            perm = tuple((p + r) % n for p in range(n))
            ident = tuple((tuple(range(2)),) * n)
            rotated = gb.core.apply_symmetry_to_box(
                box, gb.Symmetry(perm, ident, ident)
            )
            value = gb.bell_value(gyni_games[n + 1].expression, gb.lift_box(rotated))
            best = max(best, value)
        assert best == ns_optima[n].value / 2
        assert ns_optima[n + 1].value >= ns_optima[n].value / 2
    # the straight (unrotated) lifted 3-party optimum is already optimal at N=4
    lifted = gb.lift_box(ns_optima[3].box)
    assert gb.bell_value(gyni_games[4].expression, lifted) == F(1, 6) == ns_optima[4].value


def test_sum_form_scaling():
    e = gyni.gyni_sum_expression(3)
    assert all(c == 1 for c in e.coeffs.values())
    assert e.classical_bound == 1
    assert set(e.coeffs) == set(gyni.gyni_expression(3).expression.coeffs)


def test_sum_form_requires_uniform_support():
    scen = binary_scenario(2)
    q = InputDistribution(scen, {0: F(1, 3), 3: F(2, 3)})
    with pytest.raises(ValueError):
        gyni.gyni_sum_expression(2, q)


# ---------------------------------------------------------------------------
# quantum-bound certificate


@pytest.mark.parametrize("n", range(2, 9))
def test_certificate_true_for_parity_games(n):
    game = gyni.gyni_expression(n)
    assert gyni.orthogonality_certificate(game.expression)


def test_certificate_true_for_upb_derived():
    from gynibell import upb

    for e in (
        gb.bell_from_set(upb.shifts()),
        gb.bell_from_set(upb.gen_shifts(3)),
        gb.bell_from_set(upb.wupb_example()),
        upb.four_partite_tight_inequality(),
        upb.niset_cerf_inequality(4, 3),
        gyni.gyni_sum_expression(4),
    ):
        assert gyni.orthogonality_certificate(e)


def test_certificate_false_for_non_orthogonal_non_game():
    scen = binary_scenario(2)
    coeffs = {
        (scen.encode_input((0, 0)), scen.encode_outcome((0, 0))): F(1),
        (scen.encode_input((1, 1)), scen.encode_outcome((1, 1))): F(1),
    }
    e = gb.BellExpression(scen, coeffs)
    assert not gyni.orthogonality_certificate(e)


def test_certificate_rejects_negative_coefficients():
    scen = binary_scenario(2)
    e = gb.BellExpression(scen, {(0, 0): F(-1)})
    with pytest.raises(ValueError):
        gyni.orthogonality_certificate(e)
