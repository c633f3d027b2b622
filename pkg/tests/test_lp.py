import random
from fractions import Fraction

from gynibell import lp

F = Fraction


def test_simple_max():
    res = lp.solve(lp.make_problem([1, 1], "max", [([1, 1], "<=", 1)]))
    assert res.status == "optimal"
    assert res.value == 1
    assert sum(res.solution) == 1


def test_infeasible_with_certificate():
    res = lp.solve(lp.make_problem([1], "max", [([1], ">=", 2), ([1], "<=", 1)]))
    assert res.status == "infeasible"
    assert res.farkas is not None  # already verified exactly inside solve


def test_unbounded_with_ray():
    res = lp.solve(lp.make_problem([1], "max", [([1], ">=", 2)]))
    assert res.status == "unbounded"
    assert res.ray is not None


def test_feasible_point_equality():
    res = lp.feasible_point([([1], "=", F(1, 2)), ([1], "<=", 1)], 1)
    assert res.status == "optimal"
    assert res.solution[0] == F(1, 2)


def test_feasible_point_infeasible():
    res = lp.feasible_point([([1], "<=", -1)], 1)
    assert res.status == "infeasible"


def test_min_sense_value():
    # x1 <= 2 and x1 + x2 >= 3: minimizing x1 + 2*x2 pins x = (2, 1)
    res = lp.solve(
        lp.make_problem([1, 2], "min", [([1, 1], ">=", 3), ([1, 0], "<=", 2)])
    )
    assert res.status == "optimal"
    assert res.value == 4
    assert res.solution == (F(2), F(1))


def test_degenerate_problem_terminates():
    # many redundant rows through the same vertex
    rows = [([1, 1], "<=", 1), ([2, 2], "<=", 2), ([3, 3], "<=", 3), ([1, 0], "<=", 1)]
    res = lp.solve(lp.make_problem([1, 1], "max", rows))
    assert res.status == "optimal"
    assert res.value == 1


def test_redundant_equalities():
    rows = [([1, 1], "=", 1), ([2, 2], "=", 2), ([1, -1], "=", 0)]
    res = lp.solve(lp.make_problem([1, 0], "max", rows))
    assert res.status == "optimal"
    assert res.value == F(1, 2)


def test_lower_bounds_shift():
    res = lp.solve(
        lp.make_problem([1, 1], "min", [([1, 1], ">=", 3)], lower=[1, 1])
    )
    assert res.status == "optimal"
    assert res.value == 3


def test_upper_bounds_as_rows():
    res = lp.solve(
        lp.make_problem([1, 1], "max", [([1, -1], "=", 0)], upper=[F(1, 3), None])
    )
    assert res.status == "optimal"
    assert res.value == F(2, 3)


def test_strong_duality_identity():
    res = lp.solve(
        lp.make_problem(
            [3, 5], "max", [([1, 0], "<=", 4), ([0, 2], "<=", 12), ([3, 2], "<=", 18)]
        )
    )
    assert res.status == "optimal"
    assert res.value == 36
    dual_obj = sum(y * r for y, r in zip(res.dual, [F(4), F(12), F(18)]))
    assert dual_obj == res.value


def test_random_lps_against_vertex_enumeration():
    """2-variable LPs with <= rows: exact optimum must match brute force over
    all basic feasible points (constraint intersections and axis points)."""
    rng = random.Random(42)
    for trial in range(40):
        rows = []
        for _ in range(4):
            a = [F(rng.randint(-3, 4)), F(rng.randint(-3, 4))]
            b = F(rng.randint(0, 6))
            rows.append((a, "<=", b))
        c = [F(rng.randint(-3, 4)), F(rng.randint(-3, 4))]
        problem = lp.make_problem(c, "max", rows)
        res = lp.solve(problem)
        if res.status != "optimal":
            continue
        # brute force: all intersections of two active boundaries
        cands = [(F(0), F(0))]
        lines = [(r[0], r[2]) for r in rows] + [
            (([F(1), F(0)]), F(0)),
            (([F(0), F(1)]), F(0)),
        ]
        for i in range(len(lines)):
            for j in range(i + 1, len(lines)):
                (a1, b1), (a2, b2) = lines[i], lines[j]
                det = a1[0] * a2[1] - a1[1] * a2[0]
                if det == 0:
                    continue
                x = (b1 * a2[1] - b2 * a1[1]) / det
                y = (a1[0] * b2 - a2[0] * b1) / det
                cands.append((x, y))
        best = None
        for x, y in cands:
            if x < 0 or y < 0:
                continue
            if all(a[0] * x + a[1] * y <= b for a, _, b in rows):
                v = c[0] * x + c[1] * y
                best = v if best is None or v > best else best
        assert best == res.value, f"trial {trial}"


def test_fractional_coefficients_are_scaled_exactly():
    # exercises the internal integer row scaling
    res = lp.solve(
        lp.make_problem(
            [1, 1],
            "max",
            [([F(1, 2), F(1, 3)], "<=", F(5, 6)), ([F(2, 7), F(3, 5)], "<=", 1)],
        )
    )
    assert res.status == "optimal"
    # vertex of the two active rows: (1/2)x + (1/3)y = 5/6, (2/7)x + (3/5)y = 1
    assert res.solution == (F(35, 43), F(55, 43))
    assert res.value == F(90, 43)
    dual_obj = res.dual[0] * F(5, 6) + res.dual[1] * 1
    assert dual_obj == res.value


def test_fractional_equality_feasibility():
    res = lp.feasible_point(
        [([F(1, 3), F(1, 6)], "=", F(1, 2)), ([1, 1], "<=", 2)], 2
    )
    assert res.status == "optimal"
    x, y = res.solution
    assert x / 3 + y / 6 == F(1, 2)


def test_random_fractional_lps_against_vertex_enumeration():
    rng = random.Random(99)
    for trial in range(25):
        rows = []
        for _ in range(3):
            a = [
                F(rng.randint(-3, 4), rng.randint(1, 4)),
                F(rng.randint(-3, 4), rng.randint(1, 4)),
            ]
            rows.append((a, "<=", F(rng.randint(0, 6), rng.randint(1, 3))))
        c = [F(rng.randint(-2, 3), rng.randint(1, 3)) for _ in range(2)]
        res = lp.solve(lp.make_problem(c, "max", rows))
        if res.status != "optimal":
            continue
        lines = [(r[0], r[2]) for r in rows] + [
            ([F(1), F(0)], F(0)),
            ([F(0), F(1)], F(0)),
        ]
        best = None
        cands = [(F(0), F(0))]
        for i in range(len(lines)):
            for j in range(i + 1, len(lines)):
                (a1, b1), (a2, b2) = lines[i], lines[j]
                det = a1[0] * a2[1] - a1[1] * a2[0]
                if det == 0:
                    continue
                cands.append(
                    (
                        (b1 * a2[1] - b2 * a1[1]) / det,
                        (a1[0] * b2 - a2[0] * b1) / det,
                    )
                )
        for x, y in cands:
            if x < 0 or y < 0:
                continue
            if all(a[0] * x + a[1] * y <= b for a, _, b in rows):
                v = c[0] * x + c[1] * y
                best = v if best is None or v > best else best
        assert best == res.value, f"trial {trial}"


def test_dump_text_format():
    problem = lp.make_problem([F(1, 2), 1], "max", [([1, 1], "<=", F(3, 2))])
    text = problem.dump_text()
    assert "1/2" in text and "<= 3/2" in text and text.startswith("vars 2")
