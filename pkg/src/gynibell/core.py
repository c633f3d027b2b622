"""Scenarios, probability boxes, deterministic strategies and Bell expressions.

A *scenario* fixes the number of parties and the per-party input/output
cardinalities.  A *box* is a full conditional probability table ``P(a|x)``
over a scenario, carried either exactly (rationals) or numerically (floats).
Input and outcome tuples are flattened to mixed-radix integers, party-major
with party 0 most significant, which gives deterministic serialization and
O(1) table lookups.

All types are immutable after construction and all operations are pure
functions, so values can be shared freely between concurrent tasks.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, NamedTuple

import numpy as np

from . import config
from .exact import rat_from_str, rat_to_str

# ---------------------------------------------------------------------------
# mixed-radix indexing


def encode_tuple(values: tuple[int, ...], radices: tuple[int, ...]) -> int:
    idx = 0
    for v, r in zip(values, radices):
        idx = idx * r + v
    return idx


def decode_tuple(idx: int, radices: tuple[int, ...]) -> tuple[int, ...]:
    out = [0] * len(radices)
    for i in range(len(radices) - 1, -1, -1):
        out[i] = idx % radices[i]
        idx //= radices[i]
    return tuple(out)


# ---------------------------------------------------------------------------
# scenario


@dataclass(frozen=True)
class Scenario:
    """Party count plus per-party input and output cardinalities."""

    inputs: tuple[int, ...]
    outputs: tuple[int, ...]

    def __post_init__(self):
        if len(self.inputs) != len(self.outputs):
            raise ValueError("inputs and outputs must have one entry per party")
        if len(self.inputs) < 1:
            raise ValueError("at least one party required")
        if any(m < 1 for m in self.inputs) or any(d < 1 for d in self.outputs):
            raise ValueError("all cardinalities must be >= 1")

    @property
    def parties(self) -> int:
        return len(self.inputs)

    @property
    def n_inputs(self) -> int:
        n = 1
        for m in self.inputs:
            n *= m
        return n

    @property
    def n_outputs(self) -> int:
        n = 1
        for d in self.outputs:
            n *= d
        return n

    @property
    def table_size(self) -> int:
        return self.n_inputs * self.n_outputs

    def encode_input(self, xs: tuple[int, ...]) -> int:
        return encode_tuple(xs, self.inputs)

    def decode_input(self, idx: int) -> tuple[int, ...]:
        return decode_tuple(idx, self.inputs)

    def encode_outcome(self, aa: tuple[int, ...]) -> int:
        return encode_tuple(aa, self.outputs)

    def decode_outcome(self, idx: int) -> tuple[int, ...]:
        return decode_tuple(idx, self.outputs)

    def input_tuples(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(*(range(m) for m in self.inputs))

    def outcome_tuples(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(*(range(d) for d in self.outputs))

    def strategy_count(self) -> int:
        n = 1
        for m, d in zip(self.inputs, self.outputs):
            n *= d**m
        return n

    def to_json(self) -> dict:
        return {"inputs": list(self.inputs), "outputs": list(self.outputs)}

    @staticmethod
    def from_json(obj: dict) -> "Scenario":
        return Scenario(tuple(obj["inputs"]), tuple(obj["outputs"]))


def binary_scenario(n_parties: int) -> Scenario:
    return Scenario((2,) * n_parties, (2,) * n_parties)


# ---------------------------------------------------------------------------
# boxes


class Box:
    """Conditional probability table P(a|x) over a scenario.

    ``mode`` is ``"exact"`` (entries are rationals, normalization is an
    identity of fractions) or ``"numeric"`` (float64 entries, normalization
    within tolerance).  The table is dense: entry ``(x_idx, a_idx)`` lives at
    ``table[x_idx * n_outputs + a_idx]`` in exact mode and at
    ``array[x_idx, a_idx]`` in numeric mode.
    """

    __slots__ = ("scenario", "mode", "_table")

    def __init__(self, scenario: Scenario, table, mode: str, _validate: bool = True):
        self.scenario = scenario
        self.mode = mode
        if mode == "exact":
            tab = list(table)
            if len(tab) != scenario.table_size:
                raise ValueError("table size mismatch")
            self._table = tab
        elif mode == "numeric":
            arr = np.asarray(table, dtype=float)
            if arr.shape != (scenario.n_inputs, scenario.n_outputs):
                raise ValueError("table shape mismatch")
            self._table = arr
        else:
            raise ValueError(f"unknown mode {mode!r}")
        if _validate:
            self.validate()

    # -- constructors

    @staticmethod
    def exact(scenario: Scenario, entries) -> "Box":
        """Build an exact box from a dense list or an {(x_idx, a_idx): Rat} dict."""
        if isinstance(entries, dict):
            tab = [Fraction(0)] * scenario.table_size
            na = scenario.n_outputs
            for (x, a), v in entries.items():
                tab[x * na + a] = Fraction(v)
            return Box(scenario, tab, "exact")
        return Box(scenario, [Fraction(v) for v in entries], "exact")

    @staticmethod
    def numeric(scenario: Scenario, array) -> "Box":
        return Box(scenario, array, "numeric")

    # -- access

    def value(self, x_idx: int, a_idx: int):
        if self.mode == "exact":
            return self._table[x_idx * self.scenario.n_outputs + a_idx]
        return self._table[x_idx, a_idx]

    def prob(self, xs: tuple[int, ...], aa: tuple[int, ...]):
        return self.value(self.scenario.encode_input(xs), self.scenario.encode_outcome(aa))

    def exact_table(self) -> list[Fraction]:
        if self.mode != "exact":
            raise ValueError("not an exact box")
        return list(self._table)

    def as_array(self) -> np.ndarray:
        if self.mode == "numeric":
            return np.array(self._table)
        na = self.scenario.n_outputs
        out = np.empty((self.scenario.n_inputs, na))
        for x in range(self.scenario.n_inputs):
            for a in range(na):
                out[x, a] = float(self._table[x * na + a])
        return out

    # -- invariants

    def validate(self, tolerance: float | None = None) -> None:
        eps = config.tol(tolerance)
        nx, na = self.scenario.n_inputs, self.scenario.n_outputs
        if self.mode == "exact":
            for x in range(nx):
                row = self._table[x * na : (x + 1) * na]
                if any(p < 0 for p in row):
                    raise ValueError(f"negative probability at input {x}")
                if sum(row) != 1:
                    raise ValueError(f"row {x} does not sum to 1")
        else:
            if np.min(self._table) < -eps:
                raise ValueError("negative probability beyond tolerance")
            sums = self._table.sum(axis=1)
            if np.max(np.abs(sums - 1.0)) > eps:
                raise ValueError("row normalization off beyond tolerance")

    def __eq__(self, other):
        if not isinstance(other, Box):
            return NotImplemented
        if self.scenario != other.scenario or self.mode != other.mode:
            return False
        if self.mode == "exact":
            return self._table == other._table
        return bool(np.array_equal(self._table, other._table))

    def __repr__(self):
        return f"Box(parties={self.scenario.parties}, mode={self.mode})"

    # -- serialization

    def to_json(self) -> dict:
        if self.mode == "exact":
            na = self.scenario.n_outputs
            table = {}
            for x in range(self.scenario.n_inputs):
                for a in range(na):
                    v = self._table[x * na + a]
                    if v:
                        table[f"{x}:{a}"] = rat_to_str(v)
            return {"scenario": self.scenario.to_json(), "mode": "exact", "table": table}
        table = {}
        for x in range(self.scenario.n_inputs):
            for a in range(self.scenario.n_outputs):
                v = float(self._table[x, a])
                if v != 0.0:
                    table[f"{x}:{a}"] = float(f"{v:.12g}")
        return {"scenario": self.scenario.to_json(), "mode": "numeric", "table": table}

    @staticmethod
    def from_json(obj: dict) -> "Box":
        scen = Scenario.from_json(obj["scenario"])
        mode = obj.get("mode", "exact")
        if mode == "exact":
            entries = {}
            for key, val in obj["table"].items():
                x, a = key.split(":")
                entries[(int(x), int(a))] = rat_from_str(val)
            return Box.exact(scen, entries)
        arr = np.zeros((scen.n_inputs, scen.n_outputs))
        for key, val in obj["table"].items():
            x, a = key.split(":")
            arr[int(x), int(a)] = float(val)
        return Box.numeric(scen, arr)


def mix_boxes(boxes: list[Box], weights: list[Fraction]) -> Box:
    """Exact convex combination of exact boxes on a common scenario."""
    if not boxes:
        raise ValueError("empty mixture")
    scen = boxes[0].scenario
    if any(b.scenario != scen or b.mode != "exact" for b in boxes):
        raise ValueError("mixture requires exact boxes on one scenario")
    table = [Fraction(0)] * scen.table_size
    for b, w in zip(boxes, weights):
        w = Fraction(w)
        for i, v in enumerate(b._table):
            if v:
                table[i] += w * v
    return Box(scen, table, "exact")


# ---------------------------------------------------------------------------
# deterministic strategies


@dataclass(frozen=True)
class DeterministicStrategy:
    """Per-party response functions, stored as tuples indexed by input."""

    responses: tuple[tuple[int, ...], ...]

    def outcome_for(self, xs: tuple[int, ...]) -> tuple[int, ...]:
        return tuple(r[x] for r, x in zip(self.responses, xs))


def enumerate_deterministic_strategies(
    scenario: Scenario, cap: int | None = None
) -> list[DeterministicStrategy]:
    """All deterministic strategies, duplicate-free, in lexicographic order
    of the response tables."""
    cap = config.STRATEGY_CAP if cap is None else cap
    count = scenario.strategy_count()
    if count > cap:
        raise ValueError(f"strategy enumeration cap exceeded: {count} > {cap}")
    per_party = [
        list(itertools.product(range(d), repeat=m))
        for m, d in zip(scenario.inputs, scenario.outputs)
    ]
    return [DeterministicStrategy(combo) for combo in itertools.product(*per_party)]


def box_from_strategy(scenario: Scenario, strategy: DeterministicStrategy) -> Box:
    """The 0/1-valued exact box with P(a|x)=1 iff a_i = f_i(x_i) for all i."""
    na = scenario.n_outputs
    table = [Fraction(0)] * scenario.table_size
    for xs in scenario.input_tuples():
        x_idx = scenario.encode_input(xs)
        a_idx = scenario.encode_outcome(strategy.outcome_for(xs))
        table[x_idx * na + a_idx] = Fraction(1)
    return Box(scenario, table, "exact")


# ---------------------------------------------------------------------------
# no-signaling check


class NsViolation(NamedTuple):
    party: int
    other_inputs: tuple[int, ...]
    input_pair: tuple[int, int]
    other_outcomes: tuple[int, ...]


class NsReport(NamedTuple):
    is_nonsignaling: bool
    violations: list


def _party_marginal(box: Box, party: int, x_i: int):
    """Marginal over party's outcome: dict (x_others, a_others) -> prob."""
    scen = box.scenario
    marg = {}
    for xs in scen.input_tuples():
        if xs[party] != x_i:
            continue
        xo = xs[:party] + xs[party + 1 :]
        x_idx = scen.encode_input(xs)
        for aa in scen.outcome_tuples():
            ao = aa[:party] + aa[party + 1 :]
            key = (xo, ao)
            v = box.value(x_idx, scen.encode_outcome(aa))
            if key in marg:
                marg[key] = marg[key] + v
            else:
                marg[key] = v
    return marg


def is_nonsignaling(box: Box, tolerance: float | None = None) -> NsReport:
    """Check the per-party no-signaling equalities, reporting any violations.

    For every party i, every context of the other inputs and every pair of
    inputs for i, the marginal over party i's outcome must agree (exactly in
    exact mode, within tolerance in numeric mode).
    """
    eps = config.tol(tolerance)
    scen = box.scenario
    violations = []
    for party in range(scen.parties):
        if scen.inputs[party] < 2:
            continue
        margs = [_party_marginal(box, party, x) for x in range(scen.inputs[party])]
        base = margs[0]
        for x_i in range(1, scen.inputs[party]):
            for key, v in margs[x_i].items():
                v0 = base[key]
                bad = (v0 != v) if box.mode == "exact" else abs(float(v0) - float(v)) > eps
                if bad:
                    violations.append(NsViolation(party, key[0], (0, x_i), key[1]))
    return NsReport(not violations, violations)


# ---------------------------------------------------------------------------
# Bell expressions


@dataclass(frozen=True)
class BellExpression:
    """Sparse coefficient table over (input, outcome) index pairs.

    ``coeffs`` maps ``(x_idx, a_idx)`` to a rational coefficient.
    ``party_symmetries`` optionally carries relabeling symmetries of the
    expression (see :class:`Symmetry`); solvers exploit them after an exact
    invariance check.
    """

    scenario: Scenario
    coeffs: dict
    classical_bound: Fraction | None = None
    label: str = ""
    party_symmetries: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("coefficient map must be non-empty")
        nx, na = self.scenario.n_inputs, self.scenario.n_outputs
        for (x, a) in self.coeffs:
            if not (0 <= x < nx and 0 <= a < na):
                raise ValueError(f"coefficient key ({x},{a}) out of range")

    def terms(self):
        """Iterate (x_tuple, a_tuple, coefficient) sorted by index."""
        scen = self.scenario
        for (x, a) in sorted(self.coeffs):
            yield scen.decode_input(x), scen.decode_outcome(a), self.coeffs[(x, a)]

    def to_json(self) -> dict:
        out = {
            "scenario": self.scenario.to_json(),
            "coeffs": {f"{x}:{a}": rat_to_str(Fraction(v)) for (x, a), v in sorted(self.coeffs.items())},
        }
        if self.classical_bound is not None:
            out["classical_bound"] = rat_to_str(self.classical_bound)
        if self.label:
            out["label"] = self.label
        return out

    @staticmethod
    def from_json(obj: dict) -> "BellExpression":
        scen = Scenario.from_json(obj["scenario"])
        coeffs = {}
        for key, val in obj["coeffs"].items():
            x, a = key.split(":")
            coeffs[(int(x), int(a))] = rat_from_str(val)
        bound = obj.get("classical_bound")
        return BellExpression(
            scen,
            coeffs,
            classical_bound=None if bound is None else rat_from_str(bound),
            label=obj.get("label", ""),
        )


def bell_value(expression: BellExpression, box: Box):
    """Evaluate sum of coefficient * P(a|x); exact when the box is exact."""
    if expression.scenario != box.scenario:
        raise ValueError("expression and box live on different scenarios")
    if box.mode == "exact":
        total = Fraction(0)
        for (x, a), c in expression.coeffs.items():
            total += c * box.value(x, a)
        return total
    total = 0.0
    for (x, a), c in expression.coeffs.items():
        total += float(c) * box.value(x, a)
    return total


def relabel_outcomes(
    expression: BellExpression, party: int, x_value: int, perm: tuple[int, ...]
) -> BellExpression:
    """Relabel party's outcomes under one of its inputs; used to map between
    equivalent forms of the same inequality."""
    scen = expression.scenario
    new_coeffs = {}
    for (x, a), c in expression.coeffs.items():
        xs = scen.decode_input(x)
        aa = scen.decode_outcome(a)
        if xs[party] == x_value:
            aa = aa[:party] + (perm[aa[party]],) + aa[party + 1 :]
        new_coeffs[(x, scen.encode_outcome(aa))] = c
    return BellExpression(
        scen, new_coeffs, expression.classical_bound, expression.label
    )


# ---------------------------------------------------------------------------
# relabeling symmetries


@dataclass(frozen=True)
class Symmetry:
    """A relabeling automorphism: permute parties, then relabel each party's
    inputs and outputs.

    Acting on an index pair, party ``p`` of the image takes the data of party
    ``party_perm[p]`` of the original, with input ``x`` renamed to
    ``input_maps[p][x]`` and outcome ``a`` to ``output_maps[p][a]``.
    Relabelings of this shape map the no-signaling polytope, the local
    polytope and the quantum set onto themselves.
    """

    party_perm: tuple[int, ...]
    input_maps: tuple[tuple[int, ...], ...]
    output_maps: tuple[tuple[int, ...], ...]

    def apply_index(self, scen: Scenario, x_idx: int, a_idx: int) -> tuple[int, int]:
        xs = scen.decode_input(x_idx)
        aa = scen.decode_outcome(a_idx)
        new_xs = tuple(self.input_maps[p][xs[self.party_perm[p]]] for p in range(scen.parties))
        new_aa = tuple(self.output_maps[p][aa[self.party_perm[p]]] for p in range(scen.parties))
        return scen.encode_input(new_xs), scen.encode_outcome(new_aa)


def apply_symmetry_to_expression(expression: BellExpression, sym: Symmetry) -> BellExpression:
    scen = expression.scenario
    coeffs = {}
    for (x, a), c in expression.coeffs.items():
        coeffs[sym.apply_index(scen, x, a)] = c
    return BellExpression(scen, coeffs, expression.classical_bound, expression.label)


def apply_symmetry_to_box(box: Box, sym: Symmetry) -> Box:
    """Push a box through a relabeling; preserves validity and no-signaling."""
    scen = box.scenario
    na = scen.n_outputs
    if box.mode == "exact":
        table = [Fraction(0)] * scen.table_size
        for x in range(scen.n_inputs):
            for a in range(na):
                nx_, na_ = sym.apply_index(scen, x, a)
                table[nx_ * na + na_] = box.value(x, a)
        return Box(scen, table, "exact")
    arr = np.zeros((scen.n_inputs, na))
    for x in range(scen.n_inputs):
        for a in range(na):
            nx_, na_ = sym.apply_index(scen, x, a)
            arr[nx_, na_] = box.value(x, a)
    return Box(scen, arr, "numeric")


def expression_invariant_under(expression: BellExpression, sym: Symmetry) -> bool:
    """Exact check that the symmetry maps the expression onto itself."""
    image = apply_symmetry_to_expression(expression, sym)
    a = {k: v for k, v in expression.coeffs.items() if v}
    b = {k: v for k, v in image.coeffs.items() if v}
    return a == b


# ---------------------------------------------------------------------------
# box transformations


def postselect(box: Box, party: int, x_value: int, a_value: int) -> Box:
    """Condition on (input, outcome) at one party and drop it.

    Rows of the reduced table are renormalized by the conditional marginal;
    conditioning on a zero-probability event raises.
    """
    scen = box.scenario
    if not (0 <= party < scen.parties):
        raise ValueError("party index out of range")
    rest = [p for p in range(scen.parties) if p != party]
    new_scen = Scenario(
        tuple(scen.inputs[p] for p in rest), tuple(scen.outputs[p] for p in rest)
    )
    exact = box.mode == "exact"
    na_new = new_scen.n_outputs
    table = [Fraction(0)] * new_scen.table_size if exact else np.zeros(
        (new_scen.n_inputs, na_new)
    )
    for xo in new_scen.input_tuples():
        xs = list(xo)
        xs.insert(party, x_value)
        x_idx = scen.encode_input(tuple(xs))
        row = {}
        for ao in new_scen.outcome_tuples():
            aa = list(ao)
            aa.insert(party, a_value)
            row[ao] = box.value(x_idx, scen.encode_outcome(tuple(aa)))
        norm = sum(row.values())
        bad = norm == 0 if exact else float(norm) <= config.tol()
        if bad:
            raise ZeroDivisionError(
                f"postselection on zero-probability event at party {party}"
            )
        xo_idx = new_scen.encode_input(xo)
        for ao, v in row.items():
            if exact:
                table[xo_idx * na_new + new_scen.encode_outcome(ao)] = v / norm
            else:
                table[xo_idx, new_scen.encode_outcome(ao)] = float(v) / float(norm)
    return Box(new_scen, table, box.mode)


def drop_party(box: Box, party: int, x_value: int = 0) -> Box:
    """Marginalize a party away, summing its outcome at a fixed input.

    Only well defined when the box does not signal from that party; callers
    wanting a safety net should run :func:`is_nonsignaling` first.
    """
    scen = box.scenario
    rest = [p for p in range(scen.parties) if p != party]
    new_scen = Scenario(
        tuple(scen.inputs[p] for p in rest), tuple(scen.outputs[p] for p in rest)
    )
    exact = box.mode == "exact"
    na_new = new_scen.n_outputs
    table = [Fraction(0)] * new_scen.table_size if exact else np.zeros(
        (new_scen.n_inputs, na_new)
    )
    for xo in new_scen.input_tuples():
        xs = list(xo)
        xs.insert(party, x_value)
        x_idx = scen.encode_input(tuple(xs))
        xo_idx = new_scen.encode_input(xo)
        for ao in new_scen.outcome_tuples():
            acc = Fraction(0) if exact else 0.0
            for a_i in range(scen.outputs[party]):
                aa = list(ao)
                aa.insert(party, a_i)
                acc = acc + box.value(x_idx, scen.encode_outcome(tuple(aa)))
            if exact:
                table[xo_idx * na_new + new_scen.encode_outcome(ao)] = acc
            else:
                table[xo_idx, new_scen.encode_outcome(ao)] = acc
    return Box(new_scen, table, box.mode)


def lift_box(box: Box) -> Box:
    """Append a party that deterministically echoes its input.

    Requires a binary-input/binary-output box; the added party is
    independent of the original ones, so no-signaling is preserved.
    """
    scen = box.scenario
    if any(m != 2 for m in scen.inputs) or any(d != 2 for d in scen.outputs):
        raise ValueError("lift_box requires a binary-input/binary-output box")
    new_scen = binary_scenario(scen.parties + 1)
    exact = box.mode == "exact"
    na_new = new_scen.n_outputs
    table = [Fraction(0)] * new_scen.table_size if exact else np.zeros(
        (new_scen.n_inputs, na_new)
    )
    for xs in scen.input_tuples():
        x_idx = scen.encode_input(xs)
        for x_new in (0, 1):
            nxs = xs + (x_new,)
            nx_idx = new_scen.encode_input(nxs)
            for aa in scen.outcome_tuples():
                v = box.value(x_idx, scen.encode_outcome(aa))
                naa = aa + (x_new,)
                if exact:
                    table[nx_idx * na_new + new_scen.encode_outcome(naa)] = v
                else:
                    table[nx_idx, new_scen.encode_outcome(naa)] = v
    return Box(new_scen, table, box.mode)


# ---------------------------------------------------------------------------
# input distributions


@dataclass(frozen=True)
class InputDistribution:
    """Probability density over the joint inputs of a scenario."""

    scenario: Scenario
    q: dict  # x_idx -> Rat

    def __post_init__(self):
        total = Fraction(0)
        for x, v in self.q.items():
            if not (0 <= x < self.scenario.n_inputs):
                raise ValueError("input index out of range")
            if v < 0:
                raise ValueError("negative input probability")
            total += v
        if total != 1:
            raise ValueError("input distribution must sum to 1")

    def prob(self, x_idx: int) -> Fraction:
        return self.q.get(x_idx, Fraction(0))

    def support(self) -> list[int]:
        return sorted(x for x, v in self.q.items() if v)

    def to_json(self) -> dict:
        return {
            "scenario": self.scenario.to_json(),
            "q": {str(x): rat_to_str(Fraction(v)) for x, v in sorted(self.q.items()) if v},
        }

    @staticmethod
    def from_json(obj: dict) -> "InputDistribution":
        scen = Scenario.from_json(obj["scenario"])
        q = {int(k): rat_from_str(v) for k, v in obj["q"].items()}
        return InputDistribution(scen, q)
