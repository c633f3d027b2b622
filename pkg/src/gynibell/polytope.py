"""Correlation polytopes: local, no-signaling and time-ordered bilocal.

Everything here is exact.  Optima over the local polytope come from full
enumeration of deterministic vertices; optima over the no-signaling set and
the TOBL set come from the rational simplex in :mod:`gynibell.lp`, posed in
full probability coordinates with one equality row per normalization and
no-signaling condition.  Every optimizer hands back a certificate (an
optimal box, a convex decomposition, or a separating inequality) that is
re-verified with exact arithmetic before being returned.

Affine ranks for dimension and facet (tightness) checks run in subset
marginal coordinates: the linear map sending a table to the collection of
"all parties in a subset produce fixed non-last outcomes" marginals is a
bijection on the affine hull of normalized no-signaling tables (the table is
reconstructed by inclusion-exclusion over last outcomes), so affine ranks of
vertex sets agree with the full-coordinate ranks while the matrices stay
small enough for exact elimination.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from . import config, lp
from ._rank import ExactRankAccumulator
from .core import (
    BellExpression,
    Box,
    DeterministicStrategy,
    Scenario,
    Symmetry,
    bell_value,
    box_from_strategy,
    enumerate_deterministic_strategies,
    expression_invariant_under,
    is_nonsignaling,
)

_ZERO = Fraction(0)
_ONE = Fraction(1)


# ---------------------------------------------------------------------------
# local polytope


@dataclass(frozen=True)
class LocalPolytope:
    scenario: Scenario
    vertices: tuple  # deterministic boxes, in strategy lex order


def local_polytope(scenario: Scenario, cap: int | None = None) -> LocalPolytope:
    strategies = enumerate_deterministic_strategies(scenario, cap)
    return LocalPolytope(
        scenario, tuple(box_from_strategy(scenario, s) for s in strategies)
    )


class ClassicalOptimum(NamedTuple):
    value: Fraction
    strategy: DeterministicStrategy


def _decoded_terms(expression: BellExpression):
    scen = expression.scenario
    terms = []
    for (x, a), c in sorted(expression.coeffs.items()):
        xs = scen.decode_input(x)
        aa = scen.decode_outcome(a)
        terms.append((tuple(zip(xs, aa)), c))
    return terms


def _strategy_value(responses, terms) -> Fraction:
    total = _ZERO
    for pairs, c in terms:
        for p, (x, a) in enumerate(pairs):
            if responses[p][x] != a:
                break
        else:
            total += c
    return total


def classical_max(expression: BellExpression, cap: int | None = None) -> ClassicalOptimum:
    """Exact maximum over deterministic strategies, with an argmax strategy."""
    scen = expression.scenario
    terms = _decoded_terms(expression)
    best = None
    best_strategy = None
    for strategy in _iter_strategies(scen, cap):
        v = _strategy_value(strategy.responses, terms)
        if best is None or v > best:
            best = v
            best_strategy = strategy
    return ClassicalOptimum(best, best_strategy)


def _iter_strategies(scenario: Scenario, cap: int | None = None):
    cap = config.STRATEGY_CAP if cap is None else cap
    count = scenario.strategy_count()
    if count > cap:
        raise ValueError(f"strategy enumeration cap exceeded: {count} > {cap}")
    per_party = [
        list(itertools.product(range(d), repeat=m))
        for m, d in zip(scenario.inputs, scenario.outputs)
    ]
    for combo in itertools.product(*per_party):
        yield DeterministicStrategy(combo)


# ---------------------------------------------------------------------------
# subset-marginal ("collapsed") coordinates for rank computations


def cg_dimension(scenario: Scenario) -> int:
    """Number of subset-marginal coordinates, constant included."""
    n = 1
    for m, d in zip(scenario.inputs, scenario.outputs):
        n *= 1 + m * (d - 1)
    return n


# ---------------------------------------------------------------------------
# no-signaling LP


def _ns_equality_rows(scenario: Scenario):
    """Sparse no-signaling and normalization equality rows over table indices.

    Per party, per pair (0, x_i) of that party's inputs, per context of the
    other inputs and other outcomes: the party's outcome marginal agrees.
    """
    na = scenario.n_outputs
    rows = []
    for xs in scenario.input_tuples():
        x_idx = scenario.encode_input(xs)
        coeffs = {x_idx * na + a: _ONE for a in range(na)}
        rows.append(lp.make_constraint(coeffs, "=", 1))
    for party in range(scenario.parties):
        m_i = scenario.inputs[party]
        if m_i < 2:
            continue
        others = [p for p in range(scenario.parties) if p != party]
        other_inputs = itertools.product(*(range(scenario.inputs[p]) for p in others))
        for xo in other_inputs:
            base = list(xo)
            base.insert(party, 0)
            for x_i in range(1, m_i):
                alt = list(xo)
                alt.insert(party, x_i)
                xb = scenario.encode_input(tuple(base))
                xa = scenario.encode_input(tuple(alt))
                for ao in itertools.product(*(range(scenario.outputs[p]) for p in others)):
                    coeffs = {}
                    for a_i in range(scenario.outputs[party]):
                        aa = list(ao)
                        aa.insert(party, a_i)
                        a_idx = scenario.encode_outcome(tuple(aa))
                        coeffs[xb * na + a_idx] = coeffs.get(xb * na + a_idx, _ZERO) + _ONE
                        coeffs[xa * na + a_idx] = coeffs.get(xa * na + a_idx, _ZERO) - _ONE
                    rows.append(lp.make_constraint(coeffs, "=", 0))
    return rows


class NsOptimum(NamedTuple):
    value: Fraction
    box: Box


def _index_orbits(scenario: Scenario, symmetries) -> list[int]:
    """Orbit id per flattened (input, outcome) table index under the group
    generated by the given relabelings."""
    na = scenario.n_outputs
    total = scenario.table_size
    perms = []
    for sym in symmetries:
        perm = [0] * total
        for x in range(scenario.n_inputs):
            for a in range(na):
                nx, na_ = sym.apply_index(scenario, x, a)
                perm[x * na + a] = nx * na + na_
        perms.append(perm)
    orbit = [-1] * total
    n_orbits = 0
    for start in range(total):
        if orbit[start] >= 0:
            continue
        stack = [start]
        orbit[start] = n_orbits
        while stack:
            i = stack.pop()
            for perm in perms:
                j = perm[i]
                if orbit[j] < 0:
                    orbit[j] = n_orbits
                    stack.append(j)
        n_orbits += 1
    return orbit


def _collapse_rows(rows, orbit, n_orbits):
    """Project equality rows onto orbit-constant variables, deduplicating."""
    seen = {}
    out = []
    for row in rows:
        acc = {}
        for j, v in row.coeffs:
            o = orbit[j]
            acc[o] = acc.get(o, _ZERO) + v
        acc = {o: v for o, v in acc.items() if v}
        if not acc:
            if row.rhs != 0:
                raise lp.LPError("inconsistent collapsed row")
            continue
        items = tuple(sorted(acc.items()))
        scale = _ONE / items[0][1]  # canonical form: leading coefficient 1
        key = (tuple((o, v * scale) for o, v in items), row.rhs * scale)
        if key in seen:
            continue
        seen[key] = True
        out.append(lp.Constraint(items, "=", row.rhs))
    return out


def ns_max(
    expression: BellExpression,
    use_symmetry: bool = True,
    max_pivots: int | None = None,
) -> NsOptimum:
    """Exact maximum over the no-signaling polytope, plus an optimal box.

    The LP is posed in full probability coordinates (variables P(a|x) >= 0,
    normalization and per-party no-signaling equalities).  When the
    expression carries relabeling symmetries they are verified exactly and
    the LP is collapsed onto orbit-constant tables first; group averaging
    makes the collapsed optimum equal the full one.  The expanded optimal
    box is always re-checked exactly: nonnegative, normalized,
    no-signaling, and achieving the claimed value.
    """
    scen = expression.scenario
    n = scen.table_size
    na = scen.n_outputs
    rows = _ns_equality_rows(scen)
    if len(rows) > config.NS_LP_MAX_ROWS or n > config.NS_LP_MAX_COLS:
        syms = list(expression.party_symmetries) if use_symmetry else []
        if not syms:
            raise ValueError(
                f"no-signaling LP too large: {len(rows)} rows x {n} columns"
            )

    syms = list(expression.party_symmetries) if use_symmetry else []
    for sym in syms:
        if not expression_invariant_under(expression, sym):
            raise ValueError("declared symmetry does not fix the expression")

    objective_full = [_ZERO] * n
    for (x, a), c in expression.coeffs.items():
        objective_full[x * na + a] += c

    if syms:
        orbit = _index_orbits(scen, syms)
        n_orbits = max(orbit) + 1
        collapsed = _collapse_rows(rows, orbit, n_orbits)
        objective = [_ZERO] * n_orbits
        for j, c in enumerate(objective_full):
            if c:
                objective[orbit[j]] += c
        problem = lp.make_problem(objective, "max", collapsed)
        res = lp.solve(problem, max_pivots=max_pivots)
        if res.status != "optimal":
            raise lp.LPError(f"no-signaling LP returned {res.status}")
        table = [res.solution[orbit[j]] for j in range(n)]
    else:
        problem = lp.make_problem(objective_full, "max", rows)
        res = lp.solve(problem, max_pivots=max_pivots)
        if res.status != "optimal":
            raise lp.LPError(f"no-signaling LP returned {res.status}")
        table = list(res.solution)

    box = Box(scen, table, "exact")
    report = is_nonsignaling(box)
    if not report.is_nonsignaling:
        raise lp.LPError("optimal box failed the no-signaling recheck")
    achieved = bell_value(expression, box)
    if achieved != res.value:
        raise lp.LPError("optimal box does not achieve the LP value")
    return NsOptimum(res.value, box)


# ---------------------------------------------------------------------------
# local membership


class LocalMembership(NamedTuple):
    is_local: bool
    weights: tuple | None           # (strategy, weight) pairs, weight > 0
    separating: tuple | None        # (BellExpression, local bound, value at box)


def local_membership(box: Box, cap: int | None = None) -> LocalMembership:
    """Decide membership in the local polytope by exact feasibility LP.

    Local boxes come with an exact convex decomposition over deterministic
    vertices; non-local ones with a separating inequality (a Farkas
    combination of the table rows), verified against every vertex.
    """
    scen = box.scenario
    if box.mode != "exact":
        raise ValueError("local_membership requires an exact box")
    strategies = enumerate_deterministic_strategies(scen, cap)
    vertices = [box_from_strategy(scen, s) for s in strategies]
    n = len(strategies)
    rows = []
    for t in range(scen.table_size):
        coeffs = {}
        for k, v in enumerate(vertices):
            val = v._table[t]
            if val:
                coeffs[k] = val
        x_idx, a_idx = divmod(t, scen.n_outputs)
        rows.append(lp.make_constraint(coeffs, "=", box.value(x_idx, a_idx)))
    rows.append(lp.make_constraint({k: _ONE for k in range(n)}, "=", 1))
    res = lp.feasible_point(rows, n)
    if res.status == "optimal":
        support = [(k, res.solution[k]) for k in range(n) if res.solution[k]]
        # exact reconstruction check
        for t in range(scen.table_size):
            acc = _ZERO
            for k, w in support:
                acc += w * vertices[k]._table[t]
            x_idx, a_idx = divmod(t, scen.n_outputs)
            if acc != box.value(x_idx, a_idx):
                raise lp.LPError("membership decomposition failed recheck")
        weights = tuple((strategies[k], w) for k, w in support)
        return LocalMembership(True, weights, None)

    farkas = res.farkas
    coeffs = {}
    for t in range(scen.table_size):
        if farkas[t]:
            x_idx, a_idx = divmod(t, scen.n_outputs)
            coeffs[(x_idx, a_idx)] = farkas[t]
    bound = -farkas[scen.table_size]
    separating = BellExpression(scen, coeffs, label="separating inequality")
    value_at_box = bell_value(separating, box)
    for v in vertices:
        if bell_value(separating, v) > bound:
            raise lp.LPError("separating inequality failed vertex recheck")
    if not value_at_box > bound:
        raise lp.LPError("separating inequality does not separate the box")
    return LocalMembership(False, None, (separating, bound, value_at_box))


# ---------------------------------------------------------------------------
# TOBL (time-ordered bilocal) optimization, 3 parties, binary


def _responders():
    """h: input -> output, as tuples (h(0), h(1))."""
    return list(itertools.product((0, 1), repeat=2))


def _one_way_pairs():
    """(f, g): leader outputs f(x_lead); follower outputs g(x_lead, x_follow).

    g is stored as a 4-tuple indexed by 2*x_lead + x_follow.
    """
    leaders = list(itertools.product((0, 1), repeat=2))
    followers = list(itertools.product((0, 1), repeat=4))
    return [(f, g) for f in leaders for g in followers]


class ToblOptimum(NamedTuple):
    value: Fraction
    box: Box
    model: dict  # bipartition -> list of ((h, fwd pair, bwd pair), weight)


_BIPARTITIONS = ((0, 1, 2), (1, 2, 0), (2, 0, 1))


class _ToblLayout:
    """Variable layout and component geometry of the TOBL LP."""

    def __init__(self, scen: Scenario):
        self.scen = scen
        self.na = scen.n_outputs
        self.n_table = scen.table_size
        self.responders = _responders()
        self.pairs = _one_way_pairs()
        self.n_pairs = len(self.pairs)
        self.block = len(self.responders) * self.n_pairs
        self.n_vars = self.n_table + 3 * 2 * self.block

    def wvar(self, bip_idx: int, direction: int, h_idx: int, pair_idx: int) -> int:
        return (
            self.n_table
            + bip_idx * 2 * self.block
            + direction * self.block
            + h_idx * self.n_pairs
            + pair_idx
        )

    def component_entries(self, bip_idx: int, direction: int, h, f, g):
        """Table indices where the deterministic component puts mass 1."""
        i, j, k = _BIPARTITIONS[bip_idx]
        forward = direction == 0
        scen = self.scen
        out = []
        for xs in scen.input_tuples():
            aa = [0, 0, 0]
            aa[i] = h[xs[i]]
            if forward:
                aa[j] = f[xs[j]]
                aa[k] = g[2 * xs[j] + xs[k]]
            else:
                aa[k] = f[xs[k]]
                aa[j] = g[2 * xs[k] + xs[j]]
            out.append(scen.encode_input(xs) * self.na + scen.encode_outcome(tuple(aa)))
        return out

    def rows(self):
        rows = []
        for x in range(self.scen.n_inputs):
            rows.append(
                lp.make_constraint({x * self.na + a: _ONE for a in range(self.na)}, "=", 1)
            )
        for bip_idx in range(3):
            for direction in (0, 1):
                mix = [dict() for _ in range(self.n_table)]
                for h_idx, h in enumerate(self.responders):
                    for pair_idx, (f, g) in enumerate(self.pairs):
                        var = self.wvar(bip_idx, direction, h_idx, pair_idx)
                        for t in self.component_entries(bip_idx, direction, h, f, g):
                            mix[t][var] = _ONE
                for t in range(self.n_table):
                    coeffs = mix[t]
                    coeffs[t] = coeffs.get(t, _ZERO) - _ONE
                    rows.append(lp.make_constraint(coeffs, "=", 0))
            for h_idx in range(len(self.responders)):
                coeffs = {}
                for pair_idx in range(self.n_pairs):
                    coeffs[self.wvar(bip_idx, 0, h_idx, pair_idx)] = _ONE
                    coeffs[self.wvar(bip_idx, 1, h_idx, pair_idx)] = -_ONE
                rows.append(lp.make_constraint(coeffs, "=", 0))
        return rows

    def variable_permutation(self, sym: Symmetry):
        """The permutation a relabeling induces on the LP variables.

        Table entries permute by the index action.  A weight variable for a
        deterministic component (lone responder h; leader f; follower g) maps
        to the component obtained by transporting those functions through
        the relabeling; blocks map to blocks structurally (the image lone
        party fixes the bipartition, the image leader fixes the direction),
        so the map is a genuine bijection even though distinct components
        can share the same table support.  Returns None when the party
        permutation scatters a bipartition outside the cyclic block layout.
        """
        scen = self.scen
        perm = [None] * self.n_vars
        for x in range(scen.n_inputs):
            for a in range(self.na):
                nx, na_ = sym.apply_index(scen, x, a)
                perm[x * self.na + a] = nx * self.na + na_

        pi = sym.party_perm
        inv_pi = [0] * 3
        for p in range(3):
            inv_pi[pi[p]] = p
        inv_in = [tuple(m.index(v) for v in range(2)) for m in sym.input_maps]
        out = sym.output_maps
        h_index = {h: idx for idx, h in enumerate(self.responders)}
        pair_index = {fg: idx for idx, fg in enumerate(self.pairs)}
        bip_of_lone = {b[0]: idx for idx, b in enumerate(_BIPARTITIONS)}

        for bip_idx, (i, j, k) in enumerate(_BIPARTITIONS):
            for direction in (0, 1):
                lead, follow = (j, k) if direction == 0 else (k, j)
                i2, lead2, follow2 = inv_pi[i], inv_pi[lead], inv_pi[follow]
                bip2 = bip_of_lone[i2]
                tup = _BIPARTITIONS[bip2]
                if (lead2, follow2) == (tup[1], tup[2]):
                    dir2 = 0
                elif (lead2, follow2) == (tup[2], tup[1]):
                    dir2 = 1
                else:
                    return None
                for h_idx, h in enumerate(self.responders):
                    h2 = tuple(out[i2][h[inv_in[i2][x]]] for x in range(2))
                    for pair_idx, (f, g) in enumerate(self.pairs):
                        f2 = tuple(out[lead2][f[inv_in[lead2][x]]] for x in range(2))
                        g2 = tuple(
                            out[follow2][
                                g[2 * inv_in[lead2][xl] + inv_in[follow2][xf]]
                            ]
                            for xl in range(2)
                            for xf in range(2)
                        )
                        perm[self.wvar(bip_idx, direction, h_idx, pair_idx)] = self.wvar(
                            bip2, dir2, h_index[h2], pair_index[(f2, g2)]
                        )
        if len(set(perm)) != self.n_vars:
            raise lp.LPError("induced variable map is not a permutation")
        return perm


def _orbits_of_permutations(n: int, perms) -> list[int]:
    orbit = [-1] * n
    count = 0
    for start in range(n):
        if orbit[start] >= 0:
            continue
        stack = [start]
        orbit[start] = count
        while stack:
            i = stack.pop()
            for perm in perms:
                j = perm[i]
                if orbit[j] < 0:
                    orbit[j] = count
                    stack.append(j)
        count += 1
    return orbit


def _rows_invariant_under(rows, perm) -> bool:
    """Exact check that permuting variable indices maps the row multiset to
    itself (constraint set invariance)."""

    def canon(row):
        items = tuple(sorted(row.coeffs))
        scale = _ONE / items[0][1]
        return (tuple((j, v * scale) for j, v in items), row.relation, row.rhs * scale)

    original = {}
    for row in rows:
        key = canon(row)
        original[key] = original.get(key, 0) + 1
    for row in rows:
        permuted = lp.Constraint(
            tuple(sorted((perm[j], v) for j, v in row.coeffs)), row.relation, row.rhs
        )
        key = canon(permuted)
        if key not in original:
            return False
    return True


def tobl_max(
    expression: BellExpression,
    use_symmetry: bool = True,
    max_pivots: int | None = None,
) -> ToblOptimum:
    """Exact maximum over tripartite time-ordered bilocal correlations.

    For each bipartition i|jk the table must admit two simultaneous
    decompositions over shared weights: one where j measures first (its
    outcome depends only on x_j, k may depend on both inputs) and one where
    k measures first.  A shared-weight distribution over triples
    (h, one-way j->k, one-way j<-k) is equivalent to a pair of per-direction
    weight vectors whose marginals over the lone party's responder h agree:
    from matching marginals a coupling w1(h,.) * w2(h,.) / m(h) always
    exists, and it is constructed and re-verified exactly below, so the
    reported optimum is certified by an explicit member of the shared-weight
    model.

    Relabeling symmetries carried by the expression are used to collapse the
    LP onto orbit-constant variables after exact invariance checks (on both
    the objective and the constraint multiset); the expanded solution is
    verified against the full model either way.
    """
    scen = expression.scenario
    if scen.parties != 3 or scen.inputs != (2, 2, 2) or scen.outputs != (2, 2, 2):
        raise ValueError("tobl_max supports the 3-party binary scenario only")
    layout = _ToblLayout(scen)
    rows = layout.rows()
    objective = [_ZERO] * layout.n_vars
    for (x, a), c in expression.coeffs.items():
        objective[x * layout.na + a] += c

    perms = []
    if use_symmetry:
        for sym in expression.party_symmetries:
            if not expression_invariant_under(expression, sym):
                continue
            perm = layout.variable_permutation(sym)
            if perm is None:
                continue
            if all(objective[perm[j]] == objective[j] for j in range(layout.n_vars)) and \
                    _rows_invariant_under(rows, perm):
                perms.append(perm)

    if perms:
        orbit = _orbits_of_permutations(layout.n_vars, perms)
        n_orbits = max(orbit) + 1
        reduced_rows = _collapse_rows(rows, orbit, n_orbits)
        reduced_obj = [_ZERO] * n_orbits
        for j, c in enumerate(objective):
            if c:
                reduced_obj[orbit[j]] += c
        problem = lp.make_problem(reduced_obj, "max", reduced_rows)
        res = lp.solve(problem, max_pivots=max_pivots)
        if res.status != "optimal":
            raise lp.LPError(f"TOBL LP returned {res.status}")
        solution = [res.solution[orbit[j]] for j in range(layout.n_vars)]
        value = res.value
    else:
        problem = lp.make_problem(objective, "max", rows)
        res = lp.solve(problem, max_pivots=max_pivots)
        if res.status != "optimal":
            raise lp.LPError(f"TOBL LP returned {res.status}")
        solution = list(res.solution)
        value = res.value

    # full-model feasibility recheck of the (possibly expanded) solution
    for row in rows:
        lhs = sum((v * solution[j] for j, v in row.coeffs), _ZERO)
        if lhs != row.rhs:
            raise lp.LPError("TOBL solution failed the full-model recheck")

    table = solution[: layout.n_table]
    box = Box(scen, table, "exact")
    if bell_value(expression, box) != value:
        raise lp.LPError("TOBL optimal box does not achieve the LP value")

    # build and verify the shared-weight model per bipartition
    model = {}
    responders, pairs = layout.responders, layout.pairs
    for bip_idx, (i, j, k) in enumerate(_BIPARTITIONS):
        marg = [_ZERO] * len(responders)
        w = {0: {}, 1: {}}
        for direction in (0, 1):
            for h_idx in range(len(responders)):
                for pair_idx in range(layout.n_pairs):
                    v = solution[layout.wvar(bip_idx, direction, h_idx, pair_idx)]
                    if v:
                        w[direction][(h_idx, pair_idx)] = v
        for h_idx in range(len(responders)):
            m_fwd = sum((v for (h, _), v in w[0].items() if h == h_idx), _ZERO)
            m_bwd = sum((v for (h, _), v in w[1].items() if h == h_idx), _ZERO)
            if m_fwd != m_bwd:
                raise lp.LPError("mismatched responder marginals in TOBL solution")
            marg[h_idx] = m_fwd
        triples = []
        for (h_idx, p1), v1 in w[0].items():
            for (h2, p2), v2 in w[1].items():
                if h2 == h_idx:
                    triples.append(((h_idx, p1, p2), v1 * v2 / marg[h_idx]))
        # both induced mixtures must reproduce the table exactly
        for direction, pair_pos in ((0, 0), (1, 1)):
            mixture = [_ZERO] * layout.n_table
            for (h_idx, p1, p2), weight in triples:
                pair_idx = (p1, p2)[pair_pos]
                f, g = pairs[pair_idx]
                for t in layout.component_entries(bip_idx, direction, responders[h_idx], f, g):
                    mixture[t] += weight
            if mixture != table:
                raise lp.LPError("TOBL coupling failed the mixture recheck")
        model[(i, (j, k))] = [
            ((responders[h], pairs[p1], pairs[p2]), weight)
            for (h, p1, p2), weight in triples
        ]
    return ToblOptimum(value, box, model)


# ---------------------------------------------------------------------------
# dimension and facet (tightness) checks


def _cg_block_matrices(scenario: Scenario, strategies):
    """Row-wise product expansion of per-party indicator blocks: the result
    row for a strategy holds every subset-marginal coordinate (constant
    first) as a 0/1 integer."""
    mats = None
    for p, (m, d) in enumerate(zip(scenario.inputs, scenario.outputs)):
        pairs = [(x, a) for x in range(m) for a in range(d - 1)]
        block = np.empty((len(strategies), 1 + len(pairs)), dtype=np.int64)
        block[:, 0] = 1
        for kk, (x, a) in enumerate(pairs):
            block[:, 1 + kk] = np.fromiter(
                (1 if s.responses[p][x] == a else 0 for s in strategies),
                dtype=np.int64,
                count=len(strategies),
            )
        if mats is None:
            mats = block
        else:
            mats = np.einsum("bi,bj->bij", mats, block).reshape(len(strategies), -1)
    return mats


def cg_coordinates_of_strategies(scenario: Scenario, strategies) -> np.ndarray:
    if not strategies:
        return np.zeros((0, cg_dimension(scenario)), dtype=np.int64)
    return _cg_block_matrices(scenario, strategies)


def _full_coordinates_of_strategies(scenario: Scenario, strategies) -> np.ndarray:
    """Dense 0/1 full-table rows; only for small cross-check scenarios."""
    na = scenario.n_outputs
    out = np.zeros((len(strategies), scenario.table_size), dtype=np.int64)
    for r, s in enumerate(strategies):
        for xs in scenario.input_tuples():
            x_idx = scenario.encode_input(xs)
            a_idx = scenario.encode_outcome(s.outcome_for(xs))
            out[r, x_idx * na + a_idx] = 1
    return out


def affine_rank_of_strategies(
    scenario: Scenario, strategies, coords: str = "cg"
) -> int:
    """Exact affine rank of a set of deterministic vertices.

    ``coords="cg"`` uses subset-marginal coordinates (default; equivalent on
    vertex sets and much smaller); ``coords="full"`` uses the raw table.
    """
    if len(strategies) <= 1:
        return 0
    if coords == "cg":
        mat = cg_coordinates_of_strategies(scenario, strategies)
    elif coords == "full":
        mat = _full_coordinates_of_strategies(scenario, strategies)
    else:
        raise ValueError("coords must be 'cg' or 'full'")
    acc = ExactRankAccumulator(mat.shape[1])
    base = mat[0]
    for r in range(1, mat.shape[0]):
        acc.add_row(mat[r] - base)
    return acc.rank


def polytope_dimension(scenario: Scenario, cap: int | None = None) -> int:
    """Exact affine rank of the set of all deterministic vertices.

    Processed in chunks with an early exit at the coordinate-count ceiling
    (an affine rank can never exceed the number of coordinates minus the
    constant, so hitting the ceiling is already a proof).
    """
    ceiling = cg_dimension(scenario) - 1
    acc = ExactRankAccumulator(cg_dimension(scenario))
    base = None
    chunk = []
    chunk_size = 1024
    for strategy in _iter_strategies(scenario, cap):
        chunk.append(strategy)
        if len(chunk) >= chunk_size:
            base = _dimension_feed(scenario, acc, chunk, base)
            chunk = []
            if acc.rank >= ceiling:
                return acc.rank
    if chunk:
        base = _dimension_feed(scenario, acc, chunk, base)
    return acc.rank


def _dimension_feed(scenario, acc, chunk, base):
    mat = cg_coordinates_of_strategies(scenario, chunk)
    start = 0
    if base is None:
        base = mat[0].copy()
        start = 1
    for r in range(start, mat.shape[0]):
        acc.add_row(mat[r] - base)
    return base


@dataclass(frozen=True)
class FacetReport:
    """Outcome of a tightness check against the local polytope."""

    is_tight: bool
    saturating_vertex_count: int
    affine_rank: int
    polytope_dimension: int
    bound_attained: bool

    def to_json(self) -> dict:
        return {
            "is_tight": self.is_tight,
            "saturating_vertex_count": self.saturating_vertex_count,
            "affine_rank": self.affine_rank,
            "polytope_dimension": self.polytope_dimension,
            "bound_attained": self.bound_attained,
        }


def facet_check(
    expression: BellExpression, bound: Fraction, cap: int | None = None
) -> FacetReport:
    """Certify or refute tightness: the inequality is a facet of the local
    polytope iff the bound is attained and the saturating vertices have
    affine rank exactly one below the polytope dimension.

    The supplied bound must equal the exact classical maximum (recomputed
    here; a mismatch raises)."""
    scen = expression.scenario
    bound = Fraction(bound)
    terms = _decoded_terms(expression)
    best = None
    saturating = []
    for strategy in _iter_strategies(scen, cap):
        v = _strategy_value(strategy.responses, terms)
        if best is None or v > best:
            best = v
        if v == bound:
            saturating.append(strategy)
    if best != bound:
        raise ValueError(
            f"supplied bound {bound} is not the classical maximum {best}"
        )
    dim = polytope_dimension(scen, cap)
    rank = affine_rank_of_strategies(scen, saturating)
    return FacetReport(
        is_tight=bool(saturating) and rank == dim - 1,
        saturating_vertex_count=len(saturating),
        affine_rank=rank,
        polytope_dimension=dim,
        bound_attained=bool(saturating),
    )
