"""The guess-your-neighbour's-input (GYNI) game family.

N players on a ring each receive a private bit and must all output their
right-hand neighbour's bit; the expression awards weight q(x) to the single
all-correct outcome for each input string x.  The closed-form classical
bound is max_x [q(x) + q(complement of x)], and the quantum bound coincides
with it: the winning projectors of any two input strings other than a
string and its complement are orthogonal, so the Bell operator splits into
orthogonal blocks whose norms are bounded by the per-block coefficient
sums.  That structural argument is checked combinatorially by
:func:`orthogonality_certificate`; no state optimization is ever run.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .core import (
    BellExpression,
    InputDistribution,
    Symmetry,
    binary_scenario,
    expression_invariant_under,
)

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _hatted(n_parties: int) -> int:
    """Number of leading bits entering the parity promise."""
    return n_parties if n_parties % 2 == 1 else n_parties - 1


def parity_promise(n_parties: int) -> InputDistribution:
    """Uniform distribution over input strings whose first n-hat bits have
    even parity (n-hat = N for odd N, N-1 for even N)."""
    if n_parties < 2:
        raise ValueError("need at least two parties")
    scen = binary_scenario(n_parties)
    nhat = _hatted(n_parties)
    weight = Fraction(1, 2 ** (n_parties - 1))
    q = {}
    for xs in itertools.product((0, 1), repeat=n_parties):
        if sum(xs[:nhat]) % 2 == 0:
            q[scen.encode_input(xs)] = weight
    return InputDistribution(scen, q)


def uniform_promise(n_parties: int) -> InputDistribution:
    scen = binary_scenario(n_parties)
    weight = Fraction(1, 2**n_parties)
    q = {x: weight for x in range(scen.n_inputs)}
    return InputDistribution(scen, q)


def classical_bound_formula(q: InputDistribution) -> Fraction:
    """max over x of q(x) + q(bitwise complement of x), exactly."""
    scen = q.scenario
    best = _ZERO
    for x in range(scen.n_inputs):
        xs = scen.decode_input(x)
        comp = scen.encode_input(tuple(1 - b for b in xs))
        cand = q.prob(x) + q.prob(comp)
        if cand > best:
            best = cand
    return best


def _shift_left(xs: tuple[int, ...]) -> tuple[int, ...]:
    """Outcome tuple demanded by GYNI: a_i = x_{i+1}, cyclically."""
    return xs[1:] + xs[:1]


@dataclass(frozen=True)
class GyniGame:
    n_parties: int
    promise: InputDistribution
    expression: BellExpression


def _parity_translations(n_parties: int) -> list[Symmetry]:
    """XOR relabelings preserving the parity promise: flip inputs by a string
    c of even n-hat parity, flipping each party's outcome by its neighbour's
    bit so that winning configurations map to winning configurations."""
    nhat = _hatted(n_parties)
    gens = []
    basis = []
    for i in range(1, nhat):
        c = [0] * n_parties
        c[0] = 1
        c[i] = 1
        basis.append(tuple(c))
    for i in range(nhat, n_parties):
        c = [0] * n_parties
        c[i] = 1
        basis.append(tuple(c))
    identity = tuple(range(n_parties))
    for c in basis:
        in_maps = tuple((c[p], 1 - c[p]) if c[p] else (0, 1) for p in range(n_parties))
        shifted = _shift_left(c)
        out_maps = tuple(
            (shifted[p], 1 - shifted[p]) if shifted[p] else (0, 1)
            for p in range(n_parties)
        )
        gens.append(Symmetry(identity, in_maps, out_maps))
    return gens


def _rotation(n_parties: int) -> Symmetry:
    perm = tuple((p + 1) % n_parties for p in range(n_parties))
    ident_in = tuple((0, 1) for _ in range(n_parties))
    return Symmetry(perm, ident_in, ident_in)


def gyni_expression(n_parties: int, q: InputDistribution | None = None) -> GyniGame:
    """The probability-weighted GYNI expression: coefficient q(x) on the term
    P(a = left-shift of x | x), classical bound filled from the closed form.

    Relabeling symmetries of the expression (XOR translations of the parity
    promise, plus the party rotation when it applies) are attached after an
    exact invariance check, so downstream LPs may collapse orbits."""
    if q is None:
        q = parity_promise(n_parties)
    scen = q.scenario
    if scen.parties != n_parties or any(m != 2 for m in scen.inputs):
        raise ValueError("promise must be over binary inputs for each party")
    coeffs = {}
    for x in q.support():
        xs = scen.decode_input(x)
        coeffs[(x, scen.encode_outcome(_shift_left(xs)))] = q.prob(x)
    expr = BellExpression(
        scen,
        coeffs,
        classical_bound=classical_bound_formula(q),
        label=f"gyni-{n_parties}",
    )
    candidates = _parity_translations(n_parties) + [_rotation(n_parties)]
    syms = tuple(s for s in candidates if expression_invariant_under(expr, s))
    expr = BellExpression(
        scen, coeffs, expr.classical_bound, expr.label, party_symmetries=syms
    )
    return GyniGame(n_parties, q, expr)


def gyni_sum_expression(n_parties: int, q: InputDistribution | None = None) -> BellExpression:
    """Unit-coefficient variant: one term per supported input string.

    For the parity promise no supported string is another's complement, so
    all terms are pairwise orthogonal and the classical bound is exactly 1
    (the weighted bound rescaled by 2^(N-1))."""
    if q is None:
        q = parity_promise(n_parties)
    game = gyni_expression(n_parties, q)
    support = q.support()
    weight = q.prob(support[0])
    if any(q.prob(x) != weight for x in support):
        raise ValueError("sum form requires a promise uniform on its support")
    coeffs = {key: _ONE for key in game.expression.coeffs}
    return BellExpression(
        game.expression.scenario,
        coeffs,
        classical_bound=game.expression.classical_bound / weight,
        label=f"gyni-{n_parties}-sum",
        party_symmetries=game.expression.party_symmetries,
    )


# ---------------------------------------------------------------------------
# structural quantum-bound certificate


def _terms_orthogonal(t1, t2) -> bool:
    """Two terms are orthogonal when some party receives the same input in
    both but must answer differently; no deterministic (or projective)
    strategy can then satisfy both."""
    (xs1, aa1), (xs2, aa2) = t1, t2
    for x1, a1, x2, a2 in zip(xs1, aa1, xs2, aa2):
        if x1 == x2 and a1 != a2:
            return True
    return False


def orthogonality_certificate(expression: BellExpression) -> bool:
    """Certify structurally that the quantum bound equals the classical one.

    Two disjoint sufficient patterns are accepted:

    * every pair of terms is orthogonal and all coefficients are 1, which
      pins both bounds at exactly 1 (the unextendible-product-basis shape);
    * the expression is a GYNI game (binary scenario, outcome tuple equal to
      the cyclic left shift of the input tuple, coefficients a probability
      distribution) and the only non-orthogonal pairs are complement pairs
      (x, complement x); the Bell operator then splits into orthogonal
      blocks of norm at most q(x) + q(complement), reproducing the classical
      bound max_x [q(x) + q(complement x)].

    Anything else returns False.  Negative coefficients invalidate both
    arguments and raise."""
    coeffs = expression.coeffs
    if any(c < 0 for c in coeffs.values()):
        raise ValueError("certificate requires nonnegative coefficients")
    scen = expression.scenario
    decoded = []
    for (x, a), c in sorted(coeffs.items()):
        decoded.append(((scen.decode_input(x), scen.decode_outcome(a)), c))
    non_orth = []
    for m in range(len(decoded)):
        for n in range(m + 1, len(decoded)):
            if not _terms_orthogonal(decoded[m][0], decoded[n][0]):
                non_orth.append((m, n))

    if not non_orth and all(c == 1 for _, c in decoded):
        return True

    binary = all(m == 2 for m in scen.inputs) and all(d == 2 for d in scen.outputs)
    if not binary:
        return False
    for (xs, aa), _ in decoded:
        if aa != _shift_left(xs):
            return False
    if sum(c for _, c in decoded) != 1:
        return False
    for m, n in non_orth:
        xs1 = decoded[m][0][0]
        xs2 = decoded[n][0][0]
        if tuple(1 - b for b in xs1) != xs2:
            return False
    return True
