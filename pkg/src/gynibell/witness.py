"""Witness operators and bound-entangled states from product-vector sets.

Given an orthogonal product set S spanning a proper subspace, the projector
onto span(S) defines two companions: the normalized projector onto the
complement, rho = (1 - Pi) / (dim - |S|), and the operator
W = (Pi - eps*1) / (|S| - eps*dim), where eps is the smallest overlap of Pi
with a fully product state.  When S is unextendible eps is strictly
positive, W is nonnegative on every product state, tr(W rho) < 0, and
measuring W along the local bases of S produces a no-signaling box whose
value on the set's Bell inequality is |S|(1-eps)/(|S| - eps*dim) > 1.

eps has no closed form; it is estimated by alternating (see-saw)
minimization over product states with many seeded restarts.  Each site
update replaces one local vector by the bottom eigenvector of the operator
obtained by contracting Pi with the other sites, so the objective is
nonincreasing at every step; the run is deterministic for a fixed master
seed.  For weak UPBs the relevant minimum runs over the finite set of
products of the set's own local vectors and is computed exhaustively.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import config
from .core import Box, Scenario, bell_value, is_nonsignaling
from .upb import ProductVectorSet, bell_from_set

DEFAULT_STARTS = 200
SWEEP_TOL = 1e-12


@dataclass(frozen=True)
class HermitianOp:
    """Dense Hermitian operator on a tensor product of local spaces."""

    dims: tuple
    matrix: np.ndarray

    def __post_init__(self):
        d = 1
        for k in self.dims:
            d *= k
        if self.matrix.shape != (d, d):
            raise ValueError("matrix shape does not match the site dimensions")
        if np.max(np.abs(self.matrix - self.matrix.conj().T)) > 1e-9:
            raise ValueError("matrix is not Hermitian within tolerance")

    @property
    def total_dim(self) -> int:
        return self.matrix.shape[0]


def projector_onto_span(pvs: ProductVectorSet, tolerance: float | None = None) -> HermitianOp:
    """Pi = sum over m of |Psi_m><Psi_m| for an orthonormal product set."""
    eps = config.tol(tolerance)
    d = pvs.total_dim
    mat = np.zeros((d, d), dtype=complex)
    full = [pvs.full_vector(m) for m in range(len(pvs))]
    for m in range(len(full)):
        for n in range(m + 1, len(full)):
            if abs(np.vdot(full[m], full[n])) > eps:
                raise ValueError("input vectors are not orthogonal")
        mat += np.outer(full[m], full[m].conj())
    return HermitianOp(pvs.dims, mat)


# ---------------------------------------------------------------------------
# see-saw minimization of <product| Pi |product>


def _contract_site(tensor: np.ndarray, dims, state, site: int) -> np.ndarray:
    """Contract all sites but one with the given local vectors, leaving a
    dims[site] x dims[site] Hermitian matrix."""
    n = len(dims)
    t = tensor.reshape(*dims, *dims)
    # contract ket side (axes n..2n-1) then bra side (axes 0..n-1)
    for p in range(n - 1, -1, -1):
        if p == site:
            continue
        t = np.tensordot(t, state[p], axes=([n + p], [0]))
    for p in range(n - 1, -1, -1):
        if p == site:
            continue
        t = np.tensordot(t, state[p].conj(), axes=([p], [0]))
    return t


def _seesaw_once(mat, dims, rng) -> float:
    n = len(dims)
    state = []
    for d in dims:
        v = rng.normal(size=d) + 1j * rng.normal(size=d)
        state.append(v / np.linalg.norm(v))
    value = _product_expectation(mat, dims, state)
    while True:
        improved = value
        for site in range(n):
            local = _contract_site(mat, dims, state, site)
            local = (local + local.conj().T) / 2
            evals, evecs = np.linalg.eigh(local)
            state[site] = evecs[:, 0]
            new_value = float(evals[0].real)
            # each site update is an exact minimization over that site, so
            # the objective must not increase
            if new_value > value + 1e-9:
                raise RuntimeError("see-saw objective increased")
            value = new_value
        if improved - value < SWEEP_TOL:
            return value


def _product_expectation(mat, dims, state) -> float:
    full = np.array([1.0 + 0j])
    for v in state:
        full = np.kron(full, v)
    return float(np.real(np.vdot(full, mat @ full)))


def epsilon_min(
    pi: HermitianOp,
    starts: int = DEFAULT_STARTS,
    seed: int = 0,
    threads: int = 1,
) -> float:
    """Smallest overlap of the operator with a fully product state, by
    multi-start see-saw; per-start seeds derive from the master seed, so the
    result is reproducible.  A heuristic: the value is an upper bound on the
    true minimum, checked elsewhere against an independent grid oracle."""
    dims = pi.dims
    mat = pi.matrix
    seeds = np.random.SeedSequence(seed).spawn(starts)

    def one(ss):
        return _seesaw_once(mat, dims, np.random.default_rng(ss))

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(one, seeds))
    else:
        values = [one(ss) for ss in seeds]
    return min(values)


def epsilon_min_restricted(pi: HermitianOp, pvs: ProductVectorSet) -> float:
    """Minimum of <prod| Pi |prod> over products of the set's own local
    vectors (the weak-UPB variant of eps); exhaustive, hence exact up to
    rounding."""
    best = None
    for combo in itertools.product(*(range(len(s)) for s in pvs.local_sets)):
        state = [pvs.local_sets[i][k] for i, k in enumerate(combo)]
        v = _product_expectation(pi.matrix, pi.dims, state)
        if best is None or v < best:
            best = v
    return best


# ---------------------------------------------------------------------------
# witness and state


@dataclass(frozen=True)
class WitnessReport:
    epsilon: float
    witness: HermitianOp
    state: HermitianOp
    trace_W_rho: float
    bell_value: float

    def to_json(self) -> dict:
        return {
            "epsilon": float(f"{self.epsilon:.12g}"),
            "trace_W_rho": float(f"{self.trace_W_rho:.12g}"),
            "bell_value": float(f"{self.bell_value:.12g}"),
            "dims": list(self.witness.dims),
        }


def witness_and_state(pvs: ProductVectorSet, eps: float) -> WitnessReport:
    """W = (Pi - eps*1)/(|S| - eps*dim) and rho = (1 - Pi)/(dim - |S|).

    Also evaluates tr(W rho) and the value the measured witness box gives to
    the set's own Bell inequality."""
    size = len(pvs)
    pi = projector_onto_span(pvs)
    d = pi.total_dim
    if not 0 < eps < size / d:
        raise ValueError(f"eps must lie in (0, {size}/{d})")
    if size >= d:
        raise ValueError("set must span a proper subspace")
    eye = np.eye(d)
    w_mat = (pi.matrix - eps * eye) / (size - eps * d)
    rho_mat = (eye - pi.matrix) / (d - size)
    witness = HermitianOp(pvs.dims, w_mat)
    state = HermitianOp(pvs.dims, rho_mat)
    trace_w_rho = float(np.real(np.trace(w_mat @ rho_mat)))
    box = measure_operator(witness, pvs)
    expr = bell_from_set(pvs)
    value = float(bell_value(expr, box))
    return WitnessReport(eps, witness, state, trace_w_rho, value)


# ---------------------------------------------------------------------------
# partial transpose / PPT


def partial_transpose(op: HermitianOp, sites) -> HermitianOp:
    """Transpose the chosen sites; an involution per site subset."""
    n = len(op.dims)
    sites = sorted(set(sites))
    if any(not 0 <= s < n for s in sites):
        raise ValueError("site index out of range")
    t = op.matrix.reshape(*op.dims, *op.dims)
    axes = list(range(2 * n))
    for s in sites:
        axes[s], axes[n + s] = axes[n + s], axes[s]
    t = np.transpose(t, axes)
    d = op.total_dim
    return HermitianOp(op.dims, t.reshape(d, d))


def is_ppt(state: HermitianOp, tolerance: float | None = None) -> bool:
    """True iff every bipartition's partial transpose is positive
    semidefinite within tolerance."""
    eps = config.tol(tolerance)
    n = len(state.dims)
    for r in range(1, 2 ** (n - 1)):
        sites = [s for s in range(n) if (r >> s) & 1]
        pt = partial_transpose(state, sites)
        evals = np.linalg.eigvalsh(pt.matrix)
        if evals[0] < -eps:
            return False
    return True


# ---------------------------------------------------------------------------
# measuring an operator along the set's local bases


def _complete_basis(vectors, dim: int, tolerance: float | None = None) -> list[np.ndarray]:
    """Extend mutually orthogonal unit vectors to a full orthonormal basis by
    Gram-Schmidt over standard-basis candidates in index order."""
    eps = config.tol(tolerance)
    basis = [np.asarray(v, dtype=complex) for v in vectors]
    for k in range(dim):
        if len(basis) == dim:
            break
        cand = np.zeros(dim, dtype=complex)
        cand[k] = 1.0
        for b in basis:
            cand = cand - np.vdot(b, cand) * b
        norm = np.linalg.norm(cand)
        if norm > np.sqrt(eps):
            basis.append(cand / norm)
    if len(basis) != dim:
        raise ValueError("could not complete the basis")
    return basis


def measure_operator(
    op: HermitianOp, pvs: ProductVectorSet, tolerance: float | None = None
) -> Box:
    """The numeric box P(a|x) = tr(op . tensor of |b_{x_i, a_i}><b_{x_i, a_i}|),
    where setting x_i selects site i's subset completed to a full basis.

    For any unit-trace Hermitian op the result is normalized and
    no-signaling; positivity needs op to be positive on product states."""
    dims = pvs.dims
    site_bases = []
    for i, subsets in enumerate(pvs.local_subsets):
        bases = []
        for subset in subsets:
            vecs = [pvs.local_sets[i][k] for k in subset]
            bases.append(_complete_basis(vecs, dims[i], tolerance))
        site_bases.append(bases)
    scen = Scenario(
        tuple(len(b) for b in site_bases), tuple(dims)
    )
    n = len(dims)
    tensor = op.matrix.reshape(*dims, *dims)
    arr = np.zeros((scen.n_inputs, scen.n_outputs))
    for xs in scen.input_tuples():
        x_idx = scen.encode_input(xs)
        for aa in scen.outcome_tuples():
            t = tensor
            for p in range(n - 1, -1, -1):
                v = site_bases[p][xs[p]][aa[p]]
                t = np.tensordot(t, v, axes=([n + p], [0]))
            for p in range(n - 1, -1, -1):
                v = site_bases[p][xs[p]][aa[p]]
                t = np.tensordot(t, v.conj(), axes=([p], [0]))
            arr[x_idx, scen.encode_outcome(aa)] = float(np.real(t))
    box = Box(scen, arr, "numeric")
    report = is_nonsignaling(box, tolerance)
    if not report.is_nonsignaling:
        raise RuntimeError("measured box failed the no-signaling check")
    return box
