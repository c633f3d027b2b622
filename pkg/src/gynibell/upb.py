"""Orthogonal product-vector sets and the Bell inequalities they generate.

A set S of mutually orthogonal fully product vectors over C^{d_1} x ... x
C^{d_N} induces, at each site, a collection of distinct local vectors; when
those split unambiguously into groups of mutually orthogonal vectors (the
orthogonality graph is a disjoint union of cliques), the groups become
measurement settings, positions inside a group become outcomes, and the sum
of the corresponding conditional probabilities is bounded by 1 for
classical and quantum strategies alike.  Unextendibility of S (no product
vector orthogonal to its span) is decided by an exhaustive assignment
search; weak unextendibility restricts the candidates to products of the
local vectors themselves.

The named generators (Shifts, Generalized Shifts, the minimal families of
size N(d-1)+1, a weak-UPB example on 2x2x3) attach their canonical subset
structure, which fixes the setting/outcome labels of the emitted
inequalities; sets loaded from raw vectors get subsets derived by
first-appearance order instead, and sets whose per-site orthogonality is
not a clique union (the two-qutrit TILES vectors, the qutrit cycle
realizations) either raise or carry no subsets at all.

All vector arithmetic is floating point with the package tolerance; every
verdict that matters (extension witnesses, orthogonality) is re-verified by
direct inner products, so false positives are self-detecting.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import config
from .core import BellExpression, Scenario

_SQ2 = 1.0 / math.sqrt(2.0)


class AmbiguousSubsetsError(ValueError):
    """Local vectors cannot be grouped: some orthogonality-graph component is
    not a clique.  Carries one conflicting triple (u orthogonal to w, v
    orthogonal to w, but u not orthogonal to v)."""

    def __init__(self, site: int, triple):
        self.site = site
        self.triple = triple
        super().__init__(
            f"ambiguous local subsets at site {site}: vectors {triple[0]} and "
            f"{triple[1]} share orthogonal partner {triple[2]} but are not "
            f"mutually orthogonal"
        )


# ---------------------------------------------------------------------------
# small vector helpers


def ket(*amps) -> np.ndarray:
    v = np.asarray(amps, dtype=complex)
    return v / np.linalg.norm(v)


def basis_ket(dim: int, k: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[k] = 1.0
    return v


def hadamard_pair() -> tuple[np.ndarray, np.ndarray]:
    e = ket(_SQ2, _SQ2)
    return e, qubit_orthogonal(e)


def qubit_orthogonal(e: np.ndarray) -> np.ndarray:
    """Deterministic orthogonal partner of a qubit state."""
    return np.array([-np.conj(e[1]), np.conj(e[0])], dtype=complex)


def fourier_basis(dim: int) -> list[np.ndarray]:
    """Columns of the discrete Fourier matrix; every overlap with the
    standard basis is 1/sqrt(dim), so the basis is as generic as needed."""
    omega = np.exp(2j * np.pi / dim)
    return [
        np.array([omega ** (r * c) for r in range(dim)], dtype=complex) / np.sqrt(dim)
        for c in range(dim)
    ]


def inner(u: np.ndarray, v: np.ndarray) -> complex:
    return complex(np.vdot(u, v))


def product_inner(u_sites, v_sites) -> complex:
    out = 1.0 + 0j
    for u, v in zip(u_sites, v_sites):
        out *= inner(u, v)
    return out


def _same_up_to_phase(u, v, eps) -> bool:
    return abs(inner(u, v)) > 1.0 - eps


# ---------------------------------------------------------------------------
# product vector sets


@dataclass(frozen=True)
class ProductVectorSet:
    """Orthogonal product vectors, optionally with per-site local subsets.

    ``vectors[m][i]`` is the site-i factor of the m-th vector.
    ``local_sets[i]`` lists the distinct local vectors at site i;
    ``local_subsets[i]`` partitions their indices into mutually orthogonal
    groups (the measurement settings); ``vector_local_index[m][i]`` points
    each vector factor at its local-set entry.  ``local_subsets`` is None
    for sets whose per-site orthogonality structure is not a disjoint union
    of cliques; such sets still support the unextendibility checks but
    cannot be turned into Bell inequalities.
    """

    dims: tuple
    vectors: tuple
    local_sets: tuple
    local_subsets: tuple | None
    vector_local_index: tuple
    label: str = ""

    def __len__(self) -> int:
        return len(self.vectors)

    @property
    def total_dim(self) -> int:
        n = 1
        for d in self.dims:
            n *= d
        return n

    def full_vector(self, m: int) -> np.ndarray:
        out = np.array([1.0 + 0j])
        for v in self.vectors[m]:
            out = np.kron(out, v)
        return out

    def labels(self, m: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """(settings, outcomes) of vector m: subset index and position."""
        if self.local_subsets is None:
            raise ValueError("set carries no local subset structure")
        xs, aa = [], []
        for i in range(len(self.dims)):
            li = self.vector_local_index[m][i]
            for k, subset in enumerate(self.local_subsets[i]):
                if li in subset:
                    xs.append(k)
                    aa.append(subset.index(li))
                    break
            else:
                raise ValueError(f"vector {m} site {i} not covered by subsets")
        return tuple(xs), tuple(aa)

    def to_json(self) -> dict:
        return {
            "dims": list(self.dims),
            "vectors": [
                [[[float(z.real), float(z.imag)] for z in site] for site in vec]
                for vec in self.vectors
            ],
        }

    @staticmethod
    def from_json(obj: dict, tolerance: float | None = None) -> "ProductVectorSet":
        dims = tuple(obj["dims"])
        vectors = []
        for vec in obj["vectors"]:
            sites = tuple(
                np.array([complex(re, im) for re, im in site]) for site in vec
            )
            vectors.append(sites)
        return build_local_subsets(vectors, dims, tolerance)


def _check_global_orthogonality(vectors, eps) -> None:
    for m in range(len(vectors)):
        for n in range(m + 1, len(vectors)):
            if abs(product_inner(vectors[m], vectors[n])) > eps:
                raise ValueError(f"vectors {m} and {n} are not orthogonal")


def _check_unit_norm(vectors, dims, eps) -> None:
    for m, vec in enumerate(vectors):
        if len(vec) != len(dims):
            raise ValueError(f"vector {m} has wrong site count")
        for i, v in enumerate(vec):
            if len(v) != dims[i]:
                raise ValueError(f"vector {m} site {i} has wrong dimension")
            if abs(np.linalg.norm(v) - 1.0) > eps:
                raise ValueError(f"vector {m} site {i} is not normalized")


def build_local_subsets(
    vectors, dims, tolerance: float | None = None, label: str = ""
) -> ProductVectorSet:
    """Derive local sets and subsets from raw orthogonal product vectors.

    Per site: deduplicate local vectors modulo a global phase, build the
    orthogonality graph and use its connected components as subsets.  When a
    component is not a clique the grouping is ambiguous (the TILES
    situation) and :class:`AmbiguousSubsetsError` is raised with a
    conflicting triple.  Subset order and positions follow first appearance.
    """
    eps = config.tol(tolerance)
    dims = tuple(dims)
    vectors = tuple(tuple(np.asarray(v, dtype=complex) for v in vec) for vec in vectors)
    _check_unit_norm(vectors, dims, eps)
    _check_global_orthogonality(vectors, eps)

    local_sets = []
    local_subsets = []
    vector_local_index = [[] for _ in vectors]
    for i in range(len(dims)):
        reps: list[np.ndarray] = []
        for m, vec in enumerate(vectors):
            v = vec[i]
            for k, r in enumerate(reps):
                if _same_up_to_phase(v, r, eps):
                    vector_local_index[m].append(k)
                    break
            else:
                reps.append(v)
                vector_local_index[m].append(len(reps) - 1)
        # orthogonality graph on the deduplicated vectors
        nloc = len(reps)
        adj = [[False] * nloc for _ in range(nloc)]
        for a in range(nloc):
            for b in range(a + 1, nloc):
                if abs(inner(reps[a], reps[b])) <= eps:
                    adj[a][b] = adj[b][a] = True
        comp = [-1] * nloc
        comps = []
        for start in range(nloc):
            if comp[start] >= 0:
                continue
            cid = len(comps)
            stack, members = [start], []
            comp[start] = cid
            while stack:
                u = stack.pop()
                members.append(u)
                for w in range(nloc):
                    if adj[u][w] and comp[w] < 0:
                        comp[w] = cid
                        stack.append(w)
            members.sort()
            comps.append(members)
        for members in comps:
            for a_pos in range(len(members)):
                for b_pos in range(a_pos + 1, len(members)):
                    u, w = members[a_pos], members[b_pos]
                    if not adj[u][w]:
                        # prefer a partner orthogonal to both offenders
                        partner = next(
                            (z for z in members if adj[u][z] and adj[w][z]),
                            None,
                        )
                        if partner is None:
                            partner = next(z for z in members if adj[u][z] or adj[w][z])
                        raise AmbiguousSubsetsError(i, (u, w, partner))
            if len(members) > dims[i]:
                raise ValueError(
                    f"site {i}: {len(members)} mutually orthogonal vectors exceed dimension {dims[i]}"
                )
        local_sets.append(reps)
        local_subsets.append(tuple(tuple(m) for m in comps))

    return ProductVectorSet(
        dims,
        vectors,
        tuple(local_sets),
        tuple(local_subsets),
        tuple(tuple(ix) for ix in vector_local_index),
        label=label,
    )


def _from_explicit_subsets(
    vectors, dims, site_subsets, tolerance: float | None = None, label: str = ""
) -> ProductVectorSet:
    """Build a set whose subset structure (and hence inequality labels) is
    supplied by a family generator rather than derived."""
    eps = config.tol(tolerance)
    dims = tuple(dims)
    vectors = tuple(tuple(np.asarray(v, dtype=complex) for v in vec) for vec in vectors)
    _check_unit_norm(vectors, dims, eps)
    _check_global_orthogonality(vectors, eps)
    local_sets = []
    local_subsets = []
    for i, subsets in enumerate(site_subsets):
        reps = []
        subset_ix = []
        for subset in subsets:
            if len(subset) > dims[i]:
                raise ValueError(f"site {i}: subset larger than the local dimension")
            for a in range(len(subset)):
                for b in range(a + 1, len(subset)):
                    if abs(inner(subset[a], subset[b])) > eps:
                        raise ValueError(f"site {i}: subset members not orthogonal")
            ix = []
            for v in subset:
                ix.append(len(reps))
                reps.append(np.asarray(v, dtype=complex))
            subset_ix.append(tuple(ix))
        local_sets.append(reps)
        local_subsets.append(tuple(subset_ix))
    vector_local_index = []
    for m, vec in enumerate(vectors):
        row = []
        for i, v in enumerate(vec):
            for k, r in enumerate(local_sets[i]):
                if _same_up_to_phase(v, r, eps):
                    row.append(k)
                    break
            else:
                raise ValueError(f"vector {m} site {i} not among the supplied subsets")
        vector_local_index.append(tuple(row))
    return ProductVectorSet(
        dims,
        vectors,
        tuple(local_sets),
        tuple(local_subsets),
        tuple(vector_local_index),
        label=label,
    )


# ---------------------------------------------------------------------------
# checks


def check_local_independence(pvs: ProductVectorSet, tolerance: float | None = None) -> bool:
    """True iff no two local vectors from different subsets at the same site
    are orthogonal (every cross-subset overlap exceeds the tolerance)."""
    eps = config.tol(tolerance)
    if pvs.local_subsets is None:
        raise ValueError("set carries no local subset structure")
    for i in range(len(pvs.dims)):
        subsets = pvs.local_subsets[i]
        reps = pvs.local_sets[i]
        for k1 in range(len(subsets)):
            for k2 in range(k1 + 1, len(subsets)):
                for u in subsets[k1]:
                    for w in subsets[k2]:
                        if abs(inner(reps[u], reps[w])) <= eps:
                            return False
    return True


@dataclass(frozen=True)
class UpbVerdict:
    is_upb: bool
    is_wupb: bool
    extension_witness: tuple | None  # per-site vectors, or None


def _site_rank(vectors, eps) -> int:
    if not vectors:
        return 0
    mat = np.array(vectors)
    s = np.linalg.svd(mat, compute_uv=False)
    return int(np.sum(s > eps))


def _null_vector(vectors, dim, eps) -> np.ndarray:
    """A unit vector orthogonal (Hermitian inner product) to all the given
    local vectors."""
    if not vectors:
        return basis_ket(dim, 0)
    mat = np.conj(np.array(vectors))
    _, s, vh = np.linalg.svd(mat, full_matrices=True)
    null = vh[np.sum(s > eps) :]
    return null[0].conj()


def is_upb(
    pvs: ProductVectorSet,
    cap: int | None = None,
    tolerance: float | None = None,
) -> UpbVerdict:
    """Decide unextendibility by exhaustive assignment search.

    A product vector orthogonal to every member of S must, for each member,
    be orthogonal at some site; scanning all assignments of members to
    sites, S is extendible iff some assignment leaves every site's assigned
    local vectors short of full rank.  The first extension found (lowest
    assignment in lexicographic site order) is returned and re-verified by
    direct inner products.
    """
    eps = config.tol(tolerance)
    cap = config.ASSIGNMENT_CAP if cap is None else cap
    n_sites = len(pvs.dims)
    size = len(pvs)
    if size >= pvs.total_dim:
        raise ValueError("set must span a proper subspace (|S| < dim H)")
    if n_sites**size > cap:
        raise ValueError(
            f"assignment search cap exceeded: {n_sites**size} > {cap}"
        )

    rank_memo = [dict() for _ in range(n_sites)]

    def site_rank(site: int, mask: int) -> int:
        memo = rank_memo[site]
        if mask in memo:
            return memo[mask]
        members = sorted(
            {
                pvs.vector_local_index[m][site]
                for m in range(size)
                if mask & (1 << m)
            }
        )
        r = _site_rank([pvs.local_sets[site][k] for k in members], eps)
        memo[mask] = r
        return r

    masks = [0] * n_sites

    def search(m: int):
        if m == size:
            return tuple(masks)
        for site in range(n_sites):
            new_mask = masks[site] | (1 << m)
            if site_rank(site, new_mask) < pvs.dims[site]:
                old = masks[site]
                masks[site] = new_mask
                found = search(m + 1)
                masks[site] = old
                if found is not None:
                    return found
        return None

    assignment = search(0)
    wupb = is_wupb(pvs, tolerance=tolerance)
    if assignment is None:
        return UpbVerdict(True, wupb, None)

    witness = []
    for site in range(n_sites):
        members = sorted(
            {
                pvs.vector_local_index[m][site]
                for m in range(size)
                if assignment[site] & (1 << m)
            }
        )
        witness.append(
            _null_vector([pvs.local_sets[site][k] for k in members], pvs.dims[site], eps)
        )
    for m in range(size):
        if abs(product_inner(witness, pvs.vectors[m])) > eps:
            raise RuntimeError("extension witness failed the orthogonality recheck")
    return UpbVerdict(False, wupb, tuple(witness))


def is_wupb(pvs: ProductVectorSet, tolerance: float | None = None) -> bool:
    """Weak unextendibility: no product of the set's own local vectors is
    orthogonal to every member (finite enumeration over the local sets)."""
    eps = config.tol(tolerance)
    if len(pvs) >= pvs.total_dim:
        raise ValueError("set must span a proper subspace (|S| < dim H)")
    for combo in itertools.product(*(range(len(s)) for s in pvs.local_sets)):
        candidate = [pvs.local_sets[i][k] for i, k in enumerate(combo)]
        if all(
            abs(product_inner(candidate, pvs.vectors[m])) <= eps
            for m in range(len(pvs))
        ):
            return False
    return True


# ---------------------------------------------------------------------------
# Bell inequality synthesis


def bell_from_set(pvs: ProductVectorSet, tolerance: float | None = None) -> BellExpression:
    """One unit-coefficient term per vector: setting = subset index, outcome
    = position inside the subset; classical bound exactly 1.

    Requires the local independence property: with it, any two vectors are
    orthogonal at some site *within* one subset, i.e. same setting and
    different outcomes, which is what caps deterministic strategies at one
    satisfied term."""
    if not check_local_independence(pvs, tolerance):
        raise ValueError("set lacks the local independence property")
    inputs = tuple(len(s) for s in pvs.local_subsets)
    outputs = tuple(max(len(sub) for sub in s) for s in pvs.local_subsets)
    scen = Scenario(inputs, outputs)
    coeffs = {}
    for m in range(len(pvs)):
        xs, aa = pvs.labels(m)
        key = (scen.encode_input(xs), scen.encode_outcome(aa))
        if key in coeffs:
            raise ValueError("two vectors map to the same term")
        coeffs[key] = Fraction(1)
    return BellExpression(
        scen,
        coeffs,
        classical_bound=Fraction(1),
        label=pvs.label or "product-set inequality",
    )


# ---------------------------------------------------------------------------
# named families


def shifts(e=None, tolerance: float | None = None) -> ProductVectorSet:
    """The three-qubit Shifts set {|000>, |1 e' e>, |e 1 e'>, |e' e 1>} with
    e' the orthogonal partner of e (default: Hadamard-rotated basis).

    A per-site sequence of three e vectors is also accepted.  Up to local
    unitaries and party permutations this is the only three-qubit
    unextendible product set, so its inequality is the canonical three-party
    one."""
    if e is None:
        es = [hadamard_pair()[0]] * 3
    elif isinstance(e, (list, tuple)) and len(e) == 3 and all(np.shape(v) == (2,) for v in e):
        es = [np.asarray(v, dtype=complex) for v in e]
    else:
        v = np.asarray(e, dtype=complex)
        if v.shape != (2,):
            raise ValueError("e must be a qubit vector, or three of them")
        es = [v] * 3
    zero, one = basis_ket(2, 0), basis_ket(2, 1)
    ebars = [qubit_orthogonal(v) for v in es]
    vectors = [
        (zero, zero, zero),
        (one, ebars[1], es[2]),
        (es[0], one, ebars[2]),
        (ebars[0], es[1], one),
    ]
    site_subsets = [
        [[zero, one], [es[i], ebars[i]]] for i in range(3)
    ]
    return _from_explicit_subsets(
        vectors, (2, 2, 2), site_subsets, tolerance, label="shifts"
    )


def gen_shifts(k: int, bases=None, tolerance: float | None = None) -> ProductVectorSet:
    """Generalized Shifts on N = 2k-1 qubits: the all-zero vector plus the
    2k-1 cyclic right-shifts of (1, e_1, ..., e_{k-1}, e'_{k-1}, ..., e'_1).

    ``bases``: k-1 qubit vectors e_i, pairwise different and different from
    the computational basis (defaults chosen accordingly)."""
    if k < 2:
        raise ValueError("k must be at least 2")
    n = 2 * k - 1
    if bases is None:
        bases = [
            ket(math.cos(t), math.sin(t))
            for t in (math.pi * (i + 1) / (4 * k) for i in range(k - 1))
        ]
    bases = [np.asarray(b, dtype=complex) for b in bases]
    if len(bases) != k - 1:
        raise ValueError("need k-1 basis vectors")
    zero, one = basis_ket(2, 0), basis_ket(2, 1)
    bars = [qubit_orthogonal(b) for b in bases]
    first = [one] + list(bases) + list(reversed(bars))
    vectors = [tuple([zero] * n)]
    current = first
    for _ in range(n):
        vectors.append(tuple(current))
        current = [current[-1]] + current[:-1]
    site_subsets = [
        [[zero, one]] + [[bases[i], bars[i]] for i in range(k - 1)]
        for _ in range(n)
    ]
    return _from_explicit_subsets(
        vectors, (2,) * n, site_subsets, tolerance, label=f"gen-shifts-{k}"
    )


def _two_basis_cyclic_set(
    n_parties: int, dim: int, basis, tolerance, label: str
) -> ProductVectorSet:
    """The textbook two-basis pattern: e_{d-1} at every site plus the cyclic
    rotations of (|0>, ..., |N-2>, e_j); N(d-1)+1 vectors, two local subsets
    per site (standard states and the second basis)."""
    eps = config.tol(tolerance)
    std = [basis_ket(dim, i) for i in range(dim)]
    for b in basis:
        if any(abs(inner(b, s)) <= eps for s in std):
            raise ValueError("second basis must have no zero overlap with the standard one")
    base = std[: n_parties - 1]
    vectors = [tuple([basis[dim - 1]] * n_parties)]
    for shift in range(n_parties):
        for j in range(dim - 1):
            pattern = base + [basis[j]]
            rotated = pattern[-shift:] + pattern[:-shift] if shift else pattern
            vectors.append(tuple(rotated))
    site_subsets = [[list(base), list(basis)] for _ in range(n_parties)]
    return _from_explicit_subsets(
        vectors, (dim,) * n_parties, site_subsets, tolerance, label=label
    )


def _walecki_cycles(n_vertices: int) -> list[list[int]]:
    """Decompose the complete graph on an odd number of vertices into
    (n-1)/2 edge-disjoint Hamiltonian cycles (zigzag construction)."""
    if n_vertices % 2 == 0 or n_vertices < 3:
        raise ValueError("need an odd vertex count")
    m = (n_vertices - 1) // 2
    cycles = []
    for k in range(m):
        path = [k % (2 * m)]
        for step in range(1, 2 * m):
            delta = (step + 1) // 2 * (1 if step % 2 == 1 else -1)
            path.append((k + delta) % (2 * m))
        cycles.append([2 * m] + path)
    seen = set()
    for c in cycles:
        if sorted(c) != list(range(n_vertices)):
            raise RuntimeError("cycle is not Hamiltonian")
        for i in range(n_vertices):
            edge = frozenset((c[i], c[(i + 1) % n_vertices]))
            if edge in seen:
                raise RuntimeError("cycle decomposition not edge-disjoint")
            seen.add(edge)
    if len(seen) != n_vertices * (n_vertices - 1) // 2:
        raise RuntimeError("cycle decomposition incomplete")
    return cycles


def _perp_in_plane(a: np.ndarray, rng) -> np.ndarray:
    mat = np.conj(a).reshape(1, a.shape[0])
    _, s, vh = np.linalg.svd(mat, full_matrices=True)
    t = rng.normal(size=2 * (a.shape[0] - 1))
    w = np.zeros(a.shape[0], dtype=complex)
    for k in range(a.shape[0] - 1):
        w += (t[2 * k] + 1j * t[2 * k + 1]) * vh[k + 1].conj()
    return w / np.linalg.norm(w)


def _perp_of_two_qutrit(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    w = np.cross(np.conj(a), np.conj(b))
    n = np.linalg.norm(w)
    if n < 1e-12:
        raise RuntimeError("degenerate pair while closing a cycle")
    return w / n


def _realize_cycle_qutrit(cycle, rng) -> dict:
    """Unit vectors in C^3, one per vertex, orthogonal exactly along the
    cycle edges (the last vertex closes against both neighbours)."""
    n = len(cycle)
    out = {}
    v = rng.normal(size=3) + 1j * rng.normal(size=3)
    out[cycle[0]] = v / np.linalg.norm(v)
    for i in range(1, n - 1):
        out[cycle[i]] = _perp_in_plane(out[cycle[i - 1]], rng)
    out[cycle[-1]] = _perp_of_two_qutrit(out[cycle[-2]], out[cycle[0]])
    return out


def _distinct_letter_upb_qutrits(
    n_parties: int, tolerance: float | None, label: str, seed: int = 0
) -> ProductVectorSet:
    """A provably unextendible set of 2N+1 product vectors on qutrits.

    The complete graph on the vectors splits into N Hamiltonian cycles, one
    per site; each cycle is realized by unit vectors orthogonal exactly
    along its edges, so every vector pair is orthogonal at exactly one site.
    All site factors are pairwise distinct and no three are coplanar, hence
    any single local vector can be orthogonal to at most two factors; an
    extension would need to cover 2N+1 vectors with at most 2 per site,
    which is impossible."""
    eps = config.tol(tolerance)
    size = 2 * n_parties + 1
    cycles = _walecki_cycles(size)
    for attempt in range(200):
        rng = np.random.default_rng(1_000_003 * seed + attempt)
        sites = [_realize_cycle_qutrit(c, rng) for c in cycles]
        ok = True
        for c, letters in zip(cycles, sites):
            edges = {frozenset((c[i], c[(i + 1) % size])) for i in range(size)}
            for u, v in itertools.combinations(range(size), 2):
                ip = abs(inner(letters[u], letters[v]))
                if frozenset((u, v)) in edges:
                    ok = ok and ip <= eps
                else:
                    # distinct and not accidentally orthogonal
                    ok = ok and 1e-6 < ip < 1 - 1e-6
            if not ok:
                break
            for tri in itertools.combinations(range(size), 3):
                m = np.array([letters[t] for t in tri])
                if np.linalg.svd(m, compute_uv=False)[-1] < 1e-6:
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            continue
        vectors = tuple(
            tuple(sites[s][m] for s in range(n_parties)) for m in range(size)
        )
        local_sets = tuple(
            [sites[s][m] for m in range(size)] for s in range(n_parties)
        )
        vector_local_index = tuple(tuple([m] * n_parties) for m in range(size))
        return ProductVectorSet(
            (3,) * n_parties,
            vectors,
            local_sets,
            None,
            vector_local_index,
            label=label,
        )
    raise RuntimeError("could not realize a generic cycle decomposition")


def niset_cerf(
    n_parties: int, dim: int, basis=None, tolerance: float | None = None
) -> ProductVectorSet:
    """Minimal-size orthogonal product family on (C^dim)^N, N >= 3,
    dim >= N-1, with N(dim-1)+1 vectors.

    For dim = 2 (three qubits) this is the textbook two-basis pattern and
    recovers the Shifts set up to local unitaries.  For dim = 3 the
    two-basis pattern is provably extendible (with at most six distinct
    local vectors per site some local vector repeats, a plane through a
    repeated vector removes three set members, and the 2N-2 leftovers fall
    to two per remaining site), so the constructor switches to a
    distinct-letter realization over a Hamiltonian cycle decomposition,
    which is unextendible by the matching counting argument.  The cycle
    realization has no subset structure; the two-setting inequality
    associated with this family's parameters comes from
    :func:`niset_cerf_inequality`.  For dim >= 4 the two-basis pattern is
    used as printed."""
    if n_parties < 3:
        raise ValueError("need at least three parties")
    if dim < n_parties - 1:
        raise ValueError("local dimension must be at least N-1")
    label = f"niset-cerf-{n_parties}-{dim}"
    if dim == 3:
        return _distinct_letter_upb_qutrits(n_parties, tolerance, label)
    if basis is None:
        basis = fourier_basis(dim)
    basis = [np.asarray(b, dtype=complex) for b in basis]
    return _two_basis_cyclic_set(n_parties, dim, basis, tolerance, label)


def niset_cerf_inequality(n_parties: int, dim: int) -> BellExpression:
    """The two-setting inequality of the minimal family: one term
    P(dim-1, ..., dim-1 | 1, ..., 1) plus, for every cyclic rotation and
    every j < dim-1, the term with outcomes (0, 1, ..., N-2, j) under
    settings (0, ..., 0, 1); all terms pairwise orthogonal, so the
    classical (and quantum) bound is exactly 1."""
    if n_parties < 3 or dim < n_parties - 1:
        raise ValueError("need N >= 3 and dim >= N-1")
    scen = Scenario((2,) * n_parties, (dim,) * n_parties)
    coeffs = {}
    top_x = (1,) * n_parties
    top_a = (dim - 1,) * n_parties
    coeffs[(scen.encode_input(top_x), scen.encode_outcome(top_a))] = Fraction(1)
    for shift in range(n_parties):
        for j in range(dim - 1):
            aa = list(range(n_parties - 1)) + [j]
            xs = [0] * (n_parties - 1) + [1]
            aa = aa[-shift:] + aa[:-shift] if shift else aa
            xs = xs[-shift:] + xs[:-shift] if shift else xs
            coeffs[(scen.encode_input(tuple(xs)), scen.encode_outcome(tuple(aa)))] = Fraction(1)
    return BellExpression(
        scen,
        coeffs,
        classical_bound=Fraction(1),
        label=f"niset-cerf-{n_parties}-{dim}-inequality",
    )


def wupb_example(tolerance: float | None = None) -> ProductVectorSet:
    """A weak UPB on 2x2x3 that is not a UPB: {|000>, |1 e' f>, |e 1 f'>,
    |e' e 1>, |e' e 2>, |e 1 f''>} with (f, f', f'') an orthonormal qutrit
    basis away from the standard one."""
    zero, one = basis_ket(2, 0), basis_ket(2, 1)
    e, ebar = hadamard_pair()
    f0, f1, f2 = fourier_basis(3)
    z3 = [basis_ket(3, i) for i in range(3)]
    vectors = [
        (zero, zero, z3[0]),
        (one, ebar, f0),
        (e, one, f1),
        (ebar, e, z3[1]),
        (ebar, e, z3[2]),
        (e, one, f2),
    ]
    site_subsets = [
        [[zero, one], [e, ebar]],
        [[zero, one], [e, ebar]],
        [z3, [f0, f1, f2]],
    ]
    return _from_explicit_subsets(
        vectors, (2, 2, 3), site_subsets, tolerance, label="wupb-2x2x3"
    )


def tiles() -> list[tuple[np.ndarray, np.ndarray]]:
    """The two-qutrit TILES vectors (raw; their local subsets are ambiguous,
    so building a ProductVectorSet from them raises)."""
    z = [basis_ket(3, i) for i in range(3)]
    m01 = ket(1, -1, 0)
    m12 = ket(0, 1, -1)
    plus = ket(1, 1, 1)
    return [
        (z[0], m01),
        (z[2], m12),
        (m01, z[2]),
        (m12, z[0]),
        (plus, plus),
    ]


def four_partite_tight_inequality() -> BellExpression:
    """A known tight four-partite inequality with no quantum violation, on
    the scenario with inputs (2, 2, 2, 3) and binary outputs: the sum of
    p(0000|0000), p(1000|0111), p(0110|1012), p(0001|0110), p(1011|0001),
    p(1101|0102), p(1110|1101) is classically (and quantumly) at most 1."""
    scen = Scenario((2, 2, 2, 3), (2, 2, 2, 2))
    terms = [
        ("0000", "0000"),
        ("1000", "0111"),
        ("0110", "1012"),
        ("0001", "0110"),
        ("1011", "0001"),
        ("1101", "0102"),
        ("1110", "1101"),
    ]
    coeffs = {}
    for a_str, x_str in terms:
        aa = tuple(int(c) for c in a_str)
        xs = tuple(int(c) for c in x_str)
        coeffs[(scen.encode_input(xs), scen.encode_outcome(aa))] = Fraction(1)
    return BellExpression(
        scen, coeffs, classical_bound=Fraction(1), label="four-partite-tight"
    )
