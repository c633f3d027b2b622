import numpy as np
import pytest

import gynibell as gb
from gynibell import upb
from gynibell.upb import basis_ket
from gynibell.witness import HermitianOp


@pytest.fixture(scope="module")
def shifts_set():
    return upb.shifts()


@pytest.fixture(scope="module")
def shifts_pi(shifts_set):
    return gb.projector_onto_span(shifts_set)


@pytest.fixture(scope="module")
def shifts_eps(shifts_pi):
    return gb.epsilon_min(shifts_pi, starts=200, seed=0)


@pytest.fixture(scope="module")
def shifts_report(shifts_set, shifts_eps):
    return gb.witness_and_state(shifts_set, shifts_eps)


# ---------------------------------------------------------------------------
# projectors


def test_projector_single_vector():
    z = basis_ket(2, 0)
    pvs = upb.build_local_subsets([(z, z, z)], (2, 2, 2))
    pi = gb.projector_onto_span(pvs)
    assert abs(np.trace(pi.matrix) - 1) < 1e-12
    assert np.allclose(pi.matrix @ pi.matrix, pi.matrix, atol=1e-12)


def test_projector_shifts_idempotent(shifts_pi):
    assert abs(np.trace(shifts_pi.matrix) - 4) < 1e-8
    assert np.max(np.abs(shifts_pi.matrix @ shifts_pi.matrix - shifts_pi.matrix)) < 1e-8


def test_projector_full_basis_is_identity():
    z0, z1 = basis_ket(2, 0), basis_ket(2, 1)
    pvs = upb.build_local_subsets(
        [(z0, z0), (z0, z1), (z1, z0), (z1, z1)], (2, 2)
    )
    pi = gb.projector_onto_span(pvs)
    assert np.allclose(pi.matrix, np.eye(4), atol=1e-12)


def test_projector_rejects_non_orthogonal():
    z = basis_ket(2, 0)
    e, _ = upb.hadamard_pair()
    pvs = upb.build_local_subsets([(z, z)], (2, 2))
    bad = upb.ProductVectorSet(
        (2, 2),
        ((z, z), (e, z)),
        pvs.local_sets,
        pvs.local_subsets,
        ((0, 0), (0, 0)),
    )
    with pytest.raises(ValueError):
        gb.projector_onto_span(bad)


# ---------------------------------------------------------------------------
# see-saw minimum


def test_epsilon_identity_operator():
    op = HermitianOp((2, 2), np.eye(4, dtype=complex))
    assert abs(gb.epsilon_min(op, starts=5, seed=1) - 1.0) < 1e-9


def test_epsilon_rank_one_projector():
    z = basis_ket(2, 0)
    pvs = upb.build_local_subsets([(z, z, z)], (2, 2, 2))
    pi = gb.projector_onto_span(pvs)
    assert gb.epsilon_min(pi, starts=20, seed=1) < 1e-10


def test_epsilon_shifts_in_open_interval(shifts_eps):
    assert 0 < shifts_eps < 0.5


def test_epsilon_upper_bounds_random_product_states(shifts_pi, shifts_eps):
    rng = np.random.default_rng(999)
    mat = shifts_pi.matrix
    for _ in range(1000):
        state = []
        for d in shifts_pi.dims:
            v = rng.normal(size=d) + 1j * rng.normal(size=d)
            state.append(v / np.linalg.norm(v))
        full = np.array([1.0 + 0j])
        for v in state:
            full = np.kron(full, v)
        assert shifts_eps <= np.real(np.vdot(full, mat @ full)) + 1e-9


def test_epsilon_deterministic(shifts_pi, shifts_eps):
    again = gb.epsilon_min(shifts_pi, starts=200, seed=0)
    assert again == shifts_eps
    threaded = gb.epsilon_min(shifts_pi, starts=200, seed=0, threads=4)
    assert threaded == shifts_eps


# ---------------------------------------------------------------------------
# witness and state


def test_witness_report_identities(shifts_report, shifts_eps):
    eps = shifts_eps
    # tr(W rho) = -eps / (|S| - eps dim); the unnormalized complement form
    # (dim - |S|) tr(W rho) equals -eps/(1 - 2 eps) for the 4-of-8 case
    assert abs(shifts_report.trace_W_rho - (-eps / (4 - 8 * eps))) < 1e-9
    assert shifts_report.trace_W_rho < 0
    assert abs(4 * shifts_report.trace_W_rho - (-eps / (1 - 2 * eps))) < 1e-6
    beta = (1 - eps) / (1 - 2 * eps)
    assert abs(shifts_report.bell_value - beta) < 1e-6
    assert shifts_report.bell_value > 1 + 1e-6


def test_state_is_unit_trace_psd_and_kills_span(shifts_report, shifts_set):
    rho = shifts_report.state.matrix
    assert abs(np.trace(rho) - 1) < 1e-9
    assert np.linalg.eigvalsh(rho)[0] > -1e-9
    for m in range(len(shifts_set)):
        psi = shifts_set.full_vector(m)
        assert abs(np.vdot(psi, rho @ psi)) < 1e-9


def test_witness_eps_range_validated(shifts_set):
    with pytest.raises(ValueError):
        gb.witness_and_state(shifts_set, 0.0)
    with pytest.raises(ValueError):
        gb.witness_and_state(shifts_set, 0.6)


# ---------------------------------------------------------------------------
# partial transpose / PPT


def test_partial_transpose_involution(shifts_report):
    w = shifts_report.witness
    assert np.allclose(
        gb.partial_transpose(gb.partial_transpose(w, [1]), [1]).matrix, w.matrix
    )


def test_shifts_state_is_ppt(shifts_report):
    assert gb.is_ppt(shifts_report.state)


def test_maximally_entangled_projector_not_ppt():
    psi = np.zeros(4, dtype=complex)
    psi[0] = psi[3] = 1 / np.sqrt(2)
    op = HermitianOp((2, 2), np.outer(psi, psi.conj()))
    assert not gb.is_ppt(op)
    pt = gb.partial_transpose(op, [1])
    assert abs(np.linalg.eigvalsh(pt.matrix)[0] + 0.5) < 1e-12


# ---------------------------------------------------------------------------
# measurement boxes


def test_measured_witness_box_ns_and_normalized(shifts_report, shifts_set):
    box = gb.measure_operator(shifts_report.witness, shifts_set)
    box.validate()
    assert gb.is_nonsignaling(box).is_nonsignaling


def test_measured_density_matrix_respects_quantum_bound(shifts_set):
    rng = np.random.default_rng(4)
    d = 8
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = a @ a.conj().T
    rho /= np.trace(rho).real
    op = HermitianOp((2, 2, 2), rho)
    box = gb.measure_operator(op, shifts_set)
    e = gb.bell_from_set(shifts_set)
    assert gb.bell_value(e, box) <= 1 + 1e-9


def test_witness_is_non_psd_unit_trace_yet_measures_to_valid_box(shifts_report):
    # the witness is a genuinely non-positive unit-trace Hermitian, so its
    # measured box exercising normalization and no-signaling is not a
    # density-matrix special case
    w = shifts_report.witness.matrix
    assert abs(np.trace(w).real - 1) < 1e-9
    assert np.linalg.eigvalsh(w)[0] < -1e-6
    arr = gb.measure_operator(shifts_report.witness, upb.shifts()).as_array()
    assert np.allclose(arr.sum(axis=1), 1.0, atol=1e-9)


def test_wupb_witness_value_formula():
    w = upb.wupb_example()
    pi = gb.projector_onto_span(w)
    eps = gb.epsilon_min_restricted(pi, w)
    assert 0 < eps < 0.5
    report = gb.witness_and_state(w, eps)
    expect = 6 * (1 - eps) / (6 - 12 * eps)
    assert abs(report.bell_value - expect) < 1e-6
    assert report.bell_value > 1
    assert gb.is_ppt(report.state)
