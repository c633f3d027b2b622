"""A bound-entangled state and the witness that measures a super-quantum box.

The normalized projector onto the complement of the Shifts span is PPT
across every bipartition yet entangled; the witness (Pi - eps)/(4 - 8 eps)
detects it.  Measured along the set's own local bases, the witness produces
a no-signaling box whose guessing-inequality value is (1-eps)/(1-2 eps) > 1,
strictly beyond anything quantum states allow.
"""

import numpy as np

import gynibell as gb
from gynibell import upb

sh = upb.shifts()
pi = gb.projector_onto_span(sh)

eps = gb.epsilon_min(pi, starts=200, seed=0)
print(f"smallest product-state overlap eps = {eps:.9f}  (0 < eps < 1/2)")

report = gb.witness_and_state(sh, eps)
print(f"tr(W rho) = {report.trace_W_rho:.9f}  (< 0: entanglement detected)")
print(f"rho is PPT across all bipartitions: {gb.is_ppt(report.state)}")
print(f"rho eigenvalue floor: {np.linalg.eigvalsh(report.state.matrix)[0]:+.2e}")

beta = (1 - eps) / (1 - 2 * eps)
print(f"\nmeasured box value on the guessing inequality: {report.bell_value:.9f}")
print(f"closed form (1-eps)/(1-2 eps)               : {beta:.9f}")

box = gb.measure_operator(report.witness, sh)
print(f"measured box is no-signaling: {gb.is_nonsignaling(box).is_nonsignaling}")

print("\nany actual quantum state stays within the bound:")
rng = np.random.default_rng(1)
a = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
rho = a @ a.conj().T
rho /= np.trace(rho).real
state_box = gb.measure_operator(gb.HermitianOp((2, 2, 2), rho), sh)
print(f"  random density matrix gives {gb.bell_value(gb.bell_from_set(sh), state_box):.6f} <= 1")
