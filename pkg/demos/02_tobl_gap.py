"""Time-ordered bilocal correlations beat the quantum bound.

TOBL boxes look classical across every bipartition (each two-party group
simulates its half with one-way signaling in either time order), so no
bipartite information principle can rule them out.  Yet the sum form of the
three-party guessing inequality reaches 7/6 over TOBL, strictly between the
classical/quantum bound 1 and the no-signaling bound 4/3.
"""

import gynibell as gb
from gynibell import gyni

expr = gyni.gyni_sum_expression(3)

classical = gb.classical_max(expr).value
ns = gb.ns_max(expr).value
tobl = gb.tobl_max(expr)

print(f"classical / quantum bound : {classical}")
print(f"TOBL maximum              : {tobl.value}")
print(f"no-signaling maximum      : {ns}")

print("\nthe optimizer returns an explicit shared-weight model;")
for bip, triples in sorted(tobl.model.items()):
    lone, pair = bip
    print(f"  bipartition {lone}|{pair}: {len(triples)} weighted one-way triples")

print("\npostselecting any party collapses a TOBL box to a local one:")
reduced = gb.postselect(tobl.box, 2, 0, 0)
membership = gb.local_membership(reduced)
print(f"  bipartite box after postselecting party 3: local = {membership.is_local}, "
      f"{len(membership.weights)} deterministic strategies in the mixture")
