"""Guess-your-neighbour's-input: classical, quantum and no-signaling bounds.

N players sit on a ring; each receives a private bit drawn from a promise
distribution and must output its right-hand neighbour's bit.  Everyone has
to be right at once.  Classical players can only bet on one input string
and its complement, quantum resources provably add nothing, yet
no-signaling boxes beat both whenever the promise correlates the inputs.
"""

import gynibell as gb
from gynibell import gyni

game = gyni.gyni_expression(3)
print("three players, parity promise:")
for xs, aa, c in game.expression.terms():
    print(f"  q={c}  inputs {xs} -> required outputs {aa}")

classical = gb.classical_max(game.expression)
print(f"\nclassical maximum (vertex enumeration): {classical.value}")
print(f"closed-form bound max q(x)+q(~x):        {game.expression.classical_bound}")
print(f"quantum bound equals classical one (orthogonality certificate): "
      f"{gyni.orthogonality_certificate(game.expression)}")

ns = gb.ns_max(game.expression)
print(f"\nno-signaling maximum (exact LP):         {ns.value}")
print("optimal box hits every winning term with probability "
      f"{ns.box.value(*next(iter(game.expression.coeffs)))}")

print("\nratios omega_ns / omega_c for larger rings:")
for n in (3, 4, 5):
    g = gyni.gyni_expression(n)
    value = gb.ns_max(g.expression).value
    ratio = value / g.expression.classical_bound
    print(f"  N={n}:  omega_ns={value}   ratio={ratio}")

print("\nuniform promise kills the advantage:")
for n in (3, 4):
    g = gyni.gyni_expression(n, gyni.uniform_promise(n))
    print(f"  N={n}: omega_ns = {gb.ns_max(g.expression).value} "
          f"= omega_c = {g.expression.classical_bound}")
