"""Response functions, pathway bookkeeping and phase matching.

Shows the sequential response construction, the expansion into left/right
raising/lowering pathway terms, and the sign-pattern (Fourier component)
partition of the full response.
"""

import itertools

import numpy as np

from excitonspec import (
    DephasingModel,
    DimerParams,
    build_dimer,
    eigenstate,
    enumerate_pathways,
    pathway_contribution,
    response_function,
    select_phase_matched,
)

model = build_dimer(DimerParams(10.0, 9.0, 0.5, 1.0, 0.8))
noise = DephasingModel.uniform(4, 0.1)
ground = eigenstate(model, "g")
delays = (0.7, 0.45, 0.6)

print("Third-order response of the dimer at delays", delays)
full = response_function(3, delays, model, noise, ground)
print(f"  full S3 = {full:.6f}")

print("\nSign-pattern decomposition (k_s = s1*k1 + s2*k2 + s3*k3):")
total = 0.0
for pattern in itertools.product((1, -1), repeat=3):
    value = select_phase_matched(3, pattern, delays, model, noise, ground)
    total += value
    tag = "".join("+" if s > 0 else "-" for s in pattern)
    note = "  <- rephasing" if pattern == (-1, 1, 1) else ""
    print(f"  ({tag})  {value: .6f}{note}")
print(f"  sum over patterns     = {total:.6f}")
print(f"  |sum - full response| = {abs(total - full):.2e}")

print("\nPathway terms at third order:")
terms = enumerate_pathways(3)
print(f"  {len(terms)} terms total, {len({t.sides for t in terms})} side sequences")
nonzero = [
    t for t in terms
    if t.phase_signature == (-1, 1, 1)
    and pathway_contribution(t, delays, model, noise, ground) != 0
]
print(f"  rephasing terms that survive from the ground state: {len(nonzero)}")
for t in nonzero:
    comps = "".join("+" if c > 0 else "-" for c in t.components)
    value = pathway_contribution(t, delays, model, noise, ground)
    print(f"    sides={''.join(t.sides)} components={comps} sign={t.sign:+d}  value={value:.6f}")

print("\nParity selection: even orders vanish for classical inputs.")
for order, d in [(1, (0.8,)), (2, (0.8, 0.5)), (3, delays)]:
    value = response_function(order, d, model, noise, ground)
    print(f"  |S{order}| = {abs(value):.6f}")
