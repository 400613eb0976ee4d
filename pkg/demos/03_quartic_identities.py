"""Quartic CM fields: factor Z(K, s) into zeta functions of reflex fields.

Shows the three Galois cases, and what happens when the declared case is wrong.

    python3 demos/03_quartic_identities.py
"""
from __future__ import annotations

from weilzeta import errors
from weilzeta.analysis import verify_g2_identity, verify_height_zeta
from weilzeta.cmfield import preset_field

N = 2000
z5, z12 = preset_field("zeta5"), preset_field("zeta12")
d4, d4_reflex = preset_field("quartic_d4"), preset_field("quartic_d4_reflex")
c4 = preset_field("quartic_c4_16")

print(verify_g2_identity(z5, "C4", [z5], N, twist_disc=5).summary())
print(verify_g2_identity(z12, "Klein", [-4, -3], N).summary())
print(verify_g2_identity(d4, "D4", [d4_reflex], N, twist_disc=28).summary())

# x^4 + 4x^2 + 2 has inert primes and no prime with exactly three places,
# which rules out the dihedral case.
try:
    verify_g2_identity(c4, "D4", [c4], N, twist_disc=8)
except errors.CaseMismatch as exc:
    print("declared D4:", exc)
print(verify_g2_identity(c4, "C4", [c4], N, twist_disc=8).summary())

# For the dihedral field the ideal series overcounts Weil numbers: some ideals
# a with a conj(a) = (n) have no generator alpha with alpha conj(alpha) = n.
print(verify_height_zeta(d4, 500, source="ideals").summary().splitlines()[0])
print(verify_height_zeta(d4, 500, source="weil").summary())
