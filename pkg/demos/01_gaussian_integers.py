"""A walk through Q(i): Weil numbers, ideal counts, and the circle constant.

    python3 demos/01_gaussian_integers.py
"""
from __future__ import annotations

import math

from weilzeta.analysis import fit_asymptotic, verify_weil_ideal_bridge
from weilzeta.cmfield import load_preset, preset_field
from weilzeta.dirichlet import euler_factor_Z, z_coeffs
from weilzeta.weilenum import count_table, enumerate_weil, reduced_representatives

field = preset_field("gauss")
print(f"{field.name}: g={field.g}, w_K={field.w_K}, Q1 = {field.quadrics[0]}")

# Weil numbers of norm 5 are the eight Gaussian integers a+bi with a^2+b^2 = 5.
five = enumerate_weil(field, 5)
print("norm 5:", [w.coords for w in five])
print("up to sign:", [w.coords for w in reduced_representatives(field, 5)])

# Local factors come from how p splits: 5 = (2+i)(2-i), 3 stays prime, 2 ramifies.
for p in (5, 3, 2):
    e = euler_factor_Z(field, p)
    print(f"Z_{p}(t) = {list(e.numerator)} / {list(e.denominator)}")

b = z_coeffs(field, 20)
print("b(1..20):", [int(b[n]) for n in range(1, 21)])

# Every ideal of Z[i] is principal with four generators, so a(n) = 4 b(n).
rep = verify_weil_ideal_bridge(field, 2000, load_preset("gauss").meta)
print(rep.summary())

# N(x) counts lattice points in a disc of radius sqrt(x): N(x)/x tends to pi.
table = count_table(field, 10**6, 10**4)
fit = fit_asymptotic(table, rho=1)
print(f"N(10^6)/10^6 = {fit.c_estimate:.5f} (pi = {math.pi:.5f}), last-decade spread {fit.stability:.2e}")
