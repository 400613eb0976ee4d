"""Estimate rho_K for the shipped quartic and quadratic fields by averaging
theta(Frob_p) over primes, and compare with the Galois-theoretic value.

    python3 demos/02_rho_by_chebotarev.py
"""
from __future__ import annotations

import time

from weilzeta.analysis import rho_estimate
from weilzeta.cmfield import load_preset, preset_field

NAMES = ["gauss", "eisenstein", "zeta5", "zeta8", "zeta12", "quartic_c4_16", "quartic_d4"]

print(f"{'field':15} {'Galois':7} {'expected':>8} {'10^4':>8} {'10^5':>8} {'rounded':>8}")
for name in NAMES:
    meta = load_preset(name).meta
    field = preset_field(name)
    t0 = time.perf_counter()
    small, big = rho_estimate(field, 10**4), rho_estimate(field, 10**5)
    print(f"{name:15} {meta['galois']:7} {meta['rho']:>8} {float(small.mean):8.4f} "
          f"{float(big.mean):8.4f} {big.rounded:>8}   ({time.perf_counter() - t0:.1f}s)")
