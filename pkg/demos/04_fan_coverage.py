"""Cones spanned by a sign vector and g-1 of its neighbours.

For g <= 3 they cover R^g; from g = 4 on they leave gaps.  The demo finds an
explicit uncovered direction.

    python3 demos/04_fan_coverage.py
"""
from __future__ import annotations

from weilzeta.cmfield import build_fan, cone_determinant, uncovered_samples

for g in range(1, 7):
    fan = build_fan(g, verify=False)
    unimodular = all(abs(cone_determinant(fan, c)) == 1 for c in fan.max_cones)
    missed = uncovered_samples(fan, 10_000)
    print(f"g={g}: {len(fan.rays):3} rays, {len(fan.max_cones):4} cones, "
          f"unimodular={unimodular}, uncovered {len(missed):5}/10000")
    if len(missed):
        print(f"       e.g. {tuple(int(v) for v in missed[0])}")
