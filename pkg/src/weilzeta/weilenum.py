"""Lattice enumeration of Weil numbers, reduced representatives and heights.

Two independent engines live here:

* :func:`enumerate_weil` walks the exact level set ``x^T G x = 2 g n`` of the
  positive definite trace form with a Fincke-Pohst recursion and filters the
  result through the quadrics.  It is used for single values of ``n``.
* :func:`weil_points_upto` lists every Weil number of norm at most ``X`` in one
  sweep.  For ``g = 1`` it scans rows of the ellipse; for ``g = 2`` it solves
  ``Q_2 = 0`` as a hyperbola ``Y * Z = M`` over the last two coordinates.
  Bulk counting (count tables, bridges, heights) goes through this path.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence

import numpy as np

from . import errors
from .cmfield import CMField, _mat_inverse
from .exactmath import divisors_from_factorization, factor_with_spf, factorint, smallest_prime_factors

SPF_LIMIT = 50_000_000
_INT64_SAFE = 2**62


@dataclass(frozen=True)
class WeilNumber:
    coords: tuple
    n: int


@dataclass
class CountTable:
    grid: list
    counts: list
    heights_counts: Optional[list] = None


# ---------------------------------------------------------------------------
# Integer views of the quadrics and the Gram form
# ---------------------------------------------------------------------------

def _scaled_forms(field: CMField):
    """Integer upper-triangular matrices U_i and denominators D_i of each Q_i."""
    return [q.scaled_upper() for q in field.quadrics]


def _gram_int(field: CMField) -> tuple[list[list[int]], int]:
    den = math.lcm(*(c.denominator for row in field.gram for c in row))
    return [[int(c * den) for c in row] for row in field.gram], den


def _eval_upper_np(u: np.ndarray, pts: np.ndarray) -> np.ndarray:
    out = np.zeros(len(pts), dtype=np.int64)
    d = u.shape[0]
    for j in range(d):
        for k in range(j, d):
            if u[j, k]:
                out += int(u[j, k]) * pts[:, j] * pts[:, k]
    return out


def _check_points(field: CMField, pts: np.ndarray, x_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Keep rows that are Weil numbers with 1 <= n <= x_max; return (pts, n)."""
    if len(pts) == 0:
        return pts.reshape(0, field.degree), np.zeros(0, dtype=np.int64)
    forms = _scaled_forms(field)
    keep = np.ones(len(pts), dtype=bool)
    for u, _ in forms[1:]:
        keep &= _eval_upper_np(u, pts) == 0
    u1, d1 = forms[0]
    v = _eval_upper_np(u1, pts)
    keep &= (v % d1 == 0) & (v >= d1) & (v <= d1 * x_max)
    return pts[keep], v[keep] // d1


# ---------------------------------------------------------------------------
# Fincke-Pohst
# ---------------------------------------------------------------------------

def _fp_decomposition(gram: list[list[Fraction]]):
    """q with x^T G x = sum_i q[i][i] * (x_i + sum_{j>i} q[i][j] x_j)^2 (floats)."""
    n = len(gram)
    a = [[float(c) for c in row] for row in gram]
    q = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            q[i][j] = a[i][j]
    for i in range(n):
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                q[k][l] -= q[k][i] * q[i][l]
    return q


def _expand_ranges(lo: np.ndarray, hi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Flatten the integer ranges [lo_k, hi_k]: return (owner index k, value)."""
    cnt = np.maximum(hi - lo + 1, 0)
    owner = np.repeat(np.arange(len(lo)), cnt)
    offs = np.arange(int(cnt.sum())) - np.repeat(np.cumsum(cnt) - cnt, cnt)
    return owner, np.repeat(lo, cnt) + offs


def _fincke_pohst(gram: list[list[Fraction]], bound: float, exact_level: Optional[int] = None,
                  batch: int = 1 << 14) -> Iterator[np.ndarray]:
    """Yield blocks of integer vectors containing every x with x^T G x <= bound.

    With ``exact_level`` set only candidates for the level set x^T G x = bound
    are produced.  Float bounds are widened by one unit per coordinate and
    branches are pruned with a small tolerance; callers apply an exact final
    filter.  Coordinates 2..d-1 are walked recursively; the two innermost
    coordinates are expanded with numpy over batches of tails.
    """
    d = len(gram)
    q = np.array(_fp_decomposition(gram))
    tol = 1e-7 * (1.0 + bound)
    x = [0] * d
    tails: list[list[int]] = []
    rems: list[float] = []

    def flush() -> np.ndarray:
        tail = np.array(tails, dtype=np.int64).reshape(len(tails), max(d - 2, 0))
        rem = np.array(rems)
        tails.clear()
        rems.clear()
        if d >= 2:
            c1 = -(tail @ q[1, 2:])
            s1 = np.sqrt(np.maximum(rem, 0.0) / q[1, 1])
            own, x1 = _expand_ranges(np.ceil(c1 - s1).astype(np.int64) - 1,
                                     np.floor(c1 + s1).astype(np.int64) + 1)
            t1 = rem[own] - q[1, 1] * (x1 - c1[own]) ** 2
            ok = t1 >= -tol
            own, x1, t1 = own[ok], x1[ok], t1[ok]
            c0 = -(q[0, 1] * x1 + tail[own] @ q[0, 2:])
        else:
            own = np.zeros(1, dtype=np.int64)
            x1 = np.zeros(1, dtype=np.int64)
            t1, c0 = rem, np.zeros(1)
        s0 = np.sqrt(np.maximum(t1, 0.0) / q[0, 0])
        if exact_level is not None:
            base = np.concatenate([np.rint(c0 - s0), np.rint(c0 + s0)]).astype(np.int64)
            x0 = np.concatenate([base - 1, base, base + 1])
            sel = np.tile(np.arange(len(x1)), 6)
        else:
            sel, x0 = _expand_ranges(np.ceil(c0 - s0).astype(np.int64) - 1,
                                     np.floor(c0 + s0).astype(np.int64) + 1)
        out = np.empty((len(x0), d), dtype=np.int64)
        out[:, 0] = x0
        if d >= 2:
            out[:, 1] = x1[sel]
            out[:, 2:] = tail[own[sel]]
        return out

    def rec(i: int, remaining: float):
        if i <= 1:
            tails.append(x[2:])
            rems.append(remaining)
            return
        c = -sum(q[i, j] * x[j] for j in range(i + 1, d))
        s = math.sqrt(max(remaining, 0.0) / q[i, i])
        for v in range(math.ceil(c - s) - 1, math.floor(c + s) + 2):
            t = remaining - q[i, i] * (v - c) ** 2
            if t < -tol:
                continue
            x[i] = v
            rec(i - 1, t)
        x[i] = 0

    # walk the outermost coordinate here so batches can be flushed between values
    if d <= 2:
        tails.append([])
        rems.append(float(bound))
        yield flush()
        return
    s = math.sqrt(float(bound) / q[d - 1, d - 1])
    for v in range(math.ceil(-s) - 1, math.floor(s) + 2):
        t = float(bound) - q[d - 1, d - 1] * v * v
        if t < -tol:
            continue
        x[d - 1] = v
        rec(d - 2, t)
        if len(tails) >= batch:
            yield flush()
    x[d - 1] = 0
    if tails:
        yield flush()


def _eval_sym_np(m: list[list[int]], pts: np.ndarray) -> np.ndarray:
    out = np.zeros(len(pts), dtype=np.int64)
    d = len(m)
    for i in range(d):
        for j in range(d):
            if m[i][j]:
                out += m[i][j] * pts[:, i] * pts[:, j]
    return out


def lattice_points_in_ellipsoid(field: CMField, bound: int) -> list[tuple]:
    """Exact list of x with x^T G x <= bound."""
    g_int, den = _gram_int(field)
    out = set()
    for block in _fincke_pohst([list(r) for r in field.gram], bound):
        keep = _eval_sym_np(g_int, block) <= bound * den
        out.update(map(tuple, block[keep].tolist()))
    return sorted(out)


# ---------------------------------------------------------------------------
# Single-norm enumeration
# ---------------------------------------------------------------------------

def enumerate_weil(field: CMField, n: int) -> list[WeilNumber]:
    """All alpha in O_K with alpha * conj(alpha) = n, in lexicographic order."""
    if n < 1:
        raise ValueError("n must be >= 1")
    level = 2 * field.g * n
    g_int, den = _gram_int(field)
    found = set()
    for block in _fincke_pohst([list(r) for r in field.gram], level, exact_level=level):
        block = block[_eval_sym_np(g_int, block) == level * den]
        pts, norms = _check_points(field, block, n)
        found.update(map(tuple, pts[norms == n].tolist()))
    return [WeilNumber(c, n) for c in sorted(found)]


def a_count(field: CMField, n: int) -> int:
    return len(enumerate_weil(field, n))


# ---------------------------------------------------------------------------
# Bulk enumeration up to a norm bound
# ---------------------------------------------------------------------------

def _projected_form(ginv: list[list[Fraction]], idx: Sequence[int]) -> np.ndarray:
    """Form H with {x : x^T G x <= R} projecting onto coordinates idx as y^T H y <= R."""
    sub = [[ginv[i][j] for j in idx] for i in idx]
    inv = _mat_inverse(sub)
    return np.array([[float(c) for c in row] for row in inv])


def _interval(a: float, b: float, c: float) -> tuple[int, int]:
    """Integer interval (widened by one) containing real t with a t^2 + 2 b t + c <= 0."""
    disc = b * b - a * c
    if disc < 0:
        disc = 0.0
        # still emit the widened neighbourhood of the vertex; exact filters prune it
    s = math.sqrt(disc)
    return math.ceil((-b - s) / a) - 1, math.floor((-b + s) / a) + 1


def _rows_g1(field: CMField, x_max: int) -> Iterator[np.ndarray]:
    bound = 2 * x_max
    ginv = _mat_inverse([list(r) for r in field.gram])
    gf = np.array([[float(c) for c in row] for row in field.gram])
    s2 = math.sqrt(bound * float(ginv[1][1]))
    lo2, hi2 = math.floor(-s2) - 1, math.ceil(s2) + 1
    chunk = []
    size = 0
    for x2 in range(lo2, hi2 + 1):
        a, b, c = gf[0, 0], gf[0, 1] * x2, gf[1, 1] * x2 * x2 - bound
        lo1, hi1 = _interval(a, b, c)
        if hi1 < lo1:
            continue
        x1 = np.arange(lo1, hi1 + 1, dtype=np.int64)
        chunk.append(np.column_stack([x1, np.full_like(x1, x2)]))
        size += len(x1)
        if size > 1 << 20:
            yield np.concatenate(chunk)
            chunk, size = [], 0
    if chunk:
        yield np.concatenate(chunk)


@dataclass
class _Hyperbola:
    a12: int
    a22: int
    c13: int
    c14: int
    c23: int
    c24: int
    c33: int
    c34: int
    c44: int


def _hyperbola_data(field: CMField) -> Optional[_Hyperbola]:
    u, _ = field.quadrics[1].scaled_upper()
    if u[0, 0] != 0 or u[0, 1] == 0:
        return None
    return _Hyperbola(*(int(u[i, j]) for i, j in
                        ((0, 1), (1, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3))))


def _signed_divisors(m: int, spf: Optional[np.ndarray]) -> list[int]:
    m = abs(m)
    fac = factor_with_spf(m, spf) if spf is not None and m < len(spf) else factorint(m)
    divs = divisors_from_factorization(fac)
    return divs + [-d for d in divs]


def _rows_g2(field: CMField, x_max: int) -> Iterator[np.ndarray]:
    h = _hyperbola_data(field)
    if h is None:
        yield from _rows_generic(field, x_max)
        return
    bound = 4 * x_max
    ginv = _mat_inverse([list(r) for r in field.gram])
    h34 = _projected_form(ginv, (2, 3))
    h234 = _projected_form(ginv, (1, 2, 3))
    gf = np.array([[float(c) for c in row] for row in field.gram])

    # all (x3, x4) pairs in the projected ellipse
    s4 = math.sqrt(bound * float(ginv[3][3]))
    pairs = []
    for x4 in range(math.floor(-s4) - 1, math.ceil(s4) + 2):
        lo3, hi3 = _interval(h34[0, 0], h34[0, 1] * x4, h34[1, 1] * x4 * x4 - bound)
        pairs.extend((x3, x4) for x3 in range(lo3, hi3 + 1))
    if not pairs:
        return
    pr = np.array(pairs, dtype=np.int64)
    x3s, x4s = pr[:, 0], pr[:, 1]
    l1 = h.c13 * x3s + h.c14 * x4s
    l2 = h.c23 * x3s + h.c24 * x4s
    qv = h.c33 * x3s * x3s + h.c34 * x3s * x4s + h.c44 * x4s * x4s
    mv = h.a12 * l1 * l2 - h.a22 * l1 * l1 - h.a12 * h.a12 * qv
    mmax = int(np.abs(mv).max())
    spf = smallest_prime_factors(mmax) if 1 < mmax <= SPF_LIMIT else None
    a12, a22 = h.a12, h.a22
    a12sq = a12 * a12

    out: list[tuple] = []
    for x3, x4, L1, L2, M in zip(x3s.tolist(), x4s.tolist(), l1.tolist(), l2.tolist(), mv.tolist()):
        # x2 range from the 3-dim projection, then Y = a12 x2 + l1
        b = h234[0, 1] * x3 + h234[0, 2] * x4
        c = (h234[1, 1] * x3 * x3 + 2 * h234[1, 2] * x3 * x4 + h234[2, 2] * x4 * x4) - bound
        lo2, hi2 = _interval(h234[0, 0], b, c)
        if hi2 < lo2:
            continue
        ylo, yhi = sorted((a12 * lo2 + L1, a12 * hi2 + L1))
        if M != 0:
            for y in _signed_divisors(M, spf):
                if y < ylo or y > yhi or (y - L1) % a12:
                    continue
                z = M // y
                num = z - a22 * y + 2 * a22 * L1 - a12 * L2
                if num % a12sq:
                    continue
                out.append((num // a12sq, (y - L1) // a12, x3, x4))
        else:
            found = set()
            if L1 % a12 == 0:  # Y = 0: x2 fixed, x1 free
                x2 = -L1 // a12
                bb = gf[0, 1] * x2 + gf[0, 2] * x3 + gf[0, 3] * x4
                rest = np.array([x2, x3, x4], dtype=float)
                cc = float(rest @ gf[1:, 1:] @ rest) - bound
                lo1, hi1 = _interval(gf[0, 0], bb, cc)
                found.update((x1, x2, x3, x4) for x1 in range(lo1, hi1 + 1))
            for x2 in range(lo2, hi2 + 1):  # Z = 0: x1 determined by x2
                y = a12 * x2 + L1
                num = -a22 * y + 2 * a22 * L1 - a12 * L2
                if num % a12sq == 0:
                    found.add((num // a12sq, x2, x3, x4))
            out.extend(found)
        if len(out) > 1 << 20:
            yield np.array(out, dtype=np.int64)
            out = []
    if out:
        yield np.array(out, dtype=np.int64)


def _rows_generic(field: CMField, x_max: int) -> Iterator[np.ndarray]:
    yield from _fincke_pohst([list(r) for r in field.gram], 2 * field.g * x_max)


def _row_blocks(field: CMField, x_max: int, method: str = "auto") -> Iterator[np.ndarray]:
    if method == "generic":
        return _rows_generic(field, x_max)
    if field.g == 1:
        return _rows_g1(field, x_max)
    if field.g == 2:
        return _rows_g2(field, x_max)
    return _rows_generic(field, x_max)


def weil_blocks(field: CMField, x_max: int, method: str = "auto") -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Blocks (coords, norms) covering every Weil number with norm <= x_max."""
    _guard_int64(field, x_max)
    for block in _row_blocks(field, x_max, method):
        pts, n = _check_points(field, block, x_max)
        if len(pts):
            yield pts, n


def weil_points_upto(field: CMField, x_max: int, method: str = "auto") -> tuple[np.ndarray, np.ndarray]:
    """All Weil numbers with norm <= x_max, sorted by (norm, coordinates)."""
    blocks = list(weil_blocks(field, x_max, method))
    if not blocks:
        return np.zeros((0, field.degree), dtype=np.int64), np.zeros(0, dtype=np.int64)
    pts = np.concatenate([b[0] for b in blocks])
    n = np.concatenate([b[1] for b in blocks])
    order = np.lexsort(tuple(pts[:, k] for k in reversed(range(pts.shape[1]))) + (n,))
    pts, n = pts[order], n[order]
    # the g = 2 Y = 0 / Z = 0 branches are deduplicated per pair; be safe globally
    if len(pts) > 1:
        dup = np.zeros(len(pts), dtype=bool)
        dup[1:] = (pts[1:] == pts[:-1]).all(axis=1)
        pts, n = pts[~dup], n[~dup]
    return pts, n


def _guard_int64(field: CMField, x_max: int):
    forms = _scaled_forms(field)
    biggest = max(int(np.abs(u).sum()) for u, _ in forms)
    g_int, den = _gram_int(field)
    box = 2 * field.g * x_max * den / min_eigenvalue(field)
    if biggest * box > _INT64_SAFE:
        raise OverflowError(f"x_max={x_max} too large for 64-bit quadric evaluation")


def min_eigenvalue(field: CMField) -> float:
    g = np.array([[float(c) for c in row] for row in field.gram])
    return float(np.linalg.eigvalsh(g)[0])


def norm_histogram(field: CMField, x_max: int, method: str = "auto") -> np.ndarray:
    """hist[n] = a_K(n) for 0 <= n <= x_max (hist[0] = 0)."""
    hist = np.zeros(x_max + 1, dtype=np.int64)
    for _, n in weil_blocks(field, x_max, method):
        hist += np.bincount(n, minlength=x_max + 1)
    return hist


# ---------------------------------------------------------------------------
# Naive oracle
# ---------------------------------------------------------------------------

def box_radius(field: CMField, n_max: int) -> int:
    """|x_i| bound implied by x^T G x = 2 g n <= 2 g n_max and G >= lambda_min."""
    lam = min_eigenvalue(field) * (1 - 1e-9)
    return math.floor(math.sqrt(2 * field.g * n_max / lam)) + 1


def naive_box_search(field: CMField, n_max: int, chunk: int = 1 << 21) -> dict[int, list[tuple]]:
    """Weil numbers with norm <= n_max found by testing every point of a cube."""
    r = box_radius(field, n_max)
    d = field.degree
    side = np.arange(-r, r + 1, dtype=np.int64)
    width = len(side)
    total = width**d
    found: dict[int, list[tuple]] = {}
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        pts = np.empty((len(idx), d), dtype=np.int64)
        for k in range(d - 1, -1, -1):
            pts[:, k] = side[idx % width]
            idx //= width
        pts, n = _check_points(field, pts, n_max)
        for x, m in zip(pts.tolist(), n.tolist()):
            found.setdefault(m, []).append(tuple(x))
    return {m: sorted(v) for m, v in sorted(found.items())}


# ---------------------------------------------------------------------------
# Reduced representatives and heights
# ---------------------------------------------------------------------------

def _sign_normal(x: Sequence[int]) -> tuple:
    for v in x:
        if v:
            return tuple(x) if v > 0 else tuple(-c for c in x)
    return tuple(x)


def reduced_representatives(field: CMField, n: int) -> list[WeilNumber]:
    """Sign classes of Weil numbers of norm n divisible by no integer > 1."""
    reps = {
        _sign_normal(w.coords)
        for w in enumerate_weil(field, n)
        if math.gcd(*w.coords) == 1
    }
    return [WeilNumber(c, n) for c in sorted(reps)]


def support_primes(field: CMField) -> frozenset:
    return field.bad_primes | field.ramified_primes


def height_of_point(field: CMField, w: WeilNumber) -> int:
    if math.gcd(*w.coords) != 1:
        raise ValueError("height_of_point expects a reduced representative")
    if field.quadrics[0](w.coords) != w.n:
        raise ValueError("coordinates do not have the stated norm")
    bad = [p for p in support_primes(field) if w.n % p == 0]
    if bad:
        raise errors.RamifiedSupport(
            f"n={w.n} is divisible by ramified or bad primes {sorted(bad)}"
        )
    return w.n


def height_class_counts(field: CMField, x_max: int) -> np.ndarray:
    """counts[n] = sign classes of reduced Weil numbers of norm n, for n prime to S.

    Indices sharing a factor with the bad or ramified primes are zero.
    """
    counts = np.zeros(x_max + 1, dtype=np.int64)
    for pts, n in weil_blocks(field, x_max):
        g = np.gcd.reduce(np.abs(pts), axis=1)
        keep = g == 1
        counts += np.bincount(n[keep], minlength=x_max + 1)
    # each class {alpha, -alpha} was seen twice
    counts //= 2
    for p in support_primes(field):
        counts[p::p] = 0
    return counts


def _grid(x_max: int, step: int) -> list[int]:
    if x_max < 1 or step < 1:
        raise ValueError("x_max and step must be >= 1")
    grid = list(range(step, x_max + 1, step))
    if not grid or grid[-1] != x_max:
        grid.append(x_max)
    return grid


def count_table(field: CMField, x_max: int, grid_step: int = 1, heights: bool = False) -> CountTable:
    """N(K, x) = sum_{n <= x} a_K(n) sampled on the grid step, 2 step, ..., x_max."""
    hist = norm_histogram(field, x_max)
    cum = np.cumsum(hist)
    grid = _grid(x_max, grid_step)
    table = CountTable(grid=grid, counts=[int(cum[x]) for x in grid])
    if heights:
        hc = np.cumsum(height_class_counts(field, x_max))
        table.heights_counts = [int(hc[x]) for x in grid]
    return table


def count_points_bounded_height(field: CMField, x_max: int, grid_step: int = 1) -> CountTable:
    """Points of V(Q) with unramified support and height <= x."""
    hc = np.cumsum(height_class_counts(field, x_max))
    grid = _grid(x_max, grid_step)
    counts = [int(hc[x]) for x in grid]
    return CountTable(grid=grid, counts=counts, heights_counts=counts)
