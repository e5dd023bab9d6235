"""Grids of depth, grade, Bass numbers and lengths of Ext^{2i+t}(M, N_n) over (n, i).

Also: stabilization detection, exact bivariate polynomial fitting and the
linear recurrences implied by rational generating functions.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Callable, Sequence

from .errors import NoFit, TailOutsideGrid, WindowTooSmall
from .modules import INFINITE, QUOT, IdealSpec, PresentedModule, rees_family
from .resolution import bass, depth, ext, grade, resolution, residue_field

Cell = tuple[int, int]


def format_value(v) -> str:
    if v == INFINITE:
        return "inf"
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return str(v)


def parse_value(s: str):
    s = s.strip()
    if s == "inf":
        return INFINITE
    if "/" in s:
        return Fraction(s)
    return int(s)


def _json_value(v):
    if v == INFINITE:
        return "inf"
    if isinstance(v, Fraction):
        return format_value(v)
    return v


@dataclass
class GridResult:
    t: int
    quantity: str
    kind: str
    n_range: tuple[int, int]
    i_range: tuple[int, int]
    values: dict = field(default_factory=dict)

    def cells(self) -> list[Cell]:
        return [(n, i) for n in range(self.n_range[0], self.n_range[1] + 1)
                for i in range(self.i_range[0], self.i_range[1] + 1)]

    def __getitem__(self, cell: Cell):
        return self.values[cell]

    def is_complete(self) -> bool:
        return all(c in self.values for c in self.cells())

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "i", "value"])
        for n, i in self.cells():
            w.writerow([n, i, format_value(self.values[(n, i)])])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, t: int = 0, quantity: str = "", kind: str = QUOT) -> GridResult:
        rows = list(csv.reader(io.StringIO(text)))
        values = {(int(n), int(i)): parse_value(v) for n, i, v in rows[1:]}
        ns = [c[0] for c in values]
        is_ = [c[1] for c in values]
        return cls(t, quantity, kind, (min(ns), max(ns)), (min(is_), max(is_)), values)

    def restrict(self, n_range, i_range) -> GridResult:
        vals = {(n, i): v for (n, i), v in self.values.items()
                if n_range[0] <= n <= n_range[1] and i_range[0] <= i <= i_range[1]}
        return GridResult(self.t, self.quantity, self.kind, tuple(n_range), tuple(i_range), vals)


# -- grid evaluation ------------------------------------------------------------------

def _family(N: PresentedModule, I: IdealSpec, kind: str, n_range) -> dict[int, PresentedModule]:
    return {n: rees_family(N, I, n, kind) for n in range(n_range[0], n_range[1] + 1)}


def compute_grid(M: PresentedModule, N: PresentedModule, I: IdealSpec, t: int,
                 n_range, i_range, quantity: str, cell: Callable, *, kind: str = QUOT,
                 threads: int = 1) -> GridResult:
    """Evaluate ``cell(Ext^{2i+t}(M, N_n))`` on the rectangle.

    The resolution of M and all N_n are built first, in a fixed order;
    cells are then independent and may be evaluated by a thread pool.
    """
    if t not in (0, 1):
        raise ValueError("parity t must be 0 or 1")
    n_range, i_range = tuple(n_range), tuple(i_range)
    resolution(M).extend(2 * i_range[1] + t + 1)
    resolution(residue_field(M.ring)).extend(M.ring.v + 1)
    fam = _family(N, I, kind, n_range)
    G = GridResult(t, quantity, kind, n_range, i_range)
    cells = G.cells()

    def work(c):
        n, i = c
        return cell(ext(M, fam[n], 2 * i + t).value)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, cells))
    else:
        results = [work(c) for c in cells]
    G.values = dict(zip(cells, results))
    return G


def depth_grid(M, N, I, t, n_range, i_range, *, threads: int = 1) -> GridResult:
    return compute_grid(M, N, I, t, n_range, i_range, "depth", depth, threads=threads)


def grade_grid(M, N, I, J: IdealSpec, t, n_range, i_range, *, kind: str = QUOT,
               threads: int = 1) -> GridResult:
    J.require_proper()
    return compute_grid(M, N, I, t, n_range, i_range, "grade",
                        lambda E: grade(J, E), kind=kind, threads=threads)


def bass_grid(M, N, I, t, j: int, n_range, i_range, *, threads: int = 1) -> GridResult:
    return compute_grid(M, N, I, t, n_range, i_range, f"bass({j})",
                        lambda E: bass(j, E), threads=threads)


def length_grid(M, N, I, t, n_range, i_range, *, threads: int = 1) -> GridResult:
    return compute_grid(M, N, I, t, n_range, i_range, "length",
                        lambda E: E.length(), threads=threads)


# -- stabilization ---------------------------------------------------------------------

@dataclass
class StabilityReport:
    stable: bool
    stable_value: object = None
    onset: Cell | None = None
    margin: int = 0

    def to_json(self) -> dict:
        return {
            "stable": self.stable,
            "stable_value": _json_value(self.stable_value) if self.stable else None,
            "stable_value_is_infinite": bool(self.stable and self.stable_value == INFINITE),
            "onset": list(self.onset) if self.onset else None,
            "margin": self.margin,
        }


def detect_stabilization(G: GridResult, margin: int) -> StabilityReport:
    """Smallest onset (n0, i0) after which the grid is constant, with at least
    ``margin`` further rows and columns checked beyond the onset.

    Among incomparable onsets the one minimizing (n0 + i0, n0, i0) is chosen.
    """
    (n_lo, n_hi), (i_lo, i_hi) = G.n_range, G.i_range
    if n_hi - n_lo < margin or i_hi - i_lo < margin:
        raise WindowTooSmall(f"grid must be at least {margin + 1} x {margin + 1}")
    target = G[(n_hi, i_hi)]
    # ok[n][i]: every cell in [n, n_hi] x [i, i_hi] equals target
    ok: dict[Cell, bool] = {}
    for n in range(n_hi, n_lo - 1, -1):
        for i in range(i_hi, i_lo - 1, -1):
            good = G[(n, i)] == target
            if n < n_hi:
                good = good and ok[(n + 1, i)]
            if i < i_hi:
                good = good and ok[(n, i + 1)]
            ok[(n, i)] = good
    onsets = [(n, i) for (n, i), good in ok.items()
              if good and n_hi - n >= margin and i_hi - i >= margin]
    if not onsets:
        return StabilityReport(False)
    n0, i0 = min(onsets, key=lambda c: (c[0] + c[1], c[0], c[1]))
    return StabilityReport(True, target, (n0, i0), min(n_hi - n0, i_hi - i0))


def grid_with_retry(compute: Callable[[tuple, tuple], GridResult], n_range, i_range,
                    margin: int) -> tuple[GridResult, StabilityReport]:
    """Compute, and if not stable, recompute once on ranges of twice the extent."""
    G = compute(tuple(n_range), tuple(i_range))
    rep = detect_stabilization(G, margin)
    if rep.stable:
        return G, rep
    n2 = (n_range[0], n_range[0] + 2 * (n_range[1] - n_range[0] + 1) - 1)
    i2 = (i_range[0], i_range[0] + 2 * (i_range[1] - i_range[0] + 1) - 1)
    G = compute(n2, i2)
    return G, detect_stabilization(G, margin)


# -- exact bivariate fitting -------------------------------------------------------------

@dataclass
class PolyFit:
    """g(n, i) = sum coefficients[(a, b)] n^a i^b, exact."""

    coefficients: dict
    fit_region: tuple
    validation_region: list
    degree: tuple[int, int]

    def __call__(self, n: int, i: int) -> Fraction:
        return sum((c * Fraction(n) ** a * Fraction(i) ** b for (a, b), c in self.coefficients.items()),
                   Fraction(0))

    def to_json(self) -> dict:
        return {
            "degree": {"n": self.degree[0], "i": self.degree[1]},
            "coefficients": [{"n_power": a, "i_power": b, "value": format_value(c)}
                             for (a, b), c in sorted(self.coefficients.items())],
            "fit_region": {"n": list(self.fit_region[0]), "i": list(self.fit_region[1])},
            "validation_cells": [list(c) for c in self.validation_region],
        }


def _binomial_poly(a: int, shift: int) -> list[Fraction]:
    """Coefficients (by power of x) of C(x - shift, a)."""
    poly = [Fraction(1)]
    for k in range(a):
        # multiply by (x - shift - k) / (k + 1)
        nxt = [Fraction(0)] * (len(poly) + 1)
        for d, c in enumerate(poly):
            nxt[d + 1] += c / (k + 1)
            nxt[d] -= c * (shift + k) / (k + 1)
        poly = nxt
    return poly


def _differences(rows: list[list[Fraction]]) -> list[list[list[Fraction]]]:
    """table[a][b][...]: iterated forward differences along the first axis."""
    out = [rows]
    while len(out[-1]) > 1:
        cur = out[-1]
        out.append([[y - x for x, y in zip(r0, r1)] for r0, r1 in zip(cur, cur[1:])])
    return out


def _degree_along(rows: list[list[Fraction]]) -> int:
    """Minimal d such that the (d+1)-th differences along axis 0 vanish; NoFit if none."""
    diffs = _differences(rows)
    for d in range(len(diffs) - 1):
        if all(x == 0 for r in diffs[d + 1] for x in r):
            return d
    raise NoFit("finite differences do not vanish inside the fit region", max_order=len(diffs) - 1)


def fit_bivariate_polynomial(G: GridResult, region=None, validation: Sequence[Cell] | None = None) -> PolyFit:
    """Exact polynomial interpolation of the grid on a rectangle via finite differences."""
    if region is None:
        region = (G.n_range, G.i_range)
    (n0, n1), (i0, i1) = region
    cells = [(n, i) for n in range(n0, n1 + 1) for i in range(i0, i1 + 1)]
    if any(c not in G.values for c in cells):
        raise ValueError("fit region lies outside the grid")
    if any(G[c] == INFINITE for c in cells):
        raise NoFit("grid has infinite entries in the fit region", max_order=None)
    rows = [[Fraction(G[(n, i)]) for i in range(i0, i1 + 1)] for n in range(n0, n1 + 1)]
    cols = [list(c) for c in zip(*rows)]
    dn = _degree_along(rows)
    di = _degree_along(cols)
    # mixed differences at the corner
    table = _differences(rows)
    coeffs: dict = {}
    for a in range(dn + 1):
        col_diffs = _differences([[x] for x in table[a][0]])
        for b in range(di + 1):
            delta = col_diffs[b][0][0]
            if delta == 0:
                continue
            pn = _binomial_poly(a, n0)
            pi = _binomial_poly(b, i0)
            for x, cn in enumerate(pn):
                for y, ci in enumerate(pi):
                    if cn and ci:
                        coeffs[(x, y)] = coeffs.get((x, y), Fraction(0)) + delta * cn * ci
    coeffs = {k: v for k, v in coeffs.items() if v != 0}
    val = list(validation or [])
    fit = PolyFit(coeffs, ((n0, n1), (i0, i1)), val, (dn, di))
    for c in cells + val:
        if c not in G.values:
            raise ValueError(f"validation cell {c} lies outside the grid")
        if G[c] == INFINITE or fit(*c) != G[c]:
            raise NoFit(f"fitted polynomial disagrees with the grid at {c}", max_order=max(dn, di))
    return fit


# -- recurrences ---------------------------------------------------------------------------

@dataclass
class RecurrenceSpec:
    c: int
    r: int
    parity_reindexed: bool = True

    def __post_init__(self):
        if self.c < 0 or self.r < 0:
            raise ValueError("c and r must be non-negative")


@dataclass
class RecurrenceResult:
    ok: bool
    checked: int
    counterexample: Cell | None = None
    residual: object = None

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        return {"holds": self.ok, "cells_checked": self.checked,
                "counterexample": list(self.counterexample) if self.counterexample else None,
                "residual": _json_value(self.residual) if self.residual is not None else None}


def check_recurrence(G: GridResult, spec: RecurrenceSpec, tail_onset: Cell) -> RecurrenceResult:
    """Check sum_{a<=c, b<=r} (-1)^{a+b} C(c,a) C(r,b) G(n-b, i-a) = 0 on the tail.

    Only the fixed parity is sampled, so one i-step of the grid is z^2 and the
    factor (1 - z^2)^c becomes the c-th backward difference in i.
    """
    n_on, i_on = tail_onset
    (n_lo, n_hi), (i_lo, i_hi) = G.n_range, G.i_range
    n_start = max(n_on, n_lo) + spec.r
    i_start = max(i_on, i_lo) + spec.c
    if n_start > n_hi or i_start > i_hi:
        raise TailOutsideGrid(f"no cell with its whole stencil inside the tail from {tail_onset}")
    checked = 0
    for n in range(n_start, n_hi + 1):
        for i in range(i_start, i_hi + 1):
            total = 0
            for a in range(spec.c + 1):
                for b in range(spec.r + 1):
                    v = G[(n - b, i - a)]
                    if v == INFINITE:
                        raise ValueError("recurrence needs finite grid values")
                    total += (-1) ** (a + b) * comb(spec.c, a) * comb(spec.r, b) * v
            checked += 1
            if total != 0:
                return RecurrenceResult(False, checked, (n, i), total)
    return RecurrenceResult(True, checked)


def series_recurrence_onset(seq: Sequence[int], c: int, step: int = 2) -> int | None:
    """Smallest s such that sum_a (-1)^a C(c,a) seq[i - step*a] = 0 for every i
    with i - step*c >= s; None if even the last index fails."""
    def residual(i):
        return sum((-1) ** a * comb(c, a) * seq[i - step * a] for a in range(c + 1))

    n = len(seq)
    span = step * c
    if n <= span:
        return None
    onset = n - span - 1
    if residual(n - 1) != 0:
        return None
    for s in range(n - span - 1, -1, -1):
        if residual(s + span) != 0:
            break
        onset = s
    return onset


def ext_length_series(M: PresentedModule, upto: int) -> list:
    """lambda(Ext^i(M, k)) for i = 0..upto."""
    k = residue_field(M.ring)
    return [ext(M, k, i).value.length() for i in range(upto + 1)]


def report_json(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


__all__ = [
    "GridResult", "StabilityReport", "PolyFit", "RecurrenceSpec", "RecurrenceResult",
    "compute_grid", "depth_grid", "grade_grid", "bass_grid", "length_grid",
    "detect_stabilization", "grid_with_retry", "fit_bivariate_polynomial", "check_recurrence",
    "series_recurrence_onset", "ext_length_series", "format_value", "parse_value", "report_json",
]
