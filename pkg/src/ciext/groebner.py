"""Buchberger's algorithm for homogeneous submodules of graded free modules.

Vectors are ``{term: coeff}`` dicts over a :class:`PolyRing` (see
``polyring``); a free module is described by its component degree shifts.
Ideals are the rank-1 case. The default module order is position over term
with earlier components larger, which makes component elimination direct:
in a basis of a submodule of ``F ⊕ G``, the elements whose leading term lies
in ``G`` have zero ``F``-part and generate the intersection with ``G``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import NotHomogeneous
from .polyring import Polynomial, PolyRing, vec_iadd, vec_scale


def vec_degree(ring: PolyRing, shifts: Sequence[int], vec: dict) -> int:
    t = next(iter(vec))
    return shifts[t >> ring.mono_bits] + ring.mdeg(t)


def is_homogeneous(ring: PolyRing, shifts: Sequence[int], vec: dict) -> bool:
    mb = ring.mono_bits
    degs = {shifts[t >> mb] + ring.mdeg(t) for t in vec}
    return len(degs) <= 1


def lead_term(ring: PolyRing, vec: dict, key=None) -> int:
    key = ring.pot_key if key is None else key
    return max(vec, key=key.__getitem__)


def _reduce(ring: PolyRing, vec: dict, by_comp: dict, key) -> dict:
    """Full reduction of ``vec`` (consumed) by monic basis elements.

    ``by_comp`` maps a component to a list of ``(lead, tail)`` pairs searched
    in insertion order; the first divisor found is used.
    """
    p = ring.p
    guard = ring.guard
    mb = ring.mono_bits
    kget = key.__getitem__
    rem = {}
    while vec:
        t = max(vec, key=kget)
        c = vec.pop(t)
        for lt, tail in by_comp.get(t >> mb, ()):
            d = (t | guard) - lt
            if d & guard == guard:
                q = d ^ guard
                get = vec.get
                for tt, tc in tail:
                    nt = tt + q
                    v = (get(nt, 0) - c * tc) % p
                    if v:
                        vec[nt] = v
                    else:
                        del vec[nt]
                break
        else:
            rem[t] = c
    return rem


def _top_free(ring: PolyRing, vec: dict, by_comp: dict, key) -> bool:
    """True when ``vec`` reduces to zero (top reduction only; consumes vec)."""
    p = ring.p
    guard = ring.guard
    mb = ring.mono_bits
    kget = key.__getitem__
    while vec:
        t = max(vec, key=kget)
        c = vec.pop(t)
        for lt, tail in by_comp.get(t >> mb, ()):
            d = (t | guard) - lt
            if d & guard == guard:
                q = d ^ guard
                get = vec.get
                for tt, tc in tail:
                    nt = tt + q
                    v = (get(nt, 0) - c * tc) % p
                    if v:
                        vec[nt] = v
                    else:
                        del vec[nt]
                break
        else:
            return False
    return True


class _Basis:
    """Working set of monic basis elements with a Gebauer-Moeller pair queue."""

    def __init__(self, ring: PolyRing, shifts: Sequence[int], key, ideal: bool):
        self.ring = ring
        self.shifts = shifts
        self.key = key
        self.ideal = ideal
        self.leads: list[int] = []
        self.vecs: list[dict] = []
        self.active: list[bool] = []
        self.by_comp: dict[int, list] = {}
        self.active_by_comp: dict[int, list[int]] = {}
        self.pairs: dict[int, dict[tuple[int, int], int]] = {}

    def degree_of_term(self, t: int) -> int:
        return self.shifts[t >> self.ring.mono_bits] + self.ring.mdeg(t)

    def insert(self, vec: dict, lt: int, with_pairs: bool = True) -> int:
        p = self.ring.p
        c = vec[lt]
        if c != 1:
            vec = vec_scale(vec, self.ring.field.inv(c), p)
        idx = len(self.vecs)
        comp = lt >> self.ring.mono_bits
        if with_pairs:
            self._update(idx, lt, comp)
        self.leads.append(lt)
        self.vecs.append(vec)
        self.active.append(True)
        tail = [(t, v) for t, v in vec.items() if t != lt]
        self.by_comp.setdefault(comp, []).append((lt, tail))
        self.active_by_comp.setdefault(comp, []).append(idx)
        return idx

    def _update(self, h: int, th: int, comp: int) -> None:
        ring = self.ring
        lcm = ring.mono_lcm
        divides = ring.divides
        ideal = self.ideal
        mono_mask = ring.mono_mask
        base = th & ~mono_mask
        mh = th & mono_mask
        cand = []
        for g in self.active_by_comp.get(comp, ()):
            if not self.active[g]:
                continue
            mg = self.leads[g] & mono_mask
            cand.append((g, base | lcm(mg, mh), ideal and ring.coprime(mg, mh)))
        # criterion M/F on the new pairs
        kept = []
        for n, (g1, l1, cop1) in enumerate(cand):
            if cop1 or not (any(divides(l2, l1) for _, l2, _ in cand[n + 1:])
                            or any(divides(l2, l1) for _, l2, _ in kept)):
                kept.append((g1, l1, cop1))
        # criterion B on old pairs
        for d, bucket in list(self.pairs.items()):
            drop = []
            for (a, b), l in bucket.items():
                if l >> ring.mono_bits != comp or not divides(th, l):
                    continue
                la = base | lcm(self.leads[a] & mono_mask, mh)
                lb = base | lcm(self.leads[b] & mono_mask, mh)
                if la != l and lb != l:
                    drop.append((a, b))
            for k in drop:
                del bucket[k]
            if not bucket:
                del self.pairs[d]
        for g, l, cop in kept:
            if cop:
                continue
            deg = self.degree_of_term(l)
            self.pairs.setdefault(deg, {})[(g, h)] = l
        # elements whose lead is a multiple of th no longer spawn pairs
        for g in self.active_by_comp.get(comp, ()):
            if self.active[g] and divides(th, self.leads[g]):
                self.active[g] = False

    def spoly(self, i: int, j: int, l: int) -> dict:
        p = self.ring.p
        out: dict = {}
        vec_iadd(out, self.vecs[i], p, 1, l - self.leads[i])
        vec_iadd(out, self.vecs[j], p, -1, l - self.leads[j])
        return out

    def reduce(self, vec: dict) -> dict:
        return _reduce(self.ring, dict(vec), self.by_comp, self.key)


def _check_homogeneous(ring, shifts, vecs):
    for v in vecs:
        if v and not is_homogeneous(ring, shifts, v):
            raise NotHomogeneous("Groebner engine requires homogeneous input")


def buchberger_core(ring: PolyRing, shifts: Sequence[int], inputs: Sequence[dict], *,
                    base: Sequence[dict] = (), gb_base: Sequence[dict] = (),
                    key=None, max_degree: float | None = None):
    """Degree-by-degree homogeneous Buchberger.

    ``gb_base`` must already be a Groebner basis (its internal pairs are
    skipped); ``base`` elements are processed like inputs but never reported.
    Returns ``(basis, minimal)`` where ``minimal`` lists the indices of the
    inputs that were not already in the module generated by everything of
    lower degree, earlier inputs, and the bases; they form a minimal
    generating set of ``(inputs + bases) / bases``.
    """
    key = ring.pot_key if key is None else key
    shifts = tuple(shifts)
    _check_homogeneous(ring, shifts, inputs)
    _check_homogeneous(ring, shifts, base)
    ideal = len(shifts) == 1
    B = _Basis(ring, shifts, key, ideal)
    for v in gb_base:
        if v:
            B.insert(dict(v), lead_term(ring, v, key), with_pairs=False)
    queue: dict[int, list] = {}
    for n, v in enumerate(base):
        if v:
            queue.setdefault(vec_degree(ring, shifts, v), []).append((0, n, v))
    for n, v in enumerate(inputs):
        if v:
            queue.setdefault(vec_degree(ring, shifts, v), []).append((1, n, v))
    minimal: list[int] = []
    while B.pairs or queue:
        d = min(list(B.pairs) + list(queue))
        if max_degree is not None and d > max_degree:
            break
        bucket = B.pairs.pop(d, {})
        for (i, j) in sorted(bucket):
            l = bucket[(i, j)]
            r = B.reduce(B.spoly(i, j, l))
            if r:
                B.insert(r, lead_term(ring, r, key))
            # pairs of degree d created by inserts are impossible (see module doc)
        for kind, n, v in queue.pop(d, ()):
            r = B.reduce(v)
            if r:
                B.insert(r, lead_term(ring, r, key))
                if kind == 1:
                    minimal.append(n)
    return B, minimal


def interreduce(ring: PolyRing, vecs: Sequence[dict], key=None) -> list[dict]:
    """Reduced basis from a Groebner basis: minimal leads, monic, reduced tails."""
    key = ring.pot_key if key is None else key
    items = []
    for v in vecs:
        if v:
            lt = lead_term(ring, v, key)
            items.append((lt, v))
    items.sort(key=lambda it: key[it[0]])
    keep = []
    for n, (lt, v) in enumerate(items):
        if any(ring.divides(lt2, lt) for lt2, _ in keep):
            continue
        keep.append((lt, v))
    # leads are pairwise indivisible now; drop any that a later (larger) lead divides? impossible
    by_comp: dict = {}
    monic = []
    for lt, v in keep:
        c = v[lt]
        if c != 1:
            v = vec_scale(v, ring.field.inv(c), ring.p)
        monic.append((lt, v))
        by_comp.setdefault(lt >> ring.mono_bits, []).append((lt, [(t, x) for t, x in v.items() if t != lt]))
    out = []
    for lt, v in monic:
        tail = {t: x for t, x in v.items() if t != lt}
        r = _reduce(ring, tail, by_comp, key)
        r[lt] = 1
        out.append(r)
    out.sort(key=lambda v: key[lead_term(ring, v, key)], reverse=True)
    return out


@dataclass
class GroebnerBasis:
    """Basis of a submodule of a graded free module (an ideal when rank 1)."""

    ring: PolyRing
    shifts: tuple
    generators: list
    reduced: bool = True
    order: str = "pot"
    _index: dict = field(default=None, repr=False)

    def _by_comp(self):
        if self._index is None:
            idx: dict = {}
            key = self.ring.pot_key
            for v in self.generators:
                lt = lead_term(self.ring, v, key)
                c = v[lt]
                if c != 1:
                    v = vec_scale(v, self.ring.field.inv(c), self.ring.p)
                idx.setdefault(lt >> self.ring.mono_bits, []).append(
                    (lt, [(t, x) for t, x in v.items() if t != lt]))
            self._index = idx
        return self._index

    def reduce(self, vec) -> dict:
        vec = _as_vec(vec)
        return _reduce(self.ring, dict(vec), self._by_comp(), self.ring.pot_key)

    def contains(self, vec) -> bool:
        return not self.reduce(vec)

    def leading_terms(self) -> list[int]:
        return [lead_term(self.ring, v) for v in self.generators]

    def polys(self) -> list[Polynomial]:
        return [Polynomial(self.ring, dict(v)) for v in self.generators]

    def __len__(self):
        return len(self.generators)


def _as_vec(x) -> dict:
    return x.terms if isinstance(x, Polynomial) else x


def _ring_of(items, ring):
    if ring is not None:
        return ring
    for x in items:
        if isinstance(x, Polynomial):
            return x.ring
    raise ValueError("ring required")


def groebner(vecs: Sequence[dict], ring: PolyRing, shifts: Sequence[int] | None = None, *,
             gb_base: Sequence[dict] = ()) -> GroebnerBasis:
    shifts = (0,) if shifts is None else tuple(shifts)
    B, _ = buchberger_core(ring, shifts, list(vecs), gb_base=gb_base)
    return GroebnerBasis(ring, shifts, interreduce(ring, B.vecs))


def buchberger(gens, ring: PolyRing | None = None, shifts: Sequence[int] | None = None) -> GroebnerBasis:
    """Reduced Groebner basis of the submodule generated by ``gens``."""
    ring = _ring_of(gens, ring)
    return groebner([_as_vec(g) for g in gens], ring, shifts)


def minimal_generators(ring: PolyRing, shifts: Sequence[int], vecs: Sequence[dict], *,
                       base: Sequence[dict] = (), gb_base: Sequence[dict] = ()) -> list[int]:
    """Indices of a minimal subset of ``vecs`` generating ``(vecs + base) / base``."""
    _, minimal = buchberger_core(ring, shifts, list(vecs), base=base, gb_base=gb_base)
    return minimal


@dataclass
class DivisionResult:
    quotients: list
    remainder: object


def divide(f, gens: Sequence, ring: PolyRing | None = None, key=None) -> DivisionResult:
    """Multivariate division; the divisor is the first generator (by position)
    whose leading term divides the current leading term.

    Works on Polynomials (ideal case) or on module vectors; quotients are
    ring elements (component-0 dicts, or Polynomials for Polynomial input).
    """
    poly_mode = isinstance(f, Polynomial) or any(isinstance(g, Polynomial) for g in gens)
    ring = _ring_of([f, *gens], ring)
    key = ring.pot_key if key is None else key
    p = ring.p
    mm = ring.mono_mask
    vec = dict(_as_vec(f))
    gvecs = [_as_vec(g) for g in gens]
    leads = []
    for g in gvecs:
        if g:
            lt = lead_term(ring, g, key)
            leads.append((lt, ring.field.inv(g[lt])))
        else:
            leads.append(None)
    quots = [dict() for _ in gvecs]
    rem: dict = {}
    while vec:
        t = max(vec, key=key.__getitem__)
        c = vec[t]
        for n, ld in enumerate(leads):
            if ld is None:
                continue
            lt, linv = ld
            if ring.divides(lt, t):
                q = (t - lt) & mm
                fac = c * linv % p
                vec_iadd(quots[n], {ring.one: fac}, p, 1, q)
                vec_iadd(vec, gvecs[n], p, -fac, q)
                break
        else:
            rem[t] = vec.pop(t)
    if poly_mode:
        return DivisionResult([Polynomial(ring, q) for q in quots], Polynomial(ring, rem))
    return DivisionResult(quots, rem)


def member(f, gb: GroebnerBasis) -> bool:
    return gb.contains(f)


def s_vector(ring: PolyRing, a: dict, b: dict, key=None) -> dict | None:
    """S-vector of two vectors, or None when leading components differ."""
    key = ring.pot_key if key is None else key
    la, lb = lead_term(ring, a, key), lead_term(ring, b, key)
    if la >> ring.mono_bits != lb >> ring.mono_bits:
        return None
    mm = ring.mono_mask
    l = (la & ~mm) | ring.mono_lcm(la & mm, lb & mm)
    out: dict = {}
    vec_iadd(out, a, ring.p, ring.field.inv(a[la]), l - la)
    vec_iadd(out, b, ring.p, -ring.field.inv(b[lb]), l - lb)
    return out


def satisfies_buchberger_criterion(gb: GroebnerBasis) -> bool:
    """Exhaustive check: every S-vector reduces to zero."""
    gens = gb.generators
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            s = s_vector(gb.ring, gens[i], gens[j])
            if s is None:
                continue
            r = divide(s, gens, gb.ring).remainder
            if r:
                return False
    return True


def syzygy_basis(gb: GroebnerBasis) -> list[dict]:
    """Schreyer generators of the syzygy module of ``gb.generators``.

    Syzygies live in a free module whose component ``k`` has degree shift
    ``deg(g_k)``; entries are component-tagged terms.
    """
    ring = gb.ring
    p = ring.p
    mm = ring.mono_mask
    gens = gb.generators
    leads = [lead_term(ring, g) for g in gens]
    out = []
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            li, lj = leads[i], leads[j]
            if li >> ring.mono_bits != lj >> ring.mono_bits:
                continue
            l = (li & ~mm) | ring.mono_lcm(li & mm, lj & mm)
            ci, cj = ring.field.inv(gens[i][li]), ring.field.inv(gens[j][lj])
            s: dict = {}
            vec_iadd(s, gens[i], p, ci, l - li)
            vec_iadd(s, gens[j], p, -cj, l - lj)
            res = divide(s, gens, ring)
            if res.remainder:
                raise ValueError("input is not a Groebner basis")
            syz: dict = {}
            vec_iadd(syz, {ring.term(i, (l - li) & mm): ci}, p)
            vec_iadd(syz, {ring.term(j, (l - lj) & mm): -cj % p}, p)
            for k, q in enumerate(res.quotients):
                for m, c in q.items():
                    t = ring.term(k, m)
                    v = (syz.get(t, 0) - c) % p
                    if v:
                        syz[t] = v
                    else:
                        syz.pop(t, None)
            if syz:
                out.append(syz)
    return out


def syzygy_shifts(gb: GroebnerBasis) -> list[int]:
    return [vec_degree(gb.ring, gb.shifts, g) for g in gb.generators]


def ideal_quotient(Jgens: Sequence, g, ring: PolyRing | None = None) -> GroebnerBasis:
    """Basis of ``(J : g)`` via syzygies of ``(J, g)`` in a rank-2 module.

    Generators ``(J_k, 0)`` and ``(g, 1)``; elements with zero first
    coordinate have second coordinate ``b`` with ``b g ∈ J``.
    """
    ring = _ring_of([*Jgens, g], ring)
    gv = _as_vec(g)
    if not gv:
        return groebner([{ring.one: 1}], ring)
    dg = ring.mdeg(next(iter(gv)))
    one_second = ring.term(1, ring.one)
    vecs = [dict(_as_vec(j)) for j in Jgens if _as_vec(j)]
    gen = dict(gv)
    gen[one_second] = 1
    B, _ = buchberger_core(ring, (0, dg), vecs + [gen])
    quo = []
    for v in B.vecs:
        lt = lead_term(ring, v)
        if lt >> ring.mono_bits == 1:
            quo.append({t & ring.mono_mask: c for t, c in v.items()})
    return groebner(quo, ring)
