"""Complete intersection rings A = Q/(f_1..f_c) with Q = F_p[x_1..x_v]."""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass
from typing import Sequence

from .errors import NotHomogeneous, NotRegularSequence
from .groebner import GroebnerBasis, buchberger_core, groebner, ideal_quotient, lead_term
from .polyring import NOT_HOMOGENEOUS, MonomialOrder, Polynomial, PolyRing, degree_check


@dataclass
class RegularityReport:
    ok: bool
    index: int | None = None
    witness: Polynomial | None = None

    def __bool__(self):
        return self.ok


def verify_regular_sequence(f: Sequence[Polynomial]) -> RegularityReport:
    """Check that each f_j is a nonzerodivisor modulo (f_1..f_{j-1}).

    On failure ``index`` is 1-based and ``witness`` lies in
    ``(f_<j : f_j)`` but not in ``(f_<j)``.
    """
    if not f:
        return RegularityReport(True)
    ring = f[0].ring
    for j, fj in enumerate(f):
        if fj.is_zero():
            return RegularityReport(False, j + 1, ring.poly(1))
        if j == 0:
            continue
        prev = groebner([g.terms for g in f[:j]], ring)
        quo = ideal_quotient(f[:j], fj)
        for q in quo.generators:
            if prev.reduce(q):
                return RegularityReport(False, j + 1, Polynomial(ring, dict(q)))
    return RegularityReport(True)


def _krull_dim_of_monomial_ideal(ring: PolyRing, monos: Sequence[int]) -> int:
    """Largest set of variables containing the support of no generator."""
    supports = []
    for m in monos:
        e = ring.unpack(m)
        supports.append(frozenset(k for k, x in enumerate(e) if x))
    v = ring.nvars
    for size in range(v, -1, -1):
        for S in itertools.combinations(range(v), size):
            s = frozenset(S)
            if not any(sup <= s for sup in supports):
                return size
    return -1


class CIRing:
    """Q/(f) for a homogeneous Q-regular sequence f; immutable after validation.

    Arithmetic over A is Q-arithmetic followed by reduction modulo the
    reduced Groebner basis of (f).
    """

    def __init__(self, variables: Sequence[str], f: Sequence[str | Polynomial] = (), p: int = 101,
                 order: MonomialOrder | str = MonomialOrder.GREVLEX, validate: bool = True):
        self.Q = Q = PolyRing(variables, p, order)
        self.p = p
        self.f = [self._adopt(g) for g in f]
        for g in self.f:
            d = degree_check(g)
            if d is NOT_HOMOGENEOUS:
                raise NotHomogeneous(f"{g} is not homogeneous")
            if g.is_zero() or d < 1:
                raise ValueError(f"regular sequence element {g} must have degree >= 1")
        if validate:
            rep = verify_regular_sequence(self.f)
            if not rep.ok:
                raise NotRegularSequence(rep.index, rep.witness)
        self.c = len(self.f)
        self.v = Q.nvars
        self.krull_dim = self.v - self.c
        self.gb_f: GroebnerBasis = groebner([g.terms for g in self.f], Q)
        self.f_lift = self._lift_gb_f()
        mm = Q.mono_mask
        self._f_index = [(lead_term(Q, g), [(t, x) for t, x in g.items() if t != lead_term(Q, g)])
                         for g in self.gb_f.generators]
        self._f_degs = [Q.mdeg(lead_term(Q, g)) for g in self.gb_f.generators]
        assert all(lt == lt & mm for lt, _ in self._f_index)
        self.lock = threading.RLock()
        self.cache: dict = {}

    def _adopt(self, g) -> Polynomial:
        Q = self.Q
        if isinstance(g, str):
            return Q.parse(g)
        if g.ring.variables != Q.variables:
            raise ValueError("polynomial from a ring with different variables")
        return Polynomial(Q, {m: c % Q.p for m, c in g.terms.items() if c % Q.p})

    def __repr__(self):
        fs = ", ".join(str(g) for g in self.f)
        return f"CIRing(vars={list(self.Q.variables)}, f=[{fs}], p={self.p})"

    def _lift_gb_f(self) -> list[list[dict]]:
        """For each reduced basis element g of (f), coefficients a with g = sum a_j f_j."""
        Q = self.Q
        if not self.f:
            return []
        shifts = (0,) + tuple(Q.mdeg(next(iter(g.terms))) for g in self.f)
        aug = []
        for j, g in enumerate(self.f):
            v = dict(g.terms)
            v[Q.term(j + 1, Q.one)] = 1
            aug.append(v)
        B, _ = buchberger_core(Q, shifts, aug)
        from .groebner import _reduce
        lifts = []
        for g in self.gb_f.generators:
            r = _reduce(Q, dict(g), B.by_comp, Q.pot_key)
            if any(t >> Q.mono_bits == 0 for t in r):
                raise AssertionError("basis element not in (f)")
            coeffs = [dict() for _ in self.f]
            for t, c in r.items():
                coeffs[(t >> Q.mono_bits) - 1][t & Q.mono_mask] = (-c) % self.p
            lifts.append(coeffs)
        return lifts

    # -- normal forms ------------------------------------------------------

    def nf_vec(self, vec: dict) -> dict:
        """Reduce every component of a module vector modulo (f)."""
        if not self._f_index or not vec:
            return dict(vec)
        Q = self.Q
        p = self.p
        guard = Q.guard
        mm = Q.mono_mask
        kget = Q.pot_key.__getitem__
        vec = dict(vec)
        rem = {}
        index = self._f_index
        while vec:
            t = max(vec, key=kget)
            c = vec.pop(t)
            mono = t & mm
            for lt, tail in index:
                d = (mono | guard) - lt
                if d & guard == guard:
                    q = (d ^ guard) + (t - mono)
                    get = vec.get
                    for tt, tc in tail:
                        nt = tt + q
                        x = (get(nt, 0) - c * tc) % p
                        if x:
                            vec[nt] = x
                        else:
                            del vec[nt]
                    break
            else:
                rem[t] = c
        return rem

    def normal_form(self, g):
        """Canonical representative in A of a polynomial or a matrix of polynomials."""
        if isinstance(g, Polynomial):
            return Polynomial(self.Q, self.nf_vec(g.terms))
        if isinstance(g, dict):
            return self.nf_vec(g)
        return [self.normal_form(x) for x in g]

    normal_form_A = normal_form

    def f_vectors(self, shifts: Sequence[int]) -> list[dict]:
        """gb(f) placed in every component of a free module; a Groebner basis."""
        Q = self.Q
        out = []
        for k in range(len(shifts)):
            cb = k << Q.mono_bits
            for g in self.gb_f.generators:
                out.append({t + cb: c for t, c in g.items()})
        return out

    def leading_term_dim(self) -> int:
        """Krull dimension of Q/LT(f), computed combinatorially."""
        return _krull_dim_of_monomial_ideal(self.Q, [lead_term(self.Q, g) for g in self.gb_f.generators])

    def poly(self, text) -> Polynomial:
        if isinstance(text, Polynomial):
            return Polynomial(self.Q, self.nf_vec(text.terms))
        if isinstance(text, int):
            return self.Q.poly(text)
        return Polynomial(self.Q, self.nf_vec(self.Q.parse(text).terms))

    def gens(self) -> list[Polynomial]:
        return self.Q.gens()
