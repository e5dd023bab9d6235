"""Finitely presented graded modules over a complete intersection.

A module is ``coker(A^rels -> A^gens)``; relation columns are vectors over
the lifted free module ``Q^gens`` (component = generator index). Every
Groebner computation happens over Q with ``gb(f) * e_k`` appended, so one
engine serves all kernel, image and homology computations.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

from .ci_ring import CIRing
from .errors import ComposeNotZero, ImproperIdeal, NotHomogeneous
from .groebner import _reduce, buchberger_core, interreduce, lead_term, vec_degree
from .polyring import Polynomial, vec_iadd, vec_mul_poly

INFINITE = math.inf

QUOT, POWER, GRADED_PIECE = "quot", "power", "graded_piece"
FAMILY_KINDS = (QUOT, POWER, GRADED_PIECE)


def shift_vec(ring: CIRing, vec: dict, offset: int) -> dict:
    """Move every term ``offset`` components up (negative moves down)."""
    s = offset << ring.Q.mono_bits
    return {t + s: c for t, c in vec.items()}


def apply_columns(ring: CIRing, cols: Sequence[dict], vec: dict) -> dict:
    """Image of ``vec`` (over the source free module) under the column matrix."""
    Q = ring.Q
    mb, mm, p = Q.mono_bits, Q.mono_mask, Q.p
    out: dict = {}
    for t, c in vec.items():
        vec_iadd(out, cols[t >> mb], p, c, t & mm)
    return ring.nf_vec(out)


def entry(ring: CIRing, vec: dict, k: int) -> dict:
    """Component ``k`` of a vector, as a ring element (monomial -> coeff)."""
    Q = ring.Q
    mb, mm = Q.mono_bits, Q.mono_mask
    return {t & mm: c for t, c in vec.items() if t >> mb == k}


class PresentedModule:
    """Graded A-module given by generator degrees and relation columns."""

    def __init__(self, ring: CIRing, degrees: Sequence[int], relations: Sequence[dict] = (),
                 *, check: bool = True, _gb: list | None = None):
        self.ring = ring
        self.degrees = tuple(int(d) for d in degrees)
        rels = []
        for r in relations:
            r = ring.nf_vec(r)
            if r:
                rels.append(r)
        self.relations = rels
        if check:
            Q = ring.Q
            for r in rels:
                if any(t >> Q.mono_bits >= len(self.degrees) for t in r):
                    raise ValueError("relation refers to a missing generator")
                degs = {self.degrees[t >> Q.mono_bits] + Q.mdeg(t) for t in r}
                if len(degs) != 1:
                    raise NotHomogeneous("relation column is not homogeneous")
        self._gb = _gb
        self._index = None
        self._key = None
        self._lt = None

    # -- constructors ------------------------------------------------------

    @classmethod
    def free(cls, ring: CIRing, degrees: Sequence[int]) -> PresentedModule:
        m = cls(ring, degrees, (), check=False)
        m._gb = ring.f_vectors(m.degrees)
        return m

    @classmethod
    def zero(cls, ring: CIRing) -> PresentedModule:
        return cls(ring, (), (), check=False, _gb=[])

    @classmethod
    def cyclic(cls, ring: CIRing, ideal_gens: Sequence, degree: int = 0) -> PresentedModule:
        """A/J (twisted so its generator sits in ``degree``)."""
        rels = [_poly_vec(ring, g) for g in ideal_gens]
        return cls(ring, [degree], rels)

    @classmethod
    def residue_field(cls, ring: CIRing) -> PresentedModule:
        return cls.cyclic(ring, ring.Q.gens())

    @classmethod
    def from_lists(cls, ring: CIRing, degrees: Sequence[int], columns: Sequence[Sequence]) -> PresentedModule:
        """Relations given as columns of polynomials (strings or Polynomials)."""
        Q = ring.Q
        rels = []
        for col in columns:
            if len(col) != len(degrees):
                raise ValueError("relation column length differs from generator count")
            v: dict = {}
            for k, e in enumerate(col):
                vec_iadd(v, _poly_vec(ring, e), Q.p, 1, k << Q.mono_bits)
            rels.append(v)
        return cls(ring, degrees, rels)

    # -- basic data --------------------------------------------------------

    @property
    def rank(self) -> int:
        return len(self.degrees)

    def __repr__(self):
        return f"PresentedModule(gens={list(self.degrees)}, rels={len(self.relations)})"

    def relation_gb(self) -> list[dict]:
        """A Groebner basis (over Q) of relations + f * generators."""
        if self._gb is None:
            B, _ = buchberger_core(self.ring.Q, self.degrees, self.relations,
                                   gb_base=self.ring.f_vectors(self.degrees))
            self._gb = B.vecs
        return self._gb

    def _by_comp(self):
        if self._index is None:
            Q = self.ring.Q
            idx: dict = {}
            for v in self.relation_gb():
                lt = lead_term(Q, v)
                c = v[lt]
                if c != 1:
                    v = {t: x * Q.field.inv(c) % Q.p for t, x in v.items()}
                idx.setdefault(lt >> Q.mono_bits, []).append((lt, [(t, x) for t, x in v.items() if t != lt]))
            self._index = idx
        return self._index

    def reduce(self, vec: dict) -> dict:
        """Normal form of a free-cover vector modulo the relations."""
        return _reduce(self.ring.Q, dict(vec), self._by_comp(), self.ring.Q.pot_key)

    def leading_monomials(self) -> dict[int, list[int]]:
        if self._lt is None:
            Q = self.ring.Q
            lt: dict = {k: [] for k in range(self.rank)}
            for v in self.relation_gb():
                t = lead_term(Q, v)
                lt[t >> Q.mono_bits].append(t & Q.mono_mask)
            self._lt = lt
        return self._lt

    def key(self) -> tuple:
        """Canonical key: equal keys mean equal presentations (same submodule of the same free module)."""
        if self._key is None:
            red = interreduce(self.ring.Q, self.relation_gb())
            self._key = (self.degrees, tuple(tuple(sorted(v.items())) for v in red))
        return self._key

    def is_zero(self) -> bool:
        one = self.ring.Q.one
        lts = self.leading_monomials()
        return all(one in lts[k] for k in range(self.rank))

    # -- Hilbert function ---------------------------------------------------

    def _standard(self, k: int, d: int) -> int:
        """Number of standard monomials of degree d in component k."""
        if d < 0:
            return 0
        Q = self.ring.Q
        lts = self.leading_monomials()[k]
        count = 0
        for m in Q.monomials_of_degree(d):
            if not any(Q.divides(l, m) for l in lts):
                count += 1
        return count

    def hilbert_function(self, up_to: int, start: int = 0) -> list[int]:
        """dim_k of the degree-d part for d = start..up_to."""
        return [sum(self._standard(k, d - s) for k, s in enumerate(self.degrees))
                for d in range(start, up_to + 1)]

    def top_degree(self):
        """Largest degree with a nonzero piece, INFINITE if not of finite length, None if zero."""
        Q = self.ring.Q
        v = Q.nvars
        top = None
        for k, s in enumerate(self.degrees):
            lts = self.leading_monomials()[k]
            if Q.one in lts:
                continue
            bound = 0
            for i in range(v):
                powers = [Q.unpack(m)[i] for m in lts
                          if all(e == 0 for j, e in enumerate(Q.unpack(m)) if j != i)]
                if not powers:
                    return INFINITE
                bound += min(powers) - 1
            # highest degree with a standard monomial
            for d in range(bound, -1, -1):
                if self._standard(k, d):
                    top = d + s if top is None else max(top, d + s)
                    break
        return top

    def length(self):
        """Length (= k-dimension); INFINITE when not Artinian."""
        top = self.top_degree()
        if top is None:
            return 0
        if top is INFINITE:
            return INFINITE
        lo = min(self.degrees)
        return sum(self.hilbert_function(top, lo))

    def hilbert_dict(self, up_to: int | None = None) -> dict[int, int]:
        top = self.top_degree() if up_to is None else up_to
        if top is None or not self.degrees:
            return {}
        if top is INFINITE:
            raise ValueError("module has infinite length; give up_to")
        lo = min(self.degrees)
        return {d: h for d, h in zip(range(lo, top + 1), self.hilbert_function(top, lo)) if h}

    # -- sums and twists ---------------------------------------------------

    def twist(self, a: int) -> PresentedModule:
        """M(a): generator degrees decrease by a."""
        m = PresentedModule(self.ring, [d - a for d in self.degrees], self.relations, check=False)
        m._gb = self._gb
        return m

    def direct_sum_twists(self, twists: Sequence[int]) -> PresentedModule:
        """⊕_k M(a_k), reusing this module's relation basis blockwise."""
        g = self.rank
        degs = []
        rels = []
        gb = []
        own_gb = self.relation_gb()
        for b, a in enumerate(twists):
            degs.extend(d - a for d in self.degrees)
            rels.extend(shift_vec(self.ring, r, b * g) for r in self.relations)
            gb.extend(shift_vec(self.ring, r, b * g) for r in own_gb)
        return PresentedModule(self.ring, degs, rels, check=False, _gb=gb)

    def vec_degree(self, vec: dict) -> int:
        return vec_degree(self.ring.Q, self.degrees, vec)


def _poly_vec(ring: CIRing, e) -> dict:
    if isinstance(e, Polynomial):
        return ring.nf_vec(e.terms)
    if isinstance(e, dict):
        return ring.nf_vec(e)
    if isinstance(e, int):
        return ring.nf_vec(ring.Q.poly(e).terms)
    return ring.nf_vec(ring.Q.parse(e).terms)


@dataclass
class ModuleMap:
    """Degree-0 homomorphism given on generators: column k is the image of generator k."""

    source: PresentedModule
    target: PresentedModule
    matrix: list

    def __post_init__(self):
        ring = self.source.ring
        self.matrix = [ring.nf_vec(c) for c in self.matrix]
        if len(self.matrix) != self.source.rank:
            raise ValueError("map needs one column per source generator")

    def apply(self, vec: dict) -> dict:
        return apply_columns(self.source.ring, self.matrix, vec)

    def is_well_defined(self) -> bool:
        if any(c and self.target.vec_degree(c) != d for c, d in zip(self.matrix, self.source.degrees)):
            return False
        return all(not self.target.reduce(self.apply(r)) for r in self.source.relations)

    def compose(self, other: ModuleMap) -> ModuleMap:
        """self ∘ other."""
        return ModuleMap(other.source, self.target, [self.apply(c) for c in other.matrix])

    def is_zero(self) -> bool:
        return all(not self.target.reduce(c) for c in self.matrix)

    def equals(self, other: ModuleMap) -> bool:
        p = self.source.ring.p
        for a, b in zip(self.matrix, other.matrix):
            d = dict(a)
            vec_iadd(d, b, p, -1)
            if self.target.reduce(d):
                return False
        return True

    @classmethod
    def zero(cls, source: PresentedModule, target: PresentedModule) -> ModuleMap:
        return cls(source, target, [{} for _ in source.degrees])

    @classmethod
    def identity(cls, module: PresentedModule) -> ModuleMap:
        Q = module.ring.Q
        return cls(module, module, [{Q.term(k, Q.one): 1} for k in range(module.rank)])

    @classmethod
    def multiplication(cls, module: PresentedModule, g) -> ModuleMap:
        """Multiplication by a homogeneous ring element, M(-deg g) -> M."""
        ring = module.ring
        gv = _poly_vec(ring, g)
        Q = ring.Q
        dg = Q.mdeg(next(iter(gv))) if gv else 0
        src = module.twist(-dg)
        cols = [vec_mul_poly({Q.term(k, Q.one): 1}, gv, Q.p) for k in range(module.rank)]
        return cls(src, module, cols)


# -- submodules, kernels and homology ---------------------------------------------

@dataclass
class Subquotient:
    """Presentation of a submodule (of a quotient) together with its embedding data.

    ``generators`` are vectors of the ambient free cover; ``coordinates``
    expresses ambient elements of the submodule in terms of them.
    """

    module: PresentedModule
    generators: list
    ambient: PresentedModule
    _elim: object = field(default=None, repr=False)
    _split: int = 0

    def coordinates(self, vec: dict) -> dict:
        """Coefficients ``a`` with ``vec ≡ Σ a_k generators[k]`` (vec must lie in the submodule)."""
        if not self.generators:
            return {}
        if self._elim is None:
            raise ValueError("no coordinate data for this subquotient")
        ring = self.module.ring
        Q = ring.Q
        r = _reduce(Q, dict(vec), self._elim.by_comp, Q.pot_key)
        out = {}
        for t, c in r.items():
            k = t >> Q.mono_bits
            if k < self._split:
                raise ValueError("vector does not lie in the submodule")
            out[t - (self._split << Q.mono_bits)] = (-c) % Q.p
        return ring.nf_vec(out)

    def inclusion(self) -> ModuleMap:
        return ModuleMap(self.module, self.ambient, self.generators)


def _present_submodule(ambient: PresentedModule, candidates: Sequence[dict],
                       extra: Sequence[dict] = ()) -> Subquotient:
    """Presentation of the submodule of ``ambient / <extra>`` generated by ``candidates``."""
    ring = ambient.ring
    Q = ring.Q
    g = ambient.rank
    cands = [ambient.reduce(c) for c in candidates]
    extra = [e for e in (ambient.reduce(e) for e in extra) if e]
    mins = buchberger_core(Q, ambient.degrees, cands, base=extra, gb_base=ambient.relation_gb())[1]
    gens = [cands[i] for i in mins]
    if not gens:
        return Subquotient(PresentedModule.zero(ring), [], ambient)
    gdeg = [ambient.vec_degree(h) for h in gens]
    s = len(gens)
    shifts = ambient.degrees + tuple(gdeg)
    inputs = []
    for k, h in enumerate(gens):
        v = dict(h)
        v[Q.term(g + k, Q.one)] = 1
        inputs.append(v)
    gb_base = list(ambient.relation_gb())
    gb_base += [shift_vec(ring, v, g) for v in ring.f_vectors(gdeg)]
    B, _ = buchberger_core(Q, shifts, inputs, base=extra, gb_base=gb_base)
    n_base = len(gb_base)
    rel_cands = []
    for v in B.vecs[n_base:]:
        lt = lead_term(Q, v)
        if lt >> Q.mono_bits >= g:
            rel_cands.append(shift_vec(ring, v, -g))
    fgb = ring.f_vectors(gdeg)
    rmin = buchberger_core(Q, gdeg, rel_cands, gb_base=fgb)[1]
    rels = [rel_cands[i] for i in rmin]
    mod = PresentedModule(ring, gdeg, rels, check=False)
    return Subquotient(mod, gens, ambient, B, g)


def kernel_vectors(phi: ModuleMap) -> list[dict]:
    """Generators (over the source free cover) of {v : phi(v) ∈ relations of target}."""
    src, tgt = phi.source, phi.target
    ring = src.ring
    Q = ring.Q
    b = tgt.rank
    m = src.rank
    if m == 0:
        return []
    shifts = tgt.degrees + src.degrees
    inputs = []
    for k, col in enumerate(phi.matrix):
        v = dict(col)
        v[Q.term(b + k, Q.one)] = 1
        inputs.append(v)
    gb_base = list(tgt.relation_gb()) + [shift_vec(ring, v, b) for v in src.relation_gb()]
    B, _ = buchberger_core(Q, shifts, inputs, gb_base=gb_base)
    out = []
    for v in B.vecs[len(gb_base):]:
        lt = lead_term(Q, v)
        if lt >> Q.mono_bits >= b:
            out.append(shift_vec(ring, v, -b))
    return out


def kernel(phi: ModuleMap) -> tuple[PresentedModule, ModuleMap]:
    """Presentation of ker(phi) and its inclusion into the source."""
    sq = _present_submodule(phi.source, kernel_vectors(phi))
    return sq.module, sq.inclusion()


def kernel_subquotient(phi: ModuleMap) -> Subquotient:
    return _present_submodule(phi.source, kernel_vectors(phi))


def image(phi: ModuleMap) -> Subquotient:
    """Presentation of the image of phi as a submodule of the target."""
    return _present_submodule(phi.target, phi.matrix)


def homology(psi: ModuleMap, phi: ModuleMap, *, check: bool = True) -> Subquotient:
    """ker(psi)/im(phi) at the middle module source(psi) = target(phi)."""
    if check and not psi.compose(phi).is_zero():
        raise ComposeNotZero("psi ∘ phi is not zero")
    return _present_submodule(psi.source, kernel_vectors(psi), extra=phi.matrix)


def subquotient(psi: ModuleMap, phi: ModuleMap) -> PresentedModule:
    return homology(psi, phi).module


def homology_is_zero(psi: ModuleMap, phi: ModuleMap) -> bool:
    """Cheaper test: only minimal generators of the homology are computed."""
    mid = psi.source
    cands = [mid.reduce(c) for c in kernel_vectors(psi)]
    extra = [e for e in (mid.reduce(e) for e in phi.matrix) if e]
    mins = buchberger_core(mid.ring.Q, mid.degrees, cands, base=extra, gb_base=mid.relation_gb())[1]
    return not mins


def number_of_generators(psi: ModuleMap, phi: ModuleMap) -> int:
    mid = psi.source
    cands = [mid.reduce(c) for c in kernel_vectors(psi)]
    extra = [e for e in (mid.reduce(e) for e in phi.matrix) if e]
    return len(buchberger_core(mid.ring.Q, mid.degrees, cands, base=extra, gb_base=mid.relation_gb())[1])


# -- minimal presentations ----------------------------------------------------------

def minimalize(P: PresentedModule, return_map: bool = False):
    """Isomorphic presentation with no unit entries and minimal relations.

    With ``return_map`` also returns the isomorphism ``P -> P_min`` as a
    ModuleMap (images of the old generators).
    """
    ring = P.ring
    Q = ring.Q
    p = Q.p
    mb, mm, one = Q.mono_bits, Q.mono_mask, Q.one
    rels = [ring.nf_vec(r) for r in P.relations]
    rels = [r for r in rels if r]
    alive = list(range(P.rank))
    images = {k: {Q.term(k, one): 1} for k in alive}
    while True:
        pivot = None
        for j, r in enumerate(rels):
            units = sorted(t >> mb for t in r if t & mm == one)
            if units:
                pivot = (j, units[0])
                break
        if pivot is None:
            break
        j, k = pivot
        pr = rels.pop(j)
        c = pr[Q.term(k, one)]
        cinv = Q.field.inv(c)
        # e_k = -c^{-1} (pr - c e_k)
        sub = dict(pr)
        del sub[Q.term(k, one)]
        sub = {t: (-x * cinv) % p for t, x in sub.items()}

        def substitute(vec):
            a = entry(ring, vec, k)
            if not a:
                return vec
            out = {t: x for t, x in vec.items() if t >> mb != k}
            vec_iadd(out, vec_mul_poly(sub, a, p), p)
            return ring.nf_vec(out)

        rels = [r for r in (substitute(r) for r in rels) if r]
        images = {i: substitute(v) for i, v in images.items()}
        alive.remove(k)
    renum = {old: new for new, old in enumerate(alive)}

    def renumber(vec):
        return {(renum[t >> mb] << mb) | (t & mm): c for t, c in vec.items()}

    degs = [P.degrees[k] for k in alive]
    rels = [renumber(r) for r in rels]
    mins = buchberger_core(Q, degs, rels, gb_base=ring.f_vectors(degs))[1]
    out = PresentedModule(ring, degs, [rels[i] for i in mins], check=False)
    if return_map:
        return out, ModuleMap(P, out, [renumber(images[k]) for k in range(P.rank)])
    return out


def is_minimal(P: PresentedModule) -> bool:
    Q = P.ring.Q
    return all(t & Q.mono_mask != Q.one for r in P.relations for t in r)


# -- ideals and Rees families ------------------------------------------------------

class IdealSpec:
    """Homogeneous ideal of A given by a minimal set of normal-formed generators."""

    def __init__(self, ring: CIRing, generators: Sequence):
        self.ring = ring
        Q = ring.Q
        vecs = [_poly_vec(ring, g) for g in generators]
        vecs = [v for v in vecs if v]
        for v in vecs:
            if len({Q.mdeg(t) for t in v}) != 1:
                raise NotHomogeneous("ideal generators must be homogeneous")
        mins = buchberger_core(Q, (0,), vecs, gb_base=ring.gb_f.generators)[1] if vecs else []
        self.generators = [Polynomial(Q, vecs[i]) for i in mins]

    @property
    def r(self) -> int:
        return len(self.generators)

    def __repr__(self):
        return "IdealSpec([" + ", ".join(str(g) for g in self.generators) + "])"

    def is_proper(self) -> bool:
        return all(self.ring.Q.mdeg(next(iter(g.terms))) > 0 for g in self.generators)

    def require_proper(self) -> None:
        if not self.is_proper():
            raise ImproperIdeal(f"{self} is the unit ideal")

    def power(self, n: int) -> list[Polynomial]:
        """Minimal generators of I^n (I^0 = A)."""
        ring = self.ring
        Q = ring.Q
        if n == 0:
            return [Q.poly(1)]
        prods = []
        for combo in itertools.combinations_with_replacement(range(self.r), n):
            v = {Q.one: 1}
            for i in combo:
                v = vec_mul_poly(v, self.generators[i].terms, Q.p)
            v = ring.nf_vec(v)
            if v:
                prods.append(v)
        if not prods:
            return []
        mins = buchberger_core(Q, (0,), prods, gb_base=ring.gb_f.generators)[1]
        return [Polynomial(Q, prods[i]) for i in mins]

    def quotient_ring(self) -> PresentedModule:
        return PresentedModule.cyclic(self.ring, self.generators)


def _power_times_gens(N: PresentedModule, I: IdealSpec, n: int) -> list[dict]:
    Q = N.ring.Q
    out = []
    for g in I.power(n):
        for k in range(N.rank):
            out.append(N.ring.nf_vec(vec_mul_poly({Q.term(k, Q.one): 1}, g.terms, Q.p)))
    return [v for v in out if v]


def rees_family(N: PresentedModule, I: IdealSpec, n: int, kind: str) -> PresentedModule:
    """N/I^nN (quot), I^nN (power) or I^nN/I^{n+1}N (graded_piece); I^0 N = N."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if kind == QUOT:
        rels = list(N.relations) + _power_times_gens(N, I, n)
        return minimalize(PresentedModule(N.ring, N.degrees, rels, check=False))
    if kind == POWER:
        if n == 0:
            return N
        return _present_submodule(N, _power_times_gens(N, I, n)).module
    if kind == GRADED_PIECE:
        upper = PresentedModule(N.ring, N.degrees,
                                list(N.relations) + _power_times_gens(N, I, n + 1), check=False)
        return _present_submodule(upper, _power_times_gens(N, I, n)).module
    raise ValueError(f"unknown family kind {kind!r}")
