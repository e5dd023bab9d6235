"""Minimal free resolutions over A, Eisenbud operators, Ext and depth-type invariants."""

from __future__ import annotations

import itertools
import random
import threading
from dataclasses import dataclass
from typing import Sequence

from .ci_ring import CIRing
from .errors import EngineConsistencyError, LiftFailure
from .groebner import buchberger_core, divide
from .modules import (INFINITE, IdealSpec, ModuleMap, PresentedModule, Subquotient,
                      apply_columns, homology, homology_is_zero, kernel_vectors, minimalize,
                      number_of_generators)
from .polyring import Polynomial, vec_iadd, vec_mul_poly


def zero_map(source: PresentedModule, target: PresentedModule) -> ModuleMap:
    return ModuleMap(source, target, [{} for _ in source.degrees])


class FreeResolution:
    """Minimal graded free resolution F_i of a module, extended on demand.

    ``degrees(i)`` are the generator degrees of F_i and ``columns(i)`` the
    columns of d_i : F_i -> F_{i-1} (i >= 1), normal-formed over A.
    """

    def __init__(self, module: PresentedModule):
        self.ring = module.ring
        self.module = minimalize(module)
        self._degrees: list[tuple[int, ...]] = [self.module.degrees]
        self._cols: list[list[dict]] = [[]]
        self.minimal = True
        self._lock = threading.RLock()
        self._append(self.module.relations)

    def _append(self, cols: list[dict]) -> None:
        prev = self._degrees[-1]
        degs = tuple(PresentedModule.free(self.ring, prev).vec_degree(c) for c in cols)
        self._cols.append(cols)
        self._degrees.append(degs)

    @property
    def length(self) -> int:
        """Number of computed steps (F_0 .. F_length are known)."""
        return len(self._degrees) - 1

    def extend(self, upto: int) -> FreeResolution:
        with self._lock:
            ring = self.ring
            while self.length < upto:
                i = self.length
                src = PresentedModule.free(ring, self._degrees[i])
                tgt = PresentedModule.free(ring, self._degrees[i - 1])
                phi = ModuleMap(src, tgt, self._cols[i])
                cands = [ring.nf_vec(v) for v in kernel_vectors(phi)] if self._cols[i] else []
                cands = [v for v in cands if v]
                mins = buchberger_core(ring.Q, src.degrees, cands, gb_base=src.relation_gb())[1] if cands else []
                self._append([cands[k] for k in mins])
        return self

    def degrees(self, i: int) -> tuple[int, ...]:
        if i < 0:
            return ()
        self.extend(i)
        return self._degrees[i]

    def betti(self, i: int) -> int:
        return len(self.degrees(i))

    def columns(self, i: int) -> list[dict]:
        """Columns of d_i : F_i -> F_{i-1}; empty for i = 0."""
        if i <= 0:
            return []
        self.extend(i)
        return self._cols[i]

    def free(self, i: int) -> PresentedModule:
        return PresentedModule.free(self.ring, self.degrees(i))

    def differential(self, i: int) -> ModuleMap:
        return ModuleMap(self.free(i), self.free(i - 1), self.columns(i))

    def is_complex(self, upto: int) -> bool:
        ring = self.ring
        for i in range(2, upto + 1):
            for c in self.columns(i):
                if apply_columns(ring, self.columns(i - 1), c):
                    return False
        return True

    def has_unit_entries(self, upto: int) -> bool:
        Q = self.ring.Q
        return any(t & Q.mono_mask == Q.one for i in range(1, upto + 1)
                   for c in self.columns(i) for t in c)

    @property
    def projective_dimension(self):
        """Length of the resolution if it has terminated among computed steps, else None."""
        for i, d in enumerate(self._degrees[1:], start=1):
            if not d:
                return i - 1
        return None


def resolution(M: PresentedModule) -> FreeResolution:
    """Cached resolution of M (one per presentation)."""
    ring = M.ring
    key = ("res", M.key())
    with ring.lock:
        R = ring.cache.get(key)
        if R is None:
            R = ring.cache[key] = FreeResolution(M)
    return R


def extend_resolution(M: PresentedModule, upto: int) -> FreeResolution:
    if upto < 0:
        raise ValueError("upto must be non-negative")
    return resolution(M).extend(upto)


# -- Eisenbud operators ---------------------------------------------------------------

def _random_poly(ring: CIRing, d: int, rng: random.Random) -> dict:
    Q = ring.Q
    out = {m: rng.randrange(Q.p) for m in Q.monomials_of_degree(d)}
    return {m: c for m, c in out.items() if c}


class EisenbudOperators:
    """Lifts of the differentials to Q and the operators t_{j,i}: F_{i+2} -> F_i.

    ``perturb_seed`` replaces each lifted d_i by d_i + f_1 * R with a random
    homogeneous R; the induced maps on Ext do not depend on this choice.
    """

    def __init__(self, res: FreeResolution, perturb_seed: int | None = None):
        self.res = res
        self.ring = res.ring
        self.c = self.ring.c
        self.perturb_seed = perturb_seed
        self._lifted: dict[int, list[dict]] = {}
        self._t: dict[int, list[list[dict]]] = {}
        self._t_lift: dict[int, list[list[dict]]] = {}
        self._lock = threading.RLock()

    def lifted(self, i: int) -> list[dict]:
        """Columns of d~_i over Q."""
        with self._lock:
            got = self._lifted.get(i)
            if got is None:
                cols = [dict(c) for c in self.res.columns(i)]
                if self.perturb_seed is not None and self.c:
                    cols = self._perturb(i, cols)
                got = self._lifted[i] = cols
            return got

    def _perturb(self, i: int, cols: list[dict]) -> list[dict]:
        ring = self.ring
        Q = ring.Q
        rng = random.Random(self.perturb_seed * 1000003 + i)
        f1 = ring.f[0].terms
        e1 = Q.mdeg(next(iter(f1)))
        tdeg = self.res.degrees(i - 1)
        sdeg = self.res.degrees(i)
        out = []
        for c, b in zip(cols, sdeg):
            c = dict(c)
            for k, a in enumerate(tdeg):
                e = b - a - e1
                if e >= 0:
                    r = vec_mul_poly(_random_poly(ring, e, rng), f1, Q.p)
                    vec_iadd(c, r, Q.p, 1, k << Q.mono_bits)
            out.append(c)
        return out

    def _compute(self, i: int) -> None:
        ring = self.ring
        Q = ring.Q
        p = Q.p
        mb, mm = Q.mono_bits, Q.mono_mask
        upper = self.lifted(i + 2)
        lower = self.lifted(i + 1) if i + 1 >= 1 else []
        gbf = ring.gb_f.generators
        lifts = [[] for _ in range(self.c)]
        for col in upper:
            w: dict = {}
            for t, x in col.items():
                vec_iadd(w, lower[t >> mb], p, x, t & mm)
            comps: dict = {}
            for t, x in w.items():
                comps.setdefault(t >> mb, {})[t & mm] = x
            tcols = [dict() for _ in range(self.c)]
            for k, poly in comps.items():
                dr = divide(poly, gbf, Q)
                if dr.remainder:
                    raise LiftFailure(f"d~{i + 1} d~{i + 2} has an entry outside (f)")
                for q, coeffs in zip(dr.quotients, ring.f_lift):
                    if not q:
                        continue
                    for j in range(self.c):
                        if coeffs[j]:
                            vec_iadd(tcols[j], vec_mul_poly(q, coeffs[j], p), p, 1, k << mb)
            for j in range(self.c):
                lifts[j].append(tcols[j])
        self._t_lift[i] = lifts
        self._t[i] = [[ring.nf_vec(c) for c in cols] for cols in lifts]

    def t(self, j: int, i: int) -> list[dict]:
        """Columns of t_{j,i} : F_{i+2} -> F_i over A (j is 1-based)."""
        with self._lock:
            if i not in self._t:
                self._compute(i)
            return self._t[i][j - 1]

    def t_lift(self, j: int, i: int) -> list[dict]:
        with self._lock:
            if i not in self._t:
                self._compute(i)
            return self._t_lift[i][j - 1]

    def t_degree(self, j: int) -> int:
        """Internal degree by which t_j lowers: deg f_j."""
        Q = self.ring.Q
        return Q.mdeg(next(iter(self.ring.f[j - 1].terms)))

    def check_identity(self, i: int) -> bool:
        """d~_{i+1} d~_{i+2} == sum_j f_j t~_{j,i} as matrices over Q."""
        ring = self.ring
        Q = ring.Q
        p = Q.p
        mb, mm = Q.mono_bits, Q.mono_mask
        lower = self.lifted(i + 1)
        for n, col in enumerate(self.lifted(i + 2)):
            w: dict = {}
            for t, x in col.items():
                vec_iadd(w, lower[t >> mb], p, x, t & mm)
            for j in range(1, self.c + 1):
                vec_iadd(w, vec_mul_poly(self.t_lift(j, i)[n], ring.f[j - 1].terms, p), p, -1)
            if w:
                return False
        return True

    def check_chain_map(self, i: int) -> bool:
        """d_i t_{j,i} == t_{j,i-1} d_{i+2} over A for every j (i >= 1)."""
        ring = self.ring
        for j in range(1, self.c + 1):
            left = [apply_columns(ring, self.res.columns(i), c) for c in self.t(j, i)]
            right = [apply_columns(ring, self.t(j, i - 1), c) for c in self.res.columns(i + 2)]
            if left != right:
                return False
        return True


def eisenbud_operators(res: FreeResolution, perturb_seed: int | None = None) -> EisenbudOperators:
    return EisenbudOperators(res, perturb_seed)


# -- Hom complexes and Ext -------------------------------------------------------------

def _dual_columns(ring: CIRing, cols: Sequence[dict], n_src: int, rank_d: int) -> list[dict]:
    """Columns of Hom(g, D) : Hom(F, D) -> Hom(G, D) for g : G -> F given by ``cols``.

    Generator (k, g) of Hom(F, D) = D^{rank F} maps to sum_k' g_{k,k'} e_(k', g).
    """
    Q = ring.Q
    mb, mm = Q.mono_bits, Q.mono_mask
    out = [dict() for _ in range(n_src * rank_d)]
    for kp, col in enumerate(cols):
        for t, x in col.items():
            k = t >> mb
            m = t & mm
            for g in range(rank_d):
                out[k * rank_d + g][((kp * rank_d + g) << mb) | m] = x
    return out


class HomComplex:
    """Hom(F_., D) with C^i = D^{beta_i} suitably twisted."""

    def __init__(self, res: FreeResolution, D: PresentedModule):
        self.res = res
        self.D = D
        self.ring = res.ring
        self._mods: dict[int, PresentedModule] = {}
        self._lock = threading.RLock()

    def module(self, i: int) -> PresentedModule:
        if i < 0:
            return PresentedModule.zero(self.ring)
        with self._lock:
            m = self._mods.get(i)
            if m is None:
                m = self._mods[i] = self.D.direct_sum_twists(self.res.degrees(i))
            return m

    def delta(self, i: int) -> ModuleMap:
        """delta^i : C^i -> C^{i+1}, phi -> phi o d_{i+1}."""
        src, tgt = self.module(i), self.module(i + 1)
        if i < 0:
            return zero_map(src, tgt)
        cols = _dual_columns(self.ring, self.res.columns(i + 1), self.res.betti(i), self.D.rank)
        return ModuleMap(src, tgt, cols)

    def pullback(self, cols: Sequence[dict], i: int, shift: int) -> ModuleMap:
        """Hom(t, D) : C^i(shift) -> C^{i+2} for t : F_{i+2} -> F_i."""
        src = self.module(i).twist(shift)
        return ModuleMap(src, self.module(i + 2),
                         _dual_columns(self.ring, cols, self.res.betti(i), self.D.rank))


def hom_complex(M: PresentedModule, D: PresentedModule) -> HomComplex:
    ring = M.ring
    key = ("hom", M.key(), D.key())
    with ring.lock:
        H = ring.cache.get(key)
        if H is None:
            H = ring.cache[key] = HomComplex(resolution(M), D)
    return H


@dataclass
class ExtModule:
    i: int
    M: PresentedModule
    D: PresentedModule
    value: PresentedModule
    sub: Subquotient

    def length(self):
        return self.value.length()


def ext(M: PresentedModule, D: PresentedModule, i: int) -> ExtModule:
    """Ext^i_A(M, D) with a minimal presentation."""
    if i < 0:
        raise ValueError("i must be non-negative")
    ring = M.ring
    key = ("ext", M.key(), D.key(), i)
    got = ring.cache.get(key)
    if got is None:
        H = hom_complex(M, D)
        sub = homology(H.delta(i), H.delta(i - 1), check=False)
        got = ExtModule(i, M, D, sub.module, sub)
        ring.cache[key] = got
    return got


def ext_is_zero(M: PresentedModule, D: PresentedModule, i: int) -> bool:
    ring = M.ring
    key = ("ext0", M.key(), D.key(), i)
    got = ring.cache.get(key)
    if got is None:
        full = ring.cache.get(("ext", M.key(), D.key(), i))
        if full is not None:
            got = full.value.is_zero()
        else:
            H = hom_complex(M, D)
            got = homology_is_zero(H.delta(i), H.delta(i - 1))
        ring.cache[key] = got
    return got


def ext_generators(M: PresentedModule, D: PresentedModule, i: int) -> int:
    """Minimal number of generators of Ext^i_A(M, D)."""
    H = hom_complex(M, D)
    return number_of_generators(H.delta(i), H.delta(i - 1))


def t_action(E: EisenbudOperators, D: PresentedModule, j: int, i: int) -> ModuleMap:
    """The map Ext^i(M, D) -> Ext^{i+2}(M, D) induced by t_j.

    The source is Ext^i twisted so the map has internal degree zero.
    """
    M = E.res.module
    H = HomComplex(E.res, D)
    src = ext(M, D, i)
    tgt = ext(M, D, i + 2)
    T = H.pullback(E.t(j, i), i, E.t_degree(j))
    cols = [tgt.sub.coordinates(T.apply(h)) for h in src.sub.generators]
    return ModuleMap(src.value.twist(E.t_degree(j)), tgt.value, cols)


# -- depth, grade, Bass numbers ---------------------------------------------------------

def residue_field(ring: CIRing) -> PresentedModule:
    key = ("k",)
    got = ring.cache.get(key)
    if got is None:
        got = ring.cache[key] = PresentedModule.residue_field(ring)
    return got


def bass(j: int, E: PresentedModule) -> int:
    """mu_j(m, E) = dim_k Ext^j(k, E); Ext^j(k, E) is killed by m so this is its generator count."""
    if j < 0:
        raise ValueError("j must be non-negative")
    if E.is_zero():
        return 0
    k = residue_field(E.ring)
    key = ("bass", E.key(), j)
    got = E.ring.cache.get(key)
    if got is None:
        got = E.ring.cache[key] = ext_generators(k, E, j)
    return got


def _first_nonvanishing(M: PresentedModule, E: PresentedModule):
    if E.is_zero():
        return INFINITE
    v = E.ring.v
    for l in range(v + 1):
        if not ext_is_zero(M, E, l):
            return l
    raise EngineConsistencyError(f"no nonzero Ext^l for l <= {v} on a nonzero module")


def depth(E: PresentedModule):
    """min{l : Ext^l(k, E) != 0}; INFINITE for the zero module."""
    return _first_nonvanishing(residue_field(E.ring), E)


def grade(J: IdealSpec, E: PresentedModule):
    """min{l : Ext^l(A/J, E) != 0}; INFINITE for the zero module."""
    J.require_proper()
    return _first_nonvanishing(J.quotient_ring(), E)


def koszul_complex(gens: Sequence[Polynomial], E: PresentedModule) -> list[ModuleMap]:
    """Maps d_q : K_q -> K_{q-1} for q = 0..s+1 (d_0 and d_{s+1} are zero maps)."""
    ring = E.ring
    Q = ring.Q
    p = Q.p
    gv = [ring.nf_vec(g.terms if isinstance(g, Polynomial) else ring.poly(g).terms) for g in gens]
    gdeg = [Q.mdeg(next(iter(g))) if g else 0 for g in gv]
    s = len(gv)
    r = E.rank
    subsets = [list(itertools.combinations(range(s), q)) for q in range(s + 1)]
    mods = [E.direct_sum_twists([-sum(gdeg[x] for x in S) for S in subsets[q]]) for q in range(s + 1)]
    maps = [zero_map(mods[0], PresentedModule.zero(ring))]
    for q in range(1, s + 1):
        index = {S: n for n, S in enumerate(subsets[q - 1])}
        cols = []
        for S in subsets[q]:
            for g in range(r):
                col: dict = {}
                for pos, x in enumerate(S):
                    rest = S[:pos] + S[pos + 1:]
                    sign = 1 if pos % 2 == 0 else -1
                    vec_iadd(col, gv[x], p, sign, (index[rest] * r + g) << Q.mono_bits)
                cols.append(col)
        maps.append(ModuleMap(mods[q], mods[q - 1], cols))
    maps.append(zero_map(PresentedModule.zero(ring), mods[s]))
    return maps


def koszul_homology_is_zero(gens, E: PresentedModule, q: int) -> bool:
    maps = koszul_complex(gens, E)
    return homology_is_zero(maps[q], maps[q + 1])


def koszul_depth(gens: Sequence, E: PresentedModule) -> int:
    """s - max{q : H_q(gens; E) != 0}; s when all Koszul homology vanishes."""
    maps = koszul_complex(gens, E)
    s = len(maps) - 2
    for q in range(s, -1, -1):
        if not homology_is_zero(maps[q], maps[q + 1]):
            return s - q
    return s


def koszul_depth_or_inf(gens: Sequence, E: PresentedModule):
    return INFINITE if E.is_zero() else koszul_depth(gens, E)


def socle_dimension(E: PresentedModule) -> int:
    return bass(0, E)


__all__ = [
    "FreeResolution", "EisenbudOperators", "ExtModule", "HomComplex", "resolution",
    "extend_resolution", "eisenbud_operators", "ext", "ext_is_zero", "ext_generators",
    "t_action", "bass", "depth", "grade", "koszul_depth", "koszul_depth_or_inf", "koszul_complex",
    "residue_field",
]
