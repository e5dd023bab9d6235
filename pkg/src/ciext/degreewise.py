"""Dense degree-by-degree linear algebra over A.

Everything here only uses normal forms modulo (f) and rank computations
mod p, never a module Groebner basis, so it serves as an independent check
on kernels, homology and Hilbert functions.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .ci_ring import CIRing
from .linalg import rank
from .polyring import vec_mul_poly


def standard_monomials(ring: CIRing, d: int) -> list[int]:
    """Monomials of degree d not in LT(f); a k-basis of A_d."""
    key = ("std", d)
    got = ring.cache.get(key)
    if got is None:
        Q = ring.Q
        leads = [lt for lt, _ in ring._f_index]
        got = [] if d < 0 else [m for m in Q.monomials_of_degree(d)
                                 if not any(Q.divides(l, m) for l in leads)]
        ring.cache[key] = got
    return got


def free_basis(ring: CIRing, degrees: Sequence[int], d: int) -> list[int]:
    Q = ring.Q
    return [Q.term(k, m) for k, s in enumerate(degrees) for m in standard_monomials(ring, d - s)]


def coordinates(basis_index: dict, vec: dict, n: int, p: int) -> np.ndarray:
    out = np.zeros(n, dtype=np.int64)
    for t, c in vec.items():
        out[basis_index[t]] = c % p
    return out


def map_matrix(ring: CIRing, src_degrees: Sequence[int], tgt_degrees: Sequence[int],
               cols: Sequence[dict], d: int) -> np.ndarray:
    """Matrix of the free-module map in degree d (rows: target basis)."""
    Q = ring.Q
    tb = free_basis(ring, tgt_degrees, d)
    index = {t: n for n, t in enumerate(tb)}
    sb = free_basis(ring, src_degrees, d)
    M = np.zeros((len(tb), len(sb)), dtype=np.int64)
    for j, t in enumerate(sb):
        img = ring.nf_vec(vec_mul_poly(cols[t >> Q.mono_bits], {t & Q.mono_mask: 1}, Q.p))
        M[:, j] = coordinates(index, img, len(tb), Q.p)
    return M


def relation_matrix(module, d: int) -> np.ndarray:
    """Columns spanning the degree-d part of the relation submodule."""
    ring = module.ring
    Q = ring.Q
    tb = free_basis(ring, module.degrees, d)
    index = {t: n for n, t in enumerate(tb)}
    cols = []
    for r in module.relations:
        e = module.vec_degree(r)
        for m in standard_monomials(ring, d - e):
            img = ring.nf_vec(vec_mul_poly(r, {m: 1}, Q.p))
            cols.append(coordinates(index, img, len(tb), Q.p))
    if not cols:
        return np.zeros((len(tb), 0), dtype=np.int64)
    return np.stack(cols, axis=1)


def _rank(M, p):
    return rank(M, p) if M.size else 0


def module_dim(module, d: int) -> int:
    n = len(free_basis(module.ring, module.degrees, d))
    return n - _rank(relation_matrix(module, d), module.ring.p)


def homology_dim(psi, phi, d: int) -> int:
    """dim_k of (ker psi / im phi) in degree d, by ranks of dense matrices."""
    mid, tgt = psi.source, psi.target
    ring = mid.ring
    p = ring.p
    n_mid = len(free_basis(ring, mid.degrees, d))
    R_mid = relation_matrix(mid, d)
    R_tgt = relation_matrix(tgt, d)
    r_mid = _rank(R_mid, p)
    r_tgt = _rank(R_tgt, p)
    P = map_matrix(ring, mid.degrees, tgt.degrees, psi.matrix, d)
    rk_psi = _rank(np.hstack([P, R_tgt]), p) - r_tgt
    dim_ker = n_mid - rk_psi - r_mid
    Phi = map_matrix(ring, phi.source.degrees, mid.degrees, phi.matrix, d)
    dim_im = _rank(np.hstack([Phi, R_mid]), p) - r_mid
    return dim_ker - dim_im
