"""Prime field arithmetic and dense exact linear algebra mod p."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionMismatch, ZeroInverse

DEFAULT_PRIME = 101

# products of two residues must fit in int64
MAX_PRIME = 2**31


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


@lru_cache(maxsize=None)
def inverse_table(p: int) -> tuple[int, ...]:
    """Multiplicative inverses of 0..p-1 (entry 0 is a placeholder 0)."""
    inv = [0, 1] + [0] * (p - 2)
    for a in range(2, p):
        inv[a] = (p - (p // a) * inv[p % a] % p) % p
    return tuple(inv)


class PrimeField:
    """The field F_p; one instance per engine session."""

    def __init__(self, p: int = DEFAULT_PRIME):
        if not is_prime(p):
            raise ValueError(f"modulus {p} is not prime")
        if p >= MAX_PRIME:
            raise ValueError(f"modulus {p} too large for single-word arithmetic")
        self.p = p
        self._inv = inverse_table(p) if p < 1 << 16 else None

    def __repr__(self):
        return f"PrimeField({self.p})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("F", self.p))

    def __call__(self, value: int) -> FieldElement:
        return FieldElement(value % self.p, self.p)

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroInverse("0 has no inverse")
        if self._inv is not None:
            return self._inv[a]
        return pow(a, self.p - 2, self.p)


@dataclass(frozen=True)
class FieldElement:
    value: int
    modulus: int

    def __post_init__(self):
        if not 0 <= self.value < self.modulus:
            raise ValueError("field element not reduced")

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.modulus != self.modulus:
                raise ValueError("mixed moduli")
            return other.value
        if isinstance(other, int):
            return other % self.modulus
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement((self.value + o) % self.modulus, self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement((self.value - o) % self.modulus, self.modulus)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement((o - self.value) % self.modulus, self.modulus)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.value * o % self.modulus, self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(-self.value % self.modulus, self.modulus)

    def inv(self) -> FieldElement:
        return FieldElement(inv(self), self.modulus)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * FieldElement(o, self.modulus).inv()

    def __int__(self):
        return self.value


def inv(a: FieldElement) -> int:
    if a.value == 0:
        raise ZeroInverse("0 has no inverse")
    return pow(a.value, a.modulus - 2, a.modulus)


def as_matrix(rows, p: int) -> np.ndarray:
    M = np.array(rows, dtype=np.int64)
    if M.ndim == 1:
        M = M.reshape(1, -1) if M.size else M.reshape(0, 0)
    return M % p


def rref(M, p: int) -> tuple[np.ndarray, list[int], int]:
    """Reduced row echelon form of ``M`` over F_p.

    Returns ``(R, pivots, rank)``; ``R`` has the same shape as ``M``.
    """
    R = np.array(M, dtype=np.int64, copy=True) % p
    if R.ndim != 2:
        raise DimensionMismatch("rref expects a 2-d matrix")
    rows, cols = R.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            R[[r, k]] = R[[k, r]]
        R[r] = R[r] * pow(int(R[r, c]), p - 2, p) % p
        col = R[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col)[0]
        if nzr.size:
            R[nzr] = (R[nzr] - np.outer(col[nzr], R[r])) % p
        pivots.append(c)
        r += 1
    return R, pivots, len(pivots)


def rank(M, p: int) -> int:
    M = np.asarray(M)
    if M.size == 0:
        return 0
    # eliminate along the shorter side
    if M.shape[0] > M.shape[1]:
        M = M.T
    return rref(M, p)[2]


def kernel_basis(M, p: int) -> np.ndarray:
    """Columns spanning the right kernel of ``M`` over F_p."""
    M = np.asarray(M, dtype=np.int64)
    rows, cols = M.shape
    if rows == 0:
        return np.eye(cols, dtype=np.int64)
    R, pivots, rk = rref(M, p)
    free = [c for c in range(cols) if c not in set(pivots)]
    K = np.zeros((cols, len(free)), dtype=np.int64)
    for j, fc in enumerate(free):
        K[fc, j] = 1
        for i, pc in enumerate(pivots):
            K[pc, j] = (-R[i, fc]) % p
    return K


def solve_in_span(basis_cols, target, p: int):
    """Coefficients ``x`` with ``basis_cols @ x == target`` mod p, or None."""
    B = np.asarray(basis_cols, dtype=np.int64)
    t = np.asarray(target, dtype=np.int64).reshape(-1, 1)
    aug = np.hstack([B, t]) % p
    R, pivots, _ = rref(aug, p)
    if pivots and pivots[-1] == B.shape[1]:
        return None
    x = np.zeros(B.shape[1], dtype=np.int64)
    for i, pc in enumerate(pivots):
        x[pc] = R[i, -1]
    return x
