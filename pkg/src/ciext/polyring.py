"""Polynomials over F_p and terms of graded free modules.

Monomials are packed into Python ints: variable ``k`` occupies the 17-bit
field ``k`` (16 value bits plus a guard bit used for divisibility tests),
and field ``v`` holds the total degree. A free-module term is
``component << MONO_BITS | monomial``, so ring elements are simply the
component-0 case. Vectors are dicts ``{term: coeff}`` with nonzero
coefficients reduced mod p.
"""

from __future__ import annotations

import math
import re
from enum import Enum
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import DimensionMismatch, ExponentOverflow
from .linalg import DEFAULT_PRIME, PrimeField

FIELD_BITS = 17
EXP_MASK = (1 << 16) - 1
MAX_EXP = EXP_MASK
_CMAX = 1 << 24


class MonomialOrder(str, Enum):
    GREVLEX = "grevlex"
    LEX = "lex"


class _KeyCache(dict):
    def __init__(self, fn):
        super().__init__()
        self.fn = fn

    def __missing__(self, k):
        v = self[k] = self.fn(k)
        return v


class PolyRing:
    """F_p[x_1..x_v] with a fixed monomial order."""

    def __init__(self, variables: Sequence[str], p: int = DEFAULT_PRIME,
                 order: MonomialOrder | str = MonomialOrder.GREVLEX):
        if len(set(variables)) != len(variables):
            raise ValueError("duplicate variable names")
        self.field = PrimeField(p)
        self.p = p
        self.variables = tuple(variables)
        self.nvars = v = len(variables)
        self.order = MonomialOrder(order)
        self.mono_bits = FIELD_BITS * (v + 1)
        self.top = 1 << self.mono_bits
        self.mono_mask = self.top - 1
        self.guard = sum(1 << (FIELD_BITS * k + 16) for k in range(v + 1))
        self._deg_shift = FIELD_BITS * v
        self._allmax = sum(MAX_EXP << (FIELD_BITS * k) for k in range(v))
        self._var_index = {name: k for k, name in enumerate(self.variables)}
        self.mono_key = _KeyCache(self._mono_key)
        self.pot_key = _KeyCache(self._pot_key)
        self.one = self.pack((0,) * v)

    def __repr__(self):
        return f"PolyRing({list(self.variables)}, p={self.p}, order={self.order.value})"

    # -- monomials ---------------------------------------------------------

    def pack(self, exps: Sequence[int]) -> int:
        if len(exps) != self.nvars:
            raise DimensionMismatch(f"expected {self.nvars} exponents, got {len(exps)}")
        m = 0
        d = 0
        for k, e in enumerate(exps):
            if e < 0:
                raise ValueError("negative exponent")
            if e > MAX_EXP:
                raise ExponentOverflow(f"exponent {e} exceeds {MAX_EXP}")
            m |= e << (FIELD_BITS * k)
            d += e
        if d > MAX_EXP:
            raise ExponentOverflow(f"degree {d} exceeds {MAX_EXP}")
        return m | (d << self._deg_shift)

    def unpack(self, mono: int) -> tuple[int, ...]:
        return tuple((mono >> (FIELD_BITS * k)) & EXP_MASK for k in range(self.nvars))

    def mdeg(self, term: int) -> int:
        return (term >> self._deg_shift) & EXP_MASK

    def var(self, k: int) -> int:
        e = [0] * self.nvars
        e[k] = 1
        return self.pack(e)

    def mono_mul(self, a: int, b: int) -> int:
        c = a + b
        if c & self.guard:
            raise ExponentOverflow("monomial exponent overflow")
        return c

    def divides(self, a: int, b: int) -> bool:
        """Whether term ``a`` divides term ``b`` (same component required)."""
        d = (b | self.guard) - a
        return 0 <= d < self.top and d & self.guard == self.guard

    def mono_lcm(self, a: int, b: int) -> int:
        m = 0
        d = 0
        for k in range(self.nvars):
            s = FIELD_BITS * k
            e = max((a >> s) & EXP_MASK, (b >> s) & EXP_MASK)
            m |= e << s
            d += e
        return m | (d << self._deg_shift)

    def coprime(self, a: int, b: int) -> bool:
        for k in range(self.nvars):
            s = FIELD_BITS * k
            if (a >> s) & EXP_MASK and (b >> s) & EXP_MASK:
                return False
        return True

    def _mono_key(self, mono: int) -> int:
        if self.order is MonomialOrder.GREVLEX:
            d = (mono >> self._deg_shift) & EXP_MASK
            low = mono & ((1 << self._deg_shift) - 1)
            return (d << self._deg_shift) + self._allmax - low
        key = 0
        for e in self.unpack(mono):
            key = (key << FIELD_BITS) | e
        return key

    def _pot_key(self, term: int) -> int:
        # position over term, earlier component larger
        comp = term >> self.mono_bits
        return ((_CMAX - comp) << (self.mono_bits + FIELD_BITS)) | self.mono_key[term & self.mono_mask]

    def compare(self, a, b) -> int:
        """-1, 0 or 1 comparing monomials (packed ints, tuples or Monomial)."""
        a, b = self._as_mono(a), self._as_mono(b)
        ka, kb = self.mono_key[a], self.mono_key[b]
        return (ka > kb) - (ka < kb)

    def _as_mono(self, m) -> int:
        if isinstance(m, Monomial):
            m = m.exponents
        if isinstance(m, int):
            return m
        return self.pack(tuple(m))

    def mono_str(self, mono: int) -> str:
        parts = []
        for name, e in zip(self.variables, self.unpack(mono)):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        return "*".join(parts) if parts else "1"

    # -- terms of free modules --------------------------------------------

    def term(self, comp: int, mono: int) -> int:
        return (comp << self.mono_bits) | mono

    def comp(self, term: int) -> int:
        return term >> self.mono_bits

    # -- polynomials -------------------------------------------------------

    def poly(self, terms: dict | int | str | None = None) -> Polynomial:
        if terms is None:
            return Polynomial(self, {})
        if isinstance(terms, str):
            return self.parse(terms)
        if isinstance(terms, int):
            c = terms % self.p
            return Polynomial(self, {self.one: c} if c else {})
        return Polynomial(self, {m: c % self.p for m, c in terms.items() if c % self.p})

    def gens(self) -> list[Polynomial]:
        return [Polynomial(self, {self.var(k): 1}) for k in range(self.nvars)]

    def parse(self, text: str) -> Polynomial:
        return Polynomial(self, parse_poly(self, text))

    def monomials_of_degree(self, d: int) -> list[int]:
        return [self.pack(e) for e in _exponent_vectors(self.nvars, d)]


@lru_cache(maxsize=None)
def _exponent_vectors(v: int, d: int) -> tuple[tuple[int, ...], ...]:
    if v == 0:
        return ((),) if d == 0 else ()
    if v == 1:
        return ((d,),)
    out = []
    for e in range(d, -1, -1):
        for rest in _exponent_vectors(v - 1, d - e):
            out.append((e,) + rest)
    return tuple(out)


class Monomial:
    """Exponent vector with cached total degree."""

    __slots__ = ("exponents", "degree")

    def __init__(self, exponents: Iterable[int]):
        self.exponents = tuple(exponents)
        if any(e < 0 for e in self.exponents):
            raise ValueError("negative exponent")
        if any(e > MAX_EXP for e in self.exponents):
            raise ExponentOverflow("exponent exceeds 16 bits")
        self.degree = sum(self.exponents)

    def __eq__(self, other):
        return isinstance(other, Monomial) and other.exponents == self.exponents

    def __hash__(self):
        return hash(self.exponents)

    def __mul__(self, other):
        if len(other.exponents) != len(self.exponents):
            raise DimensionMismatch("monomials in different rings")
        return Monomial(a + b for a, b in zip(self.exponents, other.exponents))

    def __repr__(self):
        return f"Monomial({self.exponents})"


def compare(a: Monomial, b: Monomial, order: MonomialOrder | str = MonomialOrder.GREVLEX) -> int:
    if len(a.exponents) != len(b.exponents):
        raise DimensionMismatch("monomials with different variable counts")
    order = MonomialOrder(order)
    if order is MonomialOrder.GREVLEX:
        if a.degree != b.degree:
            return 1 if a.degree > b.degree else -1
        for x, y in zip(reversed(a.exponents), reversed(b.exponents)):
            if x != y:
                return 1 if x < y else -1
        return 0
    for x, y in zip(a.exponents, b.exponents):
        if x != y:
            return 1 if x > y else -1
    return 0


NOT_HOMOGENEOUS = type("NotHomogeneousType", (), {"__repr__": lambda self: "NotHomogeneous"})()


# -- vector arithmetic on {term: coeff} dicts ------------------------------

def vec_add(a: dict, b: dict, p: int, scale: int = 1, shift: int = 0) -> dict:
    """a + scale * shift * b, returning a new dict."""
    out = dict(a)
    vec_iadd(out, b, p, scale, shift)
    return out


def vec_iadd(out: dict, b: dict, p: int, scale: int = 1, shift: int = 0) -> None:
    scale %= p
    if not scale:
        return
    get = out.get
    for t, c in b.items():
        t += shift
        v = (get(t, 0) + scale * c) % p
        if v:
            out[t] = v
        else:
            out.pop(t, None)


def vec_scale(a: dict, c: int, p: int) -> dict:
    c %= p
    if not c:
        return {}
    return {t: x * c % p for t, x in a.items()}


def vec_mul_poly(vec: dict, poly: dict, p: int) -> dict:
    """Multiply a module vector by a ring element (component-0 terms)."""
    out: dict = {}
    for m, c in poly.items():
        vec_iadd(out, vec, p, c, m)
    return out


def check_overflow(ring: PolyRing, vec: dict) -> None:
    for t in vec:
        if t & ring.guard:
            raise ExponentOverflow("exponent overflow in product")


class Polynomial:
    """Immutable element of a PolyRing; terms keyed by packed monomial."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms: dict):
        self.ring = ring
        self.terms = terms

    def _wrap(self, other):
        if isinstance(other, Polynomial):
            if other.ring is not self.ring:
                raise DimensionMismatch("polynomials from different rings")
            return other
        if isinstance(other, int):
            return self.ring.poly(other)
        return NotImplemented

    def __add__(self, other):
        o = self._wrap(other)
        if o is NotImplemented:
            return o
        return Polynomial(self.ring, vec_add(self.terms, o.terms, self.ring.p))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.ring, vec_scale(self.terms, -1, self.ring.p))

    def __sub__(self, other):
        o = self._wrap(other)
        if o is NotImplemented:
            return o
        return Polynomial(self.ring, vec_add(self.terms, o.terms, self.ring.p, -1))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._wrap(other)
        if o is NotImplemented:
            return o
        prod = vec_mul_poly(self.terms, o.terms, self.ring.p)
        check_overflow(self.ring, prod)
        return Polynomial(self.ring, prod)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out = self.ring.poly(1)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other):
        o = self._wrap(other)
        if o is NotImplemented:
            return False
        return self.terms == o.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def sorted_terms(self) -> list[tuple[int, int]]:
        """(coeff, monomial) pairs, strictly descending in the ring order."""
        key = self.ring.mono_key
        return [(self.terms[m], m) for m in sorted(self.terms, key=key.__getitem__, reverse=True)]

    def leading_monomial(self) -> int:
        return max(self.terms, key=self.ring.mono_key.__getitem__)

    def degree_check(self):
        """Common total degree, -inf for zero, or NOT_HOMOGENEOUS."""
        return degree_check(self)

    def __str__(self):
        return format_poly(self.ring, self.terms)

    def __repr__(self):
        return f"Polynomial({self})"


def degree_check(f: Polynomial):
    if not f.terms:
        return -math.inf
    degs = {f.ring.mdeg(m) for m in f.terms}
    if len(degs) > 1:
        return NOT_HOMOGENEOUS
    return degs.pop()


def poly_mul(f: Polynomial, g: Polynomial) -> Polynomial:
    return f * g


def format_poly(ring: PolyRing, terms: dict, comp_ok: bool = False) -> str:
    if not terms:
        return "0"
    p = ring.p
    out = []
    for m in sorted(terms, key=ring.mono_key.__getitem__, reverse=True):
        c = terms[m]
        sign = "+"
        if c > p // 2:
            c = p - c
            sign = "-"
        ms = ring.mono_str(m & ring.mono_mask)
        if ms == "1":
            body = str(c)
        elif c == 1:
            body = ms
        else:
            body = f"{c}*{ms}"
        out.append((sign, body))
    s = ("-" if out[0][0] == "-" else "") + out[0][1]
    for sign, body in out[1:]:
        s += f" {sign} {body}"
    return s


# -- parsing -----------------------------------------------------------------

class PolySyntaxError(ValueError):
    def __init__(self, message, column):
        self.column = column
        super().__init__(f"{message} (column {column})")


_TOKEN = re.compile(
    r"(?P<num>\d+)|(?P<name>[A-Za-z_]\w*)|(?P<pow>\^)|(?P<mul>\*)"
    r"|(?P<sign>[+-])|(?P<div>/)|(?P<ws>\s+)|(?P<bad>.)"
)
_KINDS = {"num": 1, "name": 2, "pow": 3, "mul": 4, "sign": 5, "div": 6, "bad": 7}


def _tokenize(text):
    toks = []
    for m in _TOKEN.finditer(text):
        if m.lastgroup == "ws":
            continue
        toks.append((_KINDS[m.lastgroup], m.group(), m.start() + 1))
    return toks


def parse_poly(ring: PolyRing, text: str) -> dict:
    """Parse ``3*x^2*y + y^3 - 1`` style syntax into a term dict."""
    p = ring.p
    toks = _tokenize(text)
    if not toks:
        raise PolySyntaxError("empty polynomial", 1)
    for kind, val, col in toks:
        if kind == 7:
            raise PolySyntaxError(f"unexpected character {val!r}", col)
    out: dict = {}
    i = 0
    n = len(toks)
    first = True
    while i < n:
        sign = 1
        if toks[i][0] == 5:
            sign = -1 if toks[i][1] == "-" else 1
            i += 1
        elif not first:
            raise PolySyntaxError("expected + or -", toks[i][2])
        first = False
        if i >= n:
            raise PolySyntaxError("dangling sign", toks[-1][2])
        coeff = 1
        exps = [0] * ring.nvars
        seen_factor = False
        expect_factor = True
        while i < n and toks[i][0] != 5:
            kind, val, col = toks[i]
            if kind == 4:
                if expect_factor:
                    raise PolySyntaxError("unexpected *", col)
                expect_factor = True
                i += 1
                continue
            if not expect_factor and kind not in (1, 2):
                raise PolySyntaxError(f"unexpected {val!r}", col)
            if kind == 1:
                num = int(val)
                i += 1
                if i < n and toks[i][0] == 6:
                    if i + 1 >= n or toks[i + 1][0] != 1:
                        raise PolySyntaxError("bad fraction", toks[i][2])
                    den = int(toks[i + 1][1]) % p
                    if den == 0:
                        raise PolySyntaxError("denominator divisible by p", toks[i + 1][2])
                    num = num * ring.field.inv(den)
                    i += 2
                coeff = coeff * num % p
            elif kind == 2:
                if val not in ring._var_index:
                    raise PolySyntaxError(f"unknown variable {val!r}", col)
                k = ring._var_index[val]
                i += 1
                e = 1
                if i < n and toks[i][0] == 3:
                    if i + 1 >= n or toks[i + 1][0] != 1:
                        raise PolySyntaxError("expected exponent after ^", toks[i][2])
                    e = int(toks[i + 1][1])
                    i += 2
                exps[k] += e
            else:
                raise PolySyntaxError(f"unexpected {val!r}", col)
            seen_factor = True
            expect_factor = False
        if not seen_factor or expect_factor:
            col = toks[i][2] if i < n else toks[-1][2]
            raise PolySyntaxError("incomplete term", col)
        m = ring.pack(exps)
        c = (out.get(m, 0) + sign * coeff) % p
        if c:
            out[m] = c
        else:
            out.pop(m, None)
    return out
