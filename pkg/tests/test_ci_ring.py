import random

import pytest
from hypothesis import given, strategies as st

from ciext.ci_ring import CIRing, verify_regular_sequence
from ciext.errors import NotHomogeneous, NotRegularSequence
from ciext.groebner import member
from ciext.polyring import PolyRing, vec_iadd, vec_mul_poly

from corpus import random_ci_ring, random_homogeneous


def test_regular_sequence_examples():
    Q = PolyRing(["x", "y"])
    assert verify_regular_sequence([Q.parse("x^2"), Q.parse("y^2")]).ok
    rep = verify_regular_sequence([Q.parse("x"), Q.parse("x")])
    assert not rep.ok and rep.index == 2 and rep.witness == Q.poly(1)
    assert verify_regular_sequence([Q.parse("x*y")]).ok


def test_zero_divisor_witness():
    Q = PolyRing(["x", "y"])
    rep = verify_regular_sequence([Q.parse("x*y"), Q.parse("x^2")])
    assert not rep.ok and rep.index == 2
    prev = CIRing(["x", "y"], ["x*y"]).gb_f
    # witness times f_2 lies in (f_1) but the witness does not
    assert member(rep.witness * Q.parse("x^2"), prev) and not member(rep.witness, prev)


def test_constructor_errors():
    with pytest.raises(NotRegularSequence) as e:
        CIRing(["x", "y"], ["x", "x"])
    assert e.value.index == 2
    with pytest.raises(NotHomogeneous):
        CIRing(["x", "y"], ["x^2 + y"])
    with pytest.raises(ValueError):
        CIRing(["x", "y"], ["1"])


def test_normal_form_examples():
    A1 = CIRing(["x"], ["x^2"])
    assert A1.normal_form(A1.Q.parse("x^3")).is_zero()
    A = CIRing(["x", "y"], ["x^2", "y^2"])
    assert A.normal_form(A.Q.parse("x^2*y + x*y")) == A.Q.parse("x*y")
    assert A.normal_form(A.Q.poly(0)).is_zero()
    assert A.normal_form([A.Q.parse("x^3"), A.Q.parse("x + y")]) == [A.Q.poly(0), A.Q.parse("x + y")]


def test_dimension_bookkeeping():
    assert CIRing(["x", "y"], ["x*y"]).leading_term_dim() == 1
    A = CIRing(["x", "y", "z"], ["x^2 + y*z", "y^3"])
    assert A.krull_dim == 1 == A.leading_term_dim()


@given(st.integers(0, 10**6))
def test_random_ci_invariants(seed):
    rng = random.Random(seed)
    A = random_ci_ring(rng)
    Q = A.Q
    # dim Q/LT(f) = v - c for a regular sequence
    assert A.leading_term_dim() == A.krull_dim
    # each basis element of (f) is the stated combination of the f_j
    for g, coeffs in zip(A.gb_f.generators, A.f_lift):
        total = {}
        for fj, a in zip(A.f, coeffs):
            vec_iadd(total, vec_mul_poly(fj.terms, a, Q.p), Q.p)
        assert total == g
    # normal forms: idempotent, additive, kill (f)
    g = random_homogeneous(Q, rng.randint(1, 4), rng)
    h = random_homogeneous(Q, Q.mdeg(next(iter(g.terms))), rng)
    assert A.normal_form(A.normal_form(g)) == A.normal_form(g)
    assert A.normal_form(g + h) == A.normal_form(A.normal_form(g) + A.normal_form(h))
    for fj in A.f:
        assert A.normal_form(fj * g).is_zero()
