from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ciext.asymptotics import (GridResult, RecurrenceSpec, bass_grid, check_recurrence, depth_grid,
                               detect_stabilization, ext_length_series, fit_bivariate_polynomial,
                               format_value, grade_grid, grid_with_retry, length_grid, parse_value,
                               series_recurrence_onset)
from ciext.ci_ring import CIRing
from ciext.errors import NoFit, TailOutsideGrid, WindowTooSmall
from ciext.modules import INFINITE, IdealSpec, PresentedModule
from ciext.resolution import depth, koszul_depth_or_inf

from corpus import instance_a, instance_b


def grid(f, n_range=(1, 6), i_range=(1, 6)):
    G = GridResult(0, "test", "quot", n_range, i_range)
    G.values = {(n, i): f(n, i) for n, i in G.cells()}
    return G


def test_depth_grid_examples():
    A, k, F, I = instance_a()
    G = depth_grid(k, F, I, 0, (1, 6), (1, 6))
    # N/IN = k, while N/I^nN = A for n >= 2 since x^2 = 0
    assert all(G[c] == (0 if c[0] == 1 else INFINITE) for c in G.cells())
    G = depth_grid(k, k, I, 0, (1, 6), (1, 6))
    assert set(G.values.values()) == {0}
    G = depth_grid(PresentedModule.zero(A), F, I, 1, (1, 3), (1, 3))
    assert set(G.values.values()) == {INFINITE}


def test_grade_grid_examples():
    A, k, F, I = instance_a()
    G = grade_grid(k, F, I, IdealSpec(A, ["x"]), 0, (2, 6), (1, 4), kind="graded_piece")
    assert set(G.values.values()) == {INFINITE}
    A, k, F, m = instance_b()
    Gm = grade_grid(k, F, m, m, 1, (1, 4), (1, 4))
    assert Gm.values == depth_grid(k, F, m, 1, (1, 4), (1, 4)).values
    J = IdealSpec(A, ["y"])
    Gy = grade_grid(k, F, IdealSpec(A, ["x"]), J, 0, (1, 5), (1, 5))
    assert detect_stabilization(Gy, 3).stable


def test_bass_grid_examples():
    A, k, F, m = instance_b()
    for j in range(3):
        G = bass_grid(k, k, m, 0, j, (1, 4), (1, 4))
        assert all(G[(n, i)] == (j + 1) * (2 * i + 1) for n, i in G.cells())
    A, k, F, I = instance_a()
    assert set(bass_grid(k, F, I, 0, 0, (2, 4), (1, 4)).values.values()) == {0}
    assert set(bass_grid(PresentedModule.zero(A), F, I, 0, 2, (1, 3), (1, 3)).values.values()) == {0}


def test_length_grid_matches_hilbert_series():
    A, k, F, m = instance_b()
    G = length_grid(k, k, m, 1, (1, 3), (0, 3))
    assert all(G[(n, i)] == 2 * i + 2 for n, i in G.cells())


def test_stabilization_examples():
    rep = detect_stabilization(grid(lambda n, i: 5), 3)
    assert rep.stable and rep.onset == (1, 1) and rep.stable_value == 5 and rep.margin == 5
    rep = detect_stabilization(grid(lambda n, i: 9 if n == 1 else 0), 3)
    assert rep.onset == (2, 1)
    assert not detect_stabilization(grid(lambda n, i: n + i), 3).stable
    with pytest.raises(WindowTooSmall):
        detect_stabilization(grid(lambda n, i: 0, (1, 3), (1, 6)), 3)
    rep = detect_stabilization(grid(lambda n, i: INFINITE), 3)
    assert rep.to_json()["stable_value"] == "inf" and rep.to_json()["stable_value_is_infinite"]


@given(st.integers(1, 5), st.integers(1, 5), st.integers(0, 3))
def test_stabilization_onset_is_tight(n0, i0, margin):
    G = grid(lambda n, i: 1 if n >= n0 and i >= i0 else 0, (1, 9), (1, 9))
    rep = detect_stabilization(G, margin)
    assert rep.stable and rep.onset == (n0, i0) and rep.stable_value == 1
    for c in G.cells():
        if c[0] >= n0 and c[1] >= i0:
            assert G[c] == rep.stable_value


def test_retry_doubles_the_window():
    calls = []

    def compute(nr, ir):
        calls.append((nr, ir))
        return grid(lambda n, i: min(n, 6), nr, ir)

    G, rep = grid_with_retry(compute, (1, 5), (1, 5), 3)
    assert calls == [((1, 5), (1, 5)), ((1, 10), (1, 10))]
    assert rep.stable and rep.onset == (6, 1)


def test_fit_examples():
    for j in range(3):
        G = grid(lambda n, i: (2 * i + 1) * (j + 1))
        fit = fit_bivariate_polynomial(G)
        assert fit.degree == (0, 1)
        assert fit.coefficients == {(0, 0): Fraction(j + 1), (0, 1): Fraction(2 * (j + 1))}
    assert fit_bivariate_polynomial(grid(lambda n, i: 7)).degree == (0, 0)
    with pytest.raises(NoFit):
        fit_bivariate_polynomial(grid(lambda n, i: 2 ** n))


@given(st.lists(st.fractions(max_denominator=5).map(lambda x: x.limit_denominator(5)), min_size=6, max_size=6))
def test_fit_recovers_random_polynomials(c):
    def g(n, i):
        return c[0] + c[1] * n + c[2] * i + c[3] * n * i + c[4] * i * i + c[5] * n * n * i
    G = grid(g, (2, 8), (3, 9))
    fit = fit_bivariate_polynomial(G, ((2, 5), (3, 6)), [(n, i) for n in range(6, 9) for i in range(7, 10)])
    assert all(fit(n, i) == g(n, i) for n, i in G.cells())


def test_fit_rejects_bad_validation():
    G = grid(lambda n, i: n * i if (n, i) != (6, 6) else 0)
    with pytest.raises(NoFit):
        fit_bivariate_polynomial(G, ((1, 4), (1, 4)), [(6, 6)])


def test_recurrence_examples():
    for j in range(3):
        G = grid(lambda n, i: (2 * i + 1) * (j + 1))
        assert check_recurrence(G, RecurrenceSpec(2, 2), (1, 1))
    assert check_recurrence(grid(lambda n, i: 0), RecurrenceSpec(1, 1), (1, 1))
    res = check_recurrence(grid(lambda n, i: 2 ** n), RecurrenceSpec(0, 1), (1, 1))
    assert not res and res.counterexample == (2, 1)
    # an i-independent grid is annihilated by any positive i-difference
    assert check_recurrence(grid(lambda n, i: 2 ** n), RecurrenceSpec(1, 1), (1, 1))
    with pytest.raises(TailOutsideGrid):
        check_recurrence(grid(lambda n, i: 0), RecurrenceSpec(6, 0), (1, 1))


def test_series_onset():
    assert series_recurrence_onset([1] * 10, 1) == 0
    assert series_recurrence_onset([i // 2 for i in range(20)], 2) == 0
    assert series_recurrence_onset([5, 0] + [i // 2 for i in range(2, 20)], 2) == 1
    assert series_recurrence_onset([9, 9, 9, 1, 2, 1, 2, 1, 2], 1) == 3
    assert series_recurrence_onset([1, 2, 3, 5, 8], 1) is None


def test_ext_length_series():
    A, k, F, m = instance_b()
    assert ext_length_series(k, 8) == [i + 1 for i in range(9)]
    A1, k1, F1, _ = instance_a()
    assert ext_length_series(k1, 8) == [1] * 9


def test_csv_round_trip():
    G = grid(lambda n, i: INFINITE if n > 3 else Fraction(n, i) if i % 2 else n * i)
    H = GridResult.from_csv(G.to_csv())
    assert H.values == G.values and H.n_range == G.n_range and H.i_range == G.i_range
    assert H.to_csv() == G.to_csv()
    assert format_value(Fraction(3, 6)) == "1/2" and parse_value("1/2") == Fraction(1, 2)


def test_threads_give_identical_grids():
    A = CIRing(["x", "y"], ["x^2", "y^2"])
    M = PresentedModule.cyclic(A, ["x"])
    N = PresentedModule.cyclic(A, ["y"])
    I = IdealSpec(A, ["x", "y"])
    one = length_grid(M, N, I, 0, (1, 5), (1, 5))
    four = length_grid(M, N, I, 0, (1, 5), (1, 5), threads=4)
    assert one.to_csv() == four.to_csv()


def test_depth_grid_cells_agree_with_koszul():
    A, k, F, m = instance_b()
    from ciext.asymptotics import compute_grid
    G = compute_grid(k, F, m, 0, (1, 4), (1, 3), "koszul",
                     lambda E: koszul_depth_or_inf(A.Q.gens(), E))
    D = compute_grid(k, F, m, 0, (1, 4), (1, 3), "depth", depth)
    assert G.values == D.values
