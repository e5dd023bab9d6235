"""Acceptance criteria, one test per criterion (parametrized where natural).

Run ``pytest tests/test_acceptance.py``; the terminal summary prints one
PASS/FAIL line per criterion.
"""

import random
import subprocess
import sys
from fractions import Fraction

import pytest

from ciext import degreewise as dw
from ciext.asymptotics import (RecurrenceSpec, bass_grid, check_recurrence, depth_grid,
                               detect_stabilization, ext_length_series, fit_bivariate_polynomial,
                               grade_grid, series_recurrence_onset)
from ciext.ci_ring import CIRing
from ciext.groebner import buchberger, divide, groebner, lead_term, satisfies_buchberger_criterion
from ciext.modules import FAMILY_KINDS, INFINITE, IdealSpec, ModuleMap, PresentedModule
from ciext.resolution import (FreeResolution, depth, eisenbud_operators, ext, grade, koszul_depth,
                              koszul_depth_or_inf, t_action)

from corpus import (depth_corpus, instance_a, instance_b, instance_c, random_ci_ring,
                    random_homogeneous, random_module)

INSTANCES = {"a": instance_a, "b": instance_b, "c": instance_c}
SOUNDNESS_SEEDS = range(60)
RES_STEPS = 10


# -- criterion 1 -------------------------------------------------------------------------

def _check_groebner(A: CIRing, rng: random.Random) -> None:
    Q = A.Q
    gens = [random_homogeneous(Q, rng.randint(1, 3), rng) for _ in range(rng.randint(1, 3))]
    gens = [g for g in gens if not g.is_zero()] or [Q.gens()[0]]
    gb = buchberger(gens, Q)
    assert satisfies_buchberger_criterion(gb)
    polys = gb.polys()
    for _ in range(3):
        f = random_homogeneous(Q, rng.randint(0, 4), rng)
        dr = divide(f, polys, Q)
        total = dr.remainder
        for q, g in zip(dr.quotients, polys):
            total = total + q * g
        assert total == f
        leads = [lead_term(Q, g.terms) for g in polys]
        assert not any(Q.divides(l, t) for l in leads for t in dr.remainder.terms)


def _check_module_groebner(M: PresentedModule) -> None:
    Q = M.ring.Q
    fvecs = [{Q.term(k, m): c for m, c in f.terms.items()} for k in range(M.rank) for f in M.ring.f]
    if M.relations or fvecs:
        gb = groebner(list(M.relations) + fvecs, Q, M.degrees)
        assert satisfies_buchberger_criterion(gb)


@pytest.mark.criterion(1, "engine soundness on >= 50 random instances")
def test_criterion_1_engine_soundness():
    with_two = 0
    for seed in SOUNDNESS_SEEDS:
        rng = random.Random(seed)
        A = random_ci_ring(rng, max_vars=3, max_c=2, max_deg=3)
        assert A.p == 101 and A.v <= 3
        _check_groebner(A, rng)
        M = random_module(A, rng)
        _check_module_groebner(M)
        R = FreeResolution(M).extend(RES_STEPS)
        assert R.is_complex(RES_STEPS)
        assert not R.has_unit_entries(RES_STEPS)
        # exactness in the low degrees, by dense ranks
        for i in range(1, 4):
            lo = min(R.degrees(i + 1), default=0)
            for d in range(lo, lo + 3):
                assert dw.homology_dim(R.differential(i), R.differential(i + 1), d) == 0
        E = eisenbud_operators(R)
        for i in range(RES_STEPS - 1):
            assert E.check_identity(i)
        for i in range(1, RES_STEPS - 2):
            assert E.check_chain_map(i)
        if A.c == 2:
            with_two += 1
            for D in (PresentedModule.residue_field(A), M):
                for i in range(3):
                    a = t_action(E, D, 1, i + 2).compose(t_action(E, D, 2, i))
                    b = t_action(E, D, 2, i + 2).compose(t_action(E, D, 1, i))
                    assert a.equals(b)
    assert len(SOUNDNESS_SEEDS) >= 50 and with_two >= 10


# -- criterion 2 -------------------------------------------------------------------------

def _corpus_ideals(A: CIRing):
    g = A.Q.gens()
    out = [IdealSpec(A, [g[0]]), IdealSpec(A, [g[-1]]), IdealSpec(A, g)]
    if len(g) > 1:
        out.append(IdealSpec(A, [g[0] + g[1]]))
        out.append(IdealSpec(A, [g[0] * g[1], g[1] ** 2]))
    return out


@pytest.mark.criterion(2, "depth and grade via Ext agree with Koszul homology")
def test_criterion_2_depth_matches_koszul():
    corpus = depth_corpus()
    assert len(corpus) >= 30
    for E in corpus:
        A = E.ring
        assert depth(E) == koszul_depth_or_inf(A.Q.gens(), E)
        for J in _corpus_ideals(A):
            assert grade(J, E) == (INFINITE if E.is_zero() else koszul_depth(J.generators, E))


# -- criterion 3 -------------------------------------------------------------------------

@pytest.mark.criterion(3, "depth grids stabilize on instances a, b, c with margin >= 3")
@pytest.mark.parametrize("name", sorted(INSTANCES))
@pytest.mark.parametrize("t", [0, 1])
def test_criterion_3_depth_stabilizes(name, t):
    A, M, N, I = INSTANCES[name]()
    G = depth_grid(M, N, I, t, (1, 8), (1, 8))
    rep = detect_stabilization(G, 3)
    assert rep.stable and rep.margin >= 3
    assert rep.to_json()["stable_value_is_infinite"] == (rep.stable_value == INFINITE)


# -- criterion 4 -------------------------------------------------------------------------

@pytest.mark.criterion(4, "grade grids stabilize for every family kind and J on instances b, c")
@pytest.mark.parametrize("name", ["b", "c"])
@pytest.mark.parametrize("kind", FAMILY_KINDS)
@pytest.mark.parametrize("jgens", [["x"], ["y"], ["x", "y"]])
@pytest.mark.parametrize("t", [0, 1])
def test_criterion_4_grade_stabilizes(name, kind, jgens, t):
    A, M, N, I = INSTANCES[name]()
    G = grade_grid(M, N, I, IdealSpec(A, jgens), t, (1, 8), (1, 8), kind=kind)
    rep = detect_stabilization(G, 3)
    assert rep.stable and rep.margin >= 3


# -- criterion 5 -------------------------------------------------------------------------

def tensor_resolution_ext_dims(upto: int) -> list[int]:
    """dim_k Ext^i(k, k) over F[x,y]/(x^2,y^2), from the tensor product of the
    two periodic resolutions, built and checked degreewise here."""
    A = CIRing(["x", "y"], ["x^2", "y^2"])
    Q = A.Q
    x, y = Q.var(0), Q.var(1)
    frees = [PresentedModule.free(A, [i] * (i + 1)) for i in range(upto + 2)]
    # basis e_{a,b} of F_i (a + b = i) is indexed by a; d e_{a,b} = x e_{a-1,b} + (-1)^a y e_{a,b-1}
    maps = []
    for i in range(1, upto + 2):
        cols = []
        for a in range(i + 1):
            col = {}
            if a >= 1:
                col[Q.term(a - 1, x)] = 1
            if i - a >= 1:
                col[Q.term(a, y)] = 1 if a % 2 == 0 else Q.p - 1
            cols.append(col)
        maps.append(ModuleMap(frees[i], frees[i - 1], cols))
    k = PresentedModule.residue_field(A)
    aug = ModuleMap(frees[0], k, [{Q.term(0, Q.one): 1}])
    for i in range(upto + 1):
        psi = aug if i == 0 else maps[i - 1]
        for d in range(i, i + 3):
            assert dw.homology_dim(psi, maps[i], d) == 0
        assert psi.compose(maps[i]).is_zero()
    assert dw.homology_dim(ModuleMap(k, PresentedModule.zero(A), [{}]), aug, 0) == 0
    # entries lie in m, so Hom(-, k) has zero differentials and Ext^i has rank F_i
    return [len(frees[i].degrees) for i in range(upto + 1)]


@pytest.mark.criterion(5, "bass grids match the tensor oracle, fit exactly and satisfy the recurrence")
def test_criterion_5_bass_closed_form():
    ext_dims = tensor_resolution_ext_dims(2 * 8)
    A, _, _, m = instance_b()
    k = PresentedModule.residue_field(A)
    for j in range(3):
        G = bass_grid(k, k, m, 0, j, (1, 8), (1, 8))
        for n, i in G.cells():
            # Ext^{2i}(k,k) = k^{ext_dims[2i]} and bass(j, k) = ext_dims[j]
            assert G[(n, i)] == ext_dims[2 * i] * ext_dims[j] == (j + 1) * (2 * i + 1)
        fit = fit_bivariate_polynomial(G)
        assert fit.coefficients == {(0, 0): Fraction(j + 1), (0, 1): Fraction(2 * (j + 1))}
        assert check_recurrence(G, RecurrenceSpec(2, 2), (1, 1))


@pytest.mark.criterion(5, "bass grids match the tensor oracle, fit exactly and satisfy the recurrence")
@pytest.mark.parametrize("name", ["b", "c"])
@pytest.mark.parametrize("t", [0, 1])
@pytest.mark.parametrize("j", [0, 1, 2])
def test_criterion_5_bass_fit_and_recurrence(name, t, j):
    A, M, N, I = INSTANCES[name]()
    G = bass_grid(M, N, I, t, j, (1, 10), (1, 10))
    held_out = [(n, i) for n in (9, 10) for i in (9, 10)]
    fit = fit_bivariate_polynomial(G, ((4, 8), (4, 8)), held_out)
    assert all(fit(*c) == G[c] for c in held_out)
    assert all(isinstance(v, Fraction) for v in fit.coefficients.values())
    assert check_recurrence(G, RecurrenceSpec(A.c, I.r), (4, 4))
    # m^3 = 0 here, so the tail is zero; the nonzero rows n = 1, 2 must obey it too
    assert check_recurrence(G, RecurrenceSpec(A.c, I.r), (1, 1))


# -- criterion 6 -------------------------------------------------------------------------

@pytest.mark.criterion(6, "Ext length series satisfy the (1 - z^2)^c recurrence from onset <= 6")
@pytest.mark.parametrize("name", ["b", "c"])
def test_criterion_6_series_recurrence(name):
    A, M, N, I = INSTANCES[name]()
    seq = ext_length_series(M, 20)
    assert all(v != INFINITE for v in seq)
    onset = series_recurrence_onset(seq, A.c)
    assert onset is not None and onset <= 6


# -- criterion 7 -------------------------------------------------------------------------

SUITE = """\
ring p=101 vars=[x,y] order=grevlex
ci f=[x^2, y^2]
ideal m=[x, y]
ideal X=[x]
ideal Y=[y]
module Mc gens=[0] rels=[[x]]
module Nc gens=[0] rels=[[y]]
cmd depth-grid M=k N=A I=m t=0 n=1..8 i=1..8 margin=3 out=depth_b0.csv report=depth_b0.json
cmd depth-grid M=Mc N=Nc I=m t=1 n=1..8 i=1..8 margin=3 out=depth_c1.csv report=depth_c1.json
cmd grade-grid M=k N=A I=m J=Y kind=power t=0 n=1..8 i=1..8 out=grade_b.csv report=grade_b.json
cmd grade-grid M=Mc N=Nc I=m J=X kind=graded_piece t=1 n=1..8 i=1..8 out=grade_c.csv report=grade_c.json
cmd bass-grid M=k N=k I=m t=0 j=2 n=1..8 i=1..8 fit_n=1..8 fit_i=1..8 out=bass.csv report=bass.json
cmd bass-grid M=Mc N=Nc I=m t=0 j=1 n=1..10 i=1..10 tail=4,4 fit_n=4..8 fit_i=4..8 out=bass_c.csv report=bass_c.json
cmd series-check M=k upto=20 out=series.csv report=series.json
cmd resolve M=k upto=6 report=resolve.json
"""


@pytest.mark.criterion(7, "CLI artifacts are byte-identical with 1 and 4 threads")
def test_criterion_7_determinism(tmp_path):
    spec = tmp_path / "suite.txt"
    spec.write_text(SUITE)
    dirs = {}
    for threads in (1, 4):
        out = tmp_path / f"threads{threads}"
        proc = subprocess.run([sys.executable, "-m", "ciext", "run", str(spec), "--outdir", str(out),
                               "--threads", str(threads)], capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        dirs[threads] = out
    names = sorted(p.name for p in dirs[1].iterdir())
    assert names == sorted(p.name for p in dirs[4].iterdir()) and len(names) == 15
    for name in names:
        assert (dirs[1] / name).read_bytes() == (dirs[4] / name).read_bytes(), name


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
