from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import minimize

from conftest import tower_for
from fsrgrowth.errors import DisconnectedAnnulusError, ZeroAreaError
from fsrgrowth.modulus import (
    WeightAssignment, area, fit_limit, height, layer_weights, modulus, modulus_csv,
    optimize_modulus,
)
from fsrgrowth.expansion import annulus


def all_paths(a):
    """Every simple fat path from an inner tile to an outer tile (small annuli only)."""
    members = set(a.tiles)
    nbrs = {t: set() for t in a.tiles}
    for group in a.complex.edge_tiles:
        if len(group) == 2 and set(group) <= members:
            x, y = group
            nbrs[x].add(y)
            nbrs[y].add(x)
    out = []

    def walk(path, seen):
        u = path[-1]
        if u in a.outer:
            out.append(tuple(path))
            return  # extending past an outer tile only adds weight
        for v in sorted(nbrs[u] - seen):
            walk(path + [v], seen | {v})

    for s in sorted(a.inner):
        walk([s], {s})
    return out


def brute_modulus(a):
    paths = all_paths(a)
    col = {t: i for i, t in enumerate(a.tiles)}
    A = np.zeros((len(paths), len(a.tiles)))
    for k, p in enumerate(paths):
        for t in p:
            A[k, col[t]] += 1
    n = len(a.tiles)
    res = minimize(lambda w: w @ w, np.full(n, 1.0), jac=lambda w: 2 * w, method="SLSQP",
                   constraints=[{"type": "ineq", "fun": lambda w: A @ w - 1, "jac": lambda w: A}],
                   bounds=[(0, None)] * n, options={"ftol": 1e-14, "maxiter": 500})
    assert res.success
    return 1.0 / res.fun, paths


@pytest.mark.parametrize("name,n,closed", [("R1", 1, Fraction(1, 4)), ("R1", 2, Fraction(3, 8)),
                                           ("R2", 1, Fraction(1, 4)), ("rpq_2_2", 2, Fraction(1, 2))])
def test_solver_matches_brute_force(name, n, closed):
    a = annulus(tower_for(name), n)
    brute, paths = brute_modulus(a)
    rep = optimize_modulus(a, tol=1e-10)
    assert abs(brute - float(closed)) < 1e-7
    assert abs(rep.modulus - brute) < 1e-7
    assert rep.modulus <= rep.upper_bound + 1e-12


@pytest.mark.parametrize("name,n,base", [("R1", 2, 2), ("R2", 1, 3), ("rpq_2_2", 2, 2)])
def test_height_matches_path_enumeration(name, n, base):
    a = annulus(tower_for(name), n)
    w = layer_weights(a, base)
    H, witness = height(a, w)
    assert H == min(sum(w[t] for t in p) for p in all_paths(a))
    assert witness[0] in a.inner and witness[-1] in a.outer
    assert sum(w[t] for t in witness) == H
    for x, y in zip(witness, witness[1:]):
        shared = {e for e, _ in a.complex.tiles[x].darts} & {e for e, _ in a.complex.tiles[y].darts}
        assert shared


def test_exact_report():
    a = annulus(tower_for("R2"), 2)
    rep = modulus(a, layer_weights(a, 3))
    assert rep.modulus == Fraction(5, 12)
    assert isinstance(rep.height, int) and rep.area == area(a, layer_weights(a, 3))


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["R1", "R2"]), st.integers(1, 3),
       st.fractions(min_value=Fraction(1, 100), max_value=100))
def test_modulus_scale_invariant(name, n, c):
    a = annulus(tower_for(name), n)
    w = layer_weights(a, 2)
    assert modulus(a, w.scaled(c)).modulus == modulus(a, w).modulus


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_any_weights_bounded_by_optimum(data):
    # the optimum is a supremum over weight functions
    a = annulus(tower_for("R1"), 2)
    ws = data.draw(st.lists(st.integers(0, 9), min_size=len(a.tiles), max_size=len(a.tiles)))
    if not any(ws):
        ws[0] = 1
    m = modulus(a, WeightAssignment(dict(zip(a.tiles, ws)))).modulus
    assert m <= Fraction(3, 8)


def test_solver_history_monotone():
    rep = optimize_modulus(annulus(tower_for("R2"), 3), tol=1e-9)
    sums = [s for s, _ in rep.history]
    assert all(b >= a - 1e-12 for a, b in zip(sums, sums[1:]))
    assert rep.shortest >= 1 - 1e-9 and rep.iterations == len(rep.history)


def test_error_paths():
    a = annulus(tower_for("R1"), 1)
    with pytest.raises(ZeroAreaError):
        modulus(a, WeightAssignment({}))
    with pytest.raises(ValueError):
        WeightAssignment({a.tiles[0]: -1})
    with pytest.raises(ValueError):
        optimize_modulus(a, tol=0)
    cut = type(a)(a.tower, a.n, a.complex, a.tiles, a.layer, frozenset(), a.outer)
    with pytest.raises(DisconnectedAnnulusError):
        height(cut, layer_weights(a, 2))


def test_fit_limit():
    geo = [0.5 - 0.5 ** k for k in range(2, 9)]
    limit, ratio, bounded = fit_limit(geo)
    assert bounded and abs(limit - 0.5) < 1e-12 and abs(ratio - 0.5) < 1e-12
    assert not fit_limit([1, 2, 3, 4])[2]
    with pytest.raises(ValueError):
        fit_limit([1, 2])


def test_modulus_csv():
    text = modulus_csv([(1, 2, 16, Fraction(1, 4), 0.25), (2, 6, 96, Fraction(3, 8), None)])
    lines = text.splitlines()
    assert lines[0] == "n,H,A,M_closed,M_solver,gap"
    assert lines[1] == "1,2,16,1/4,0.25,0.0"
    assert lines[2] == "2,6,96,3/8,,"


def test_r1_layer_values():
    a3 = annulus(tower_for("R1"), 3)
    w = layer_weights(a3, 2)
    assert {k: {w[t] for t in a3.tiles if a3.layer[t] == k} for k in (1, 2, 3)} == \
        {1: {4}, 2: {2}, 3: {1}}
    assert area(a3, w) == 2 ** 4 * (2 ** 3 - 1)
    a4 = annulus(tower_for("R1"), 4)
    assert height(a4, layer_weights(a4, 2))[0] == 2 ** 4 - 1
    a5 = annulus(tower_for("R1"), 5)
    assert modulus(a5, layer_weights(a5, 2)).modulus == Fraction(31, 64)


@pytest.mark.slow
@pytest.mark.parametrize("p,q", [(p, q) for p in (2, 3, 4) for q in (2, 3, 4)])
def test_solver_matches_closed_form_grid(p, q):
    tower = tower_for(f"rpq_{p}_{q}")
    for n in range(1, 5 if p * q <= 9 else 4):
        a = annulus(tower, n)
        closed = modulus(a, layer_weights(a, q)).modulus
        assert abs(optimize_modulus(a, tol=1e-9).modulus - float(closed)) <= 1e-6
