import math

import pytest
from hypothesis import given, settings, strategies as st

from conftest import tower_for
from fsrgrowth.complex import FAT
from fsrgrowth.growth import (
    GrowthTable, SeriesPoly, approximate_degree, check_functional_equation, closed_form_bn,
    default_window, degree_estimate, growth_table, rpq_degree, sphere_series_rpq,
)


def brute_spheres(p, q, N):
    # independent oracle: the ring of width p^k at step k holds 4 q^k tiles per layer
    s, k = [1], 0
    while len(s) <= N:
        for _ in range(p ** k):
            s.append(4 * q ** k)
        k += 1
    return s[:N + 1]


def test_r23_known_values():
    assert closed_form_bn(2, 3, 7) == 173
    assert [closed_form_bn(2, 3, n) for n in range(4)] == [1, 5, 17, 29]


@settings(max_examples=60)
@given(st.integers(2, 6), st.integers(2, 6), st.integers(0, 60))
def test_closed_form_matches_partial_sums(p, q, n):
    assert closed_form_bn(p, q, n) == sum(brute_spheres(p, q, n))
    assert list(sphere_series_rpq(p, q, n).coefficients) == brute_spheres(p, q, n)


@settings(max_examples=30)
@given(st.integers(2, 5), st.integers(2, 7), st.integers(10, 120))
def test_functional_equation_holds(p, q, N):
    chk = check_functional_equation(p, q, sphere_series_rpq(p, q, N))
    assert chk.ok and chk.checked_degree == N + p - 2


def test_functional_equation_detects_corruption():
    g = list(sphere_series_rpq(2, 3, 50).coefficients)
    g[5] += 1
    chk = check_functional_equation(2, 3, SeriesPoly(tuple(g)))
    assert not chk and chk.first_failure == 5


def test_functional_equation_wrong_q():
    assert not check_functional_equation(2, 4, sphere_series_rpq(2, 3, 40))


def test_series_text_round_trip():
    g = sphere_series_rpq(3, 4, 30)
    assert SeriesPoly.from_text(g.to_text()) == g
    assert g[0] == 1 and len(g) == 31


def test_table_csv():
    t = GrowthTable(FAT, (1, 4, 12))
    assert t.balls == (1, 5, 17)
    lines = t.to_csv().splitlines()
    assert lines[0] == "n,s_n,b_n,ln_ratio"
    assert lines[1] == "0,1,1," and lines[3].startswith("2,12,17,4.08")
    assert "\r" not in t.to_csv()


def test_bfs_agrees_with_series():
    tower = tower_for("rpq_3_2")
    table = growth_table(tower.rule, tower.seed, 20, FAT, tower=tower)
    assert list(table.spheres) == brute_spheres(3, 2, 20)


def test_degree_estimate_window():
    assert default_window(40) == (10, 40)
    balls = [closed_form_bn(2, 3, n) for n in range(41)]
    est = degree_estimate(balls)
    assert abs(est.estimate - rpq_degree(2, 3)) < 0.15
    assert est.increasing and est.sup_ratio >= est.slope - 1
    with pytest.raises(ValueError):
        degree_estimate(balls[:5])
    with pytest.raises(ValueError):
        degree_estimate(balls, (1, 40))


def test_degree_estimate_constant_table():
    est = degree_estimate([7] * 20)
    assert est.slope == 0.0 and not est.increasing


@settings(max_examples=40)
@given(st.floats(2.0, 6.0), st.sampled_from([0.05, 0.01]))
def test_approximate_degree(d, eps):
    p, q = approximate_degree(d, eps)
    assert p >= 2 and q >= 2
    assert abs(1 + math.log(q) / math.log(p) - d) < eps
    if d > 2:
        assert q > p


def test_approximate_degree_rejects():
    with pytest.raises(ValueError):
        approximate_degree(1.5, 0.01)
