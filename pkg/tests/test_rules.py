import numpy as np
import pytest
from hypothesis import given, strategies as st

from fsrgrowth.errors import RuleError
from fsrgrowth.rules import (
    SubdivisionRule, SubdivisionTemplate, TileType, builtin, check_rule, counting_matrix,
    make_rpq, mesh_heuristic, predicted_counts, validate_rule,
)


@pytest.mark.parametrize("name", ["pentagonal", "R1", "R2"])
def test_builtins_validate(name):
    assert validate_rule(builtin(name)).ok


def test_unknown_builtin():
    with pytest.raises(RuleError):
        builtin("R9")


def test_counting_matrices():
    assert counting_matrix(builtin("pentagonal")).tolist() == [[6]]
    assert counting_matrix(make_rpq(2, 3)).tolist() == [[1, 0, 4], [0, 6, 0], [0, 3, 3]]
    assert counting_matrix(builtin("R1")).tolist() == [[1, 4], [0, 2]]


def test_predicted_counts_r23():
    # derived from the counting matrix by hand: (1,0,0) -> (1,0,4) -> (1,16,12) -> ...
    totals = [sum(d.values()) for d in predicted_counts(make_rpq(2, 3), {"t1": 1}, 3)]
    assert totals == [1, 5, 29, 173]


@given(st.integers(2, 8), st.integers(2, 8))
def test_rpq_grid_valid(p, q):
    r = make_rpq(p, q)
    assert validate_rule(r).ok
    m = counting_matrix(r)
    assert m[1, 1] == p * q and m[2, 2] == q and m[2, 1] == p * q - q
    assert r.tile_type("t3").edge_count == q + 3


@pytest.mark.parametrize("p,q", [(1, 3), (3, 1), (0, 0), (2.5, 3)])
def test_rpq_rejects_bad_parameters(p, q):
    with pytest.raises(RuleError):
        make_rpq(p, q)


def _tri_rule(vec, sub_cycles, arcs, nv):
    tpl = SubdivisionTemplate("t", nv, arcs, tuple(("t", c) for c in sub_cycles))
    return SubdivisionRule((TileType("t", len(vec), vec),), (tpl,))


def test_two_gon_rejected():
    r = SubdivisionRule((TileType("d", 2, (1, 1)),),
                        (SubdivisionTemplate("d", 2, ((0, 1), (1, 0)), (("d", (0, 1)),)),))
    assert "too few sides" in validate_rule(r).kinds()


def test_boundary_mismatch_detected():
    # the vector claims 13 pieces on edge 0 but the template arc has one
    r = _tri_rule((13, 1, 1), [(0, 1, 2)], ((0, 1), (1, 2), (2, 0)), 3)
    kinds = validate_rule(r).kinds()
    assert "boundary mismatch" in kinds
    with pytest.raises(RuleError):
        check_rule(r)


def test_missing_and_unknown_templates():
    tt = TileType("t", 3, (1, 1, 1))
    tpl = SubdivisionTemplate("u", 3, ((0, 1), (1, 2), (2, 0)), (("t", (0, 1, 2)),))
    kinds = validate_rule(SubdivisionRule((tt,), (tpl,))).kinds()
    assert {"unknown tile type", "missing template"} <= kinds


def test_unknown_subtile_label():
    r = _tri_rule((1, 1, 1), [(0, 1, 2)], ((0, 1), (1, 2), (2, 0)), 3)
    bad = SubdivisionRule(r.tile_types, (SubdivisionTemplate(
        "t", 3, r.templates[0].arcs, (("t4", (0, 1, 2)),)),))
    rep = validate_rule(bad)
    assert not rep.ok
    assert any("t4" in str(v) for v in rep.violations)


def test_identity_rule_is_valid():
    r = _tri_rule((1, 1, 1), [(0, 1, 2)], ((0, 1), (1, 2), (2, 0)), 3)
    assert validate_rule(r).ok


def test_mesh_heuristic():
    assert mesh_heuristic(builtin("R2"), 3).mesh_ok
    assert mesh_heuristic(builtin("pentagonal"), 3).max_valence["t"] == 4
    rep = mesh_heuristic(builtin("R1"), 4)
    assert not rep.mesh_ok
    assert sorted(rep.unsplit_edges) == [("t2", 2), ("t2", 4)]
    assert "does not" in rep.verdict


def test_rule_equality_ignores_name():
    a = make_rpq(2, 3)
    assert a == builtin("R2") and hash(a.templates[0]) == hash(builtin("R2").templates[0])
    assert a != make_rpq(3, 2)
    assert isinstance(counting_matrix(a), np.ndarray)
