import pytest
from hypothesis import given, settings, strategies as st

from fsrgrowth.complex import CellComplex, boundary_vertex_cycle, validate_complex
from fsrgrowth.errors import BoundaryMismatchError, BudgetExceededError, UnknownTileTypeError
from fsrgrowth.rules import builtin, make_rpq, predicted_counts
from fsrgrowth.subdivision import iterate, subdivide

RULES = {"pentagonal": builtin("pentagonal"), "R1": builtin("R1"), "R2": builtin("R2"),
         "R_3_2": make_rpq(3, 2)}


@pytest.mark.parametrize("name", sorted(RULES))
def test_counts_follow_counting_matrix(name):
    r = RULES[name]
    for t in r.type_names:
        chain = iterate(r, r.single_tile(t), 3)
        for step, pred in zip(chain, predicted_counts(r, {t: 1}, 3)):
            assert dict(step.complex.label_counts()) == {k: v for k, v in pred.items() if v}
            assert validate_complex(step.complex).ok


def test_r23_boundary_lengths():
    r = builtin("R2")
    # the t1 boundary splits 3 ways per edge each step: 4, 12, 36, 108
    lengths = [len(s.complex.boundary_edges) for s in iterate(r, r.single_tile("t1"), 3)]
    assert lengths == [4, 12, 36, 108]


def test_genealogy_and_children():
    r = builtin("pentagonal")
    step = subdivide(r, subdivide(r, r.single_tile("t")).complex)
    for parent, kids in enumerate(step.children()):
        assert len(kids) == 6
        for j, k in enumerate(kids):
            g = step.complex.tiles[k].genealogy
            assert g == step.parent.tiles[parent].genealogy + (j,)
    assert len({t.genealogy for t in step.complex.tiles}) == 36


def test_deterministic():
    r = builtin("R2")
    a = iterate(r, r.single_tile("t3"), 3)[-1].complex
    b = iterate(r, r.single_tile("t3"), 3)[-1].complex
    assert a.edges == b.edges and a.tiles == b.tiles


def test_empty_complex():
    r = builtin("R1")
    empty = CellComplex(0, (), ())
    assert subdivide(r, empty).complex is empty


def test_budget():
    r = builtin("pentagonal")
    with pytest.raises(BudgetExceededError):
        iterate(r, r.single_tile("t"), 4, max_tiles=1000)


def test_unknown_label():
    c = CellComplex.from_vertex_cycles([(0, 1, 2, 3, 4)], labels=["t9"])
    with pytest.raises(UnknownTileTypeError):
        subdivide(builtin("pentagonal"), c)


def test_inconsistent_neighbours_rejected():
    # a t1 (sides split 3 ways) glued to a t2 side split 2 ways in R_{2,3}
    c = CellComplex.from_vertex_cycles([(0, 1, 2, 3), (1, 4, 5, 2)], labels=["t1", "t2"])
    with pytest.raises(BoundaryMismatchError):
        subdivide(make_rpq(2, 3), c)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 4), st.integers(2, 4), st.sampled_from(["t1", "t2", "t3"]),
       st.integers(1, 2))
def test_subdivision_keeps_disk(p, q, t, n):
    r = make_rpq(p, q)
    c = iterate(r, r.single_tile(t), n)[-1].complex
    assert validate_complex(c).ok
    if n == 1:
        # one step cuts side j of the parent into vector[j] pieces
        assert len(boundary_vertex_cycle(c)) == sum(r.tile_type(t).subdivision)
