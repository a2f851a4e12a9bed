import xml.etree.ElementTree as ET

import numpy as np
import pytest

from conftest import tower_for
from fsrgrowth.complex import CellComplex, boundary_vertex_cycle
from fsrgrowth.errors import NotADiskError
from fsrgrowth.render import RenderSpec, polygon_area, render_svg, tile_polygons, tutte_embedding
from fsrgrowth.rules import builtin
from fsrgrowth.subdivision import iterate


@pytest.mark.parametrize("name,tile", [("pentagonal", "t"), ("R2", "t3"), ("R1", "t2")])
def test_tutte_tiles_partition_boundary_polygon(name, tile):
    r = builtin(name)
    c = iterate(r, r.single_tile(tile), 2)[-1].complex
    pos = tutte_embedding(c)
    areas = [polygon_area(p) for p in tile_polygons(c, pos)]
    outer = polygon_area(pos[boundary_vertex_cycle(c)])
    assert min(areas) > 0
    assert sum(areas) == pytest.approx(outer, rel=1e-9)


def test_interior_vertices_are_barycentres():
    r = builtin("pentagonal")
    c = iterate(r, r.single_tile("t"), 2)[-1].complex
    pos = tutte_embedding(c)
    nbrs = {v: [] for v in range(c.n_vertices)}
    for a, b in c.edges:
        nbrs[a].append(b)
        nbrs[b].append(a)
    for v in set(range(c.n_vertices)) - c.boundary_vertices:
        assert np.allclose(pos[v], pos[nbrs[v]].mean(axis=0))


def test_svg_structure():
    t = tower_for("R2")
    spec = RenderSpec(t.stage(2), size=300, highlight=set(t.seed_tiles(2)))
    root = ET.fromstring(render_svg(spec))
    polys = root.findall("{http://www.w3.org/2000/svg}polygon")
    assert len(polys) == 29 and root.get("width") == "300"
    assert sum(p.get("fill") == "#e63946" for p in polys) == 1


def test_render_rejects():
    with pytest.raises(ValueError):
        render_svg(RenderSpec(builtin("R1").single_tile("t1"), embedding="circle"))
    with pytest.raises(NotADiskError):
        tutte_embedding(CellComplex(0, (), ()))
