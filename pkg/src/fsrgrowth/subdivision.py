"""The subdivision operator X -> R(X) with tile genealogy."""

from __future__ import annotations

from dataclasses import dataclass

from .complex import CellComplex, Tile
from .errors import BoundaryMismatchError, BudgetExceededError
from .rules import SubdivisionRule

DEFAULT_MAX_TILES = 10_000_000


@dataclass(frozen=True, eq=False)
class SubdividedComplex:
    complex: CellComplex
    parent: CellComplex | None
    # tile index in ``parent`` for every tile of ``complex``
    parent_tile: tuple[int, ...]
    # ("edge", parent edge, piece) or ("tile", parent tile, template edge)
    edge_provenance: tuple[tuple[str, int, int], ...]

    @property
    def generation_step(self) -> bool:
        return self.parent is not None

    def children(self) -> list[list[int]]:
        """Subtile indices of every parent tile, in template order."""
        out: list[list[int]] = [[] for _ in (self.parent.tiles if self.parent else ())]
        for i, p in enumerate(self.parent_tile):
            out[p].append(i)
        return out


def subdivide(r: SubdivisionRule, c: CellComplex,
              max_tiles: int = DEFAULT_MAX_TILES) -> SubdividedComplex:
    """Replace every tile of ``c`` by its template and glue along parent edges."""
    if not c.tiles:
        return SubdividedComplex(c, c, (), ())
    templates = [r.template(t.label) for t in c.tiles]
    total = sum(len(t.subtiles) for t in templates)
    if total > max_tiles:
        raise BudgetExceededError(
            f"subdivision would create {total} tiles (budget {max_tiles})")

    counts: list[int | None] = [None] * len(c.edges)
    for ti, t in enumerate(c.tiles):
        vec = r.tile_type(t.label).subdivision
        for pos, (e, _) in enumerate(t.darts):
            n = vec[pos]
            if counts[e] is None:
                counts[e] = n
            elif counts[e] != n:
                raise BoundaryMismatchError(
                    f"edge {e} {c.edges[e]} is split {counts[e]} ways by one tile "
                    f"and {n} ways by tile {ti} ({t.label}, side {pos})")

    nv = c.n_vertices
    edges: list[tuple[int, int]] = []
    prov: list[tuple[str, int, int]] = []
    sub_vertices: list[list[int]] = []
    sub_edges: list[list[int]] = []
    for e, (u, v) in enumerate(c.edges):
        n = counts[e] or 1
        seq = [u, *range(nv, nv + n - 1), v]
        nv += n - 1
        ids = list(range(len(edges), len(edges) + n))
        for i in range(n):
            edges.append((seq[i], seq[i + 1]))
            prov.append(("edge", e, i))
        sub_vertices.append(seq)
        sub_edges.append(ids)

    tiles: list[Tile] = []
    parent_tile: list[int] = []
    for ti, (t, tpl) in enumerate(zip(c.tiles, templates)):
        g = tpl.gluing
        vmap = [0] * tpl.n_vertices
        for j, (e, fwd) in enumerate(t.darts):
            seq = sub_vertices[e]
            n = len(seq) - 1
            arc = tpl.arcs[j]
            if fwd:
                for i, a in enumerate(arc):
                    vmap[a] = seq[i]
            else:
                for i, a in enumerate(arc):
                    vmap[a] = seq[n - i]
        for a in g.interior_vertices:
            vmap[a] = nv
            nv += 1
        emap: list[tuple[int, bool]] = [(0, True)] * len(g.edges)
        for te, (j, i, along) in g.boundary_edges.items():
            e, fwd = t.darts[j]
            ids = sub_edges[e]
            if fwd:
                emap[te] = (ids[i], along)
            else:
                emap[te] = (ids[len(ids) - 1 - i], not along)
        for te in g.interior_edges:
            a, b = g.edges[te]
            emap[te] = (len(edges), True)
            edges.append((vmap[a], vmap[b]))
            prov.append(("tile", ti, te))
        for si, (label, darts) in enumerate(g.subtiles):
            nd = tuple(
                (emap[te][0], f if emap[te][1] else not f) for te, f in darts
            )
            tiles.append(Tile(label, nd, t.genealogy + (si,)))
            parent_tile.append(ti)

    out = CellComplex(nv, tuple(edges), tuple(tiles))
    return SubdividedComplex(out, c, tuple(parent_tile), tuple(prov))


def iterate(r: SubdivisionRule, c: CellComplex, n: int,
            max_tiles: int = DEFAULT_MAX_TILES) -> list[SubdividedComplex]:
    """Return the chain ``c, R(c), ..., R^n(c)``."""
    if n < 0:
        raise ValueError("number of subdivisions must be >= 0")
    chain = [SubdividedComplex(c, None, (), ())]
    for _ in range(n):
        chain.append(subdivide(r, chain[-1].complex, max_tiles=max_tiles))
    return chain
