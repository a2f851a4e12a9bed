"""Finite subdivision rules stored as per-tile-type templates.

Each tile type owns one template: a disk complex whose boundary is split
into one arc per parent edge. Arc ``j`` runs from parent corner ``j`` to
corner ``j + 1`` counter-clockwise, so its length fixes how many sub-edges
parent edge ``j`` receives. Every subtile is a vertex cycle listed from its
distinguished corner, counter-clockwise, which is the structure map onto
its own tile type.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .complex import CellComplex, ValidationReport, boundary_vertex_cycle, validate_complex
from .errors import NotADiskError, RuleError, UnknownTileTypeError


@dataclass(frozen=True)
class TileType:
    name: str
    edge_count: int
    # sub-edges that each edge receives in one subdivision
    subdivision: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class SubdivisionTemplate:
    tile_type: str
    n_vertices: int
    arcs: tuple[tuple[int, ...], ...]
    subtiles: tuple[tuple[str, tuple[int, ...]], ...]

    def __eq__(self, other):
        if not isinstance(other, SubdivisionTemplate):
            return NotImplemented
        return (self.tile_type, self.n_vertices, self.arcs, self.subtiles) == (
            other.tile_type, other.n_vertices, other.arcs, other.subtiles)

    def __hash__(self):
        return hash((self.tile_type, self.n_vertices, self.arcs, self.subtiles))

    @property
    def corners(self) -> tuple[int, ...]:
        return tuple(a[0] for a in self.arcs)

    @property
    def arc_lengths(self) -> tuple[int, ...]:
        return tuple(len(a) - 1 for a in self.arcs)

    @cached_property
    def complex(self) -> CellComplex:
        return CellComplex.from_vertex_cycles(
            [c for _, c in self.subtiles],
            labels=[lab for lab, _ in self.subtiles],
            n_vertices=self.n_vertices,
        )

    @cached_property
    def gluing(self) -> "_Gluing":
        return _Gluing.build(self)


@dataclass
class _Gluing:
    """Precomputed tables used to instantiate a template inside a tile."""

    interior_vertices: list[int]
    # template edge -> (arc, position along arc, stored in arc direction)
    boundary_edges: dict[int, tuple[int, int, bool]]
    interior_edges: list[int]
    edges: tuple[tuple[int, int], ...]
    subtiles: list[tuple[str, tuple[tuple[int, bool], ...]]]

    @classmethod
    def build(cls, t: SubdivisionTemplate) -> "_Gluing":
        cx = t.complex
        on_arc = {v for a in t.arcs for v in a}
        pair_to_edge = {}
        for e, (a, b) in enumerate(cx.edges):
            pair_to_edge[(a, b)] = (e, True)
            pair_to_edge[(b, a)] = (e, False)
        boundary = {}
        for j, arc in enumerate(t.arcs):
            for i in range(len(arc) - 1):
                hit = pair_to_edge.get((arc[i], arc[i + 1]))
                if hit is None:
                    raise RuleError(
                        f"template {t.tile_type}: arc {j} step {i} is not a template edge")
                boundary[hit[0]] = (j, i, hit[1])
        interior_edges = [e for e in range(len(cx.edges)) if e not in boundary]
        return cls(
            interior_vertices=[v for v in range(t.n_vertices) if v not in on_arc],
            boundary_edges=boundary,
            interior_edges=interior_edges,
            edges=cx.edges,
            subtiles=[(tile.label, tile.darts) for tile in cx.tiles],
        )


@dataclass(frozen=True)
class SubdivisionRule:
    tile_types: tuple[TileType, ...]
    templates: tuple[SubdivisionTemplate, ...]
    name: str = field(default="rule", compare=False)
    # e.g. ("rpq", p, q) for generated members of the R_{p,q} family
    family: tuple | None = field(default=None, compare=False)

    @cached_property
    def types(self) -> dict[str, TileType]:
        return {t.name: t for t in self.tile_types}

    @cached_property
    def template_of(self) -> dict[str, SubdivisionTemplate]:
        return {t.tile_type: t for t in self.templates}

    @property
    def type_names(self) -> list[str]:
        return [t.name for t in self.tile_types]

    def tile_type(self, name: str) -> TileType:
        try:
            return self.types[name]
        except KeyError:
            raise UnknownTileTypeError(f"unknown tile type {name!r}") from None

    def template(self, name: str) -> SubdivisionTemplate:
        self.tile_type(name)
        try:
            return self.template_of[name]
        except KeyError:
            raise UnknownTileTypeError(f"tile type {name!r} has no template") from None

    def single_tile(self, name: str) -> CellComplex:
        """The tile type itself as a one-tile complex."""
        k = self.tile_type(name).edge_count
        return CellComplex.from_vertex_cycles([list(range(k))], [name])


def validate_rule(r: SubdivisionRule) -> ValidationReport:
    """Check tile types and templates; never raises."""
    report = ValidationReport()
    names = [t.name for t in r.tile_types]
    for n in sorted({n for n in names if names.count(n) > 1}):
        report.add("duplicate type", f"tile type {n!r} declared more than once")
    types = {t.name: t for t in r.tile_types}
    for t in r.tile_types:
        if t.edge_count < 3:
            report.add("too few sides", f"tile type {t.name!r} has {t.edge_count} edges")
        if len(t.subdivision) != t.edge_count:
            report.add("subdivision vector",
                       f"tile type {t.name!r}: {len(t.subdivision)} entries for {t.edge_count} edges")
        if any(s < 1 for s in t.subdivision):
            report.add("subdivision vector", f"tile type {t.name!r} has an entry below 1")

    seen_templates = set()
    for tpl in r.templates:
        where = f"template {tpl.tile_type!r}"
        if tpl.tile_type not in types:
            report.add("unknown tile type", f"{where} is for undeclared type {tpl.tile_type!r}")
            continue
        if tpl.tile_type in seen_templates:
            report.add("duplicate template", f"{where} given twice")
        seen_templates.add(tpl.tile_type)
        _validate_template(tpl, types, report)
    for n in names:
        if n not in seen_templates:
            report.add("missing template", f"tile type {n!r} has no template")
    return report


def _validate_template(tpl: SubdivisionTemplate, types: dict[str, TileType],
                       report: ValidationReport) -> None:
    where = f"template {tpl.tile_type!r}"
    parent = types[tpl.tile_type]
    bad_label = False
    for lab, cyc in tpl.subtiles:
        if lab not in types:
            report.add("unknown tile type", f"{where}: subtile references undeclared type {lab!r}")
            bad_label = True
        elif len(cyc) != types[lab].edge_count:
            report.add("subtile arity",
                       f"{where}: subtile of type {lab!r} has {len(cyc)} corners, "
                       f"expected {types[lab].edge_count}")
        if any(not 0 <= v < tpl.n_vertices for v in cyc):
            report.add("bad vertex", f"{where}: subtile vertex outside 0..{tpl.n_vertices - 1}")
            return
    if any(not 0 <= v < tpl.n_vertices for a in tpl.arcs for v in a):
        report.add("bad vertex", f"{where}: arc vertex outside 0..{tpl.n_vertices - 1}")
        return
    if len(tpl.arcs) != parent.edge_count:
        report.add("boundary mismatch",
                   f"{where}: {len(tpl.arcs)} arcs for a {parent.edge_count}-gon")
        return
    k = len(tpl.arcs)
    for j, arc in enumerate(tpl.arcs):
        if len(arc) < 2:
            report.add("boundary mismatch", f"{where}: arc {j} has no edges")
            return
        if arc[-1] != tpl.arcs[(j + 1) % k][0]:
            report.add("boundary mismatch", f"{where}: arc {j} does not end at corner {(j + 1) % k}")
    total = sum(tpl.arc_lengths)
    expected = sum(parent.subdivision)
    if tpl.arc_lengths != parent.subdivision:
        report.add("boundary mismatch",
                   f"{where}: arcs carry {list(tpl.arc_lengths)} sub-edges ({total} total), "
                   f"subdivision vector is {list(parent.subdivision)} ({expected} total)")
    if not report.ok:
        return

    sub = validate_complex(tpl.complex)
    for v in sub.violations:
        report.add(v.kind, f"{where}: {v.detail}")
    if not sub.ok:
        return
    try:
        bcycle = boundary_vertex_cycle(tpl.complex)
    except NotADiskError as exc:
        report.add("boundary mismatch", f"{where}: {exc}")
        return
    arcs_cycle = [v for arc in tpl.arcs for v in arc[:-1]]
    if not _same_cycle(bcycle, arcs_cycle):
        report.add("boundary mismatch", f"{where}: arcs do not trace the template boundary")
        return
    if bad_label:
        return
    # edges shared by two subtiles must be split the same number of times from both sides
    cx = tpl.complex
    counts: dict[int, list[int]] = {}
    for tile in cx.tiles:
        vec = types[tile.label].subdivision
        for pos, (e, _) in enumerate(tile.darts):
            counts.setdefault(e, []).append(vec[pos])
    for e, cs in counts.items():
        if len(set(cs)) > 1:
            report.add("inconsistent edge subdivision",
                       f"{where}: interior edge {cx.edges[e]} split {cs[0]} and {cs[1]} ways")


def _same_cycle(a: Sequence[int], b: Sequence[int]) -> bool:
    if len(a) != len(b):
        return False
    if not a:
        return True
    try:
        s = list(b).index(a[0])
    except ValueError:
        return False
    return list(a) == list(b[s:]) + list(b[:s])


def check_rule(r: SubdivisionRule) -> SubdivisionRule:
    rep = validate_rule(r)
    if not rep.ok:
        raise RuleError("invalid rule: " + "; ".join(map(str, rep.violations)))
    return r


# -- the R_{p,q} family -----------------------------------------------------

def _rpq(p: int, q: int, t2: str = "t2", t3: str = "t3", name: str | None = None) -> SubdivisionRule:
    # quadrilateral t1, quadrilateral t2, (q+3)-gon t3 whose first q edges form its bottom
    tile_types = [TileType("t1", 4, (q, q, q, q))]
    if p > 1:
        tile_types.append(TileType(t2, 4, (q, p, q, p)))
    tile_types.append(TileType(t3, q + 3, (q,) * q + (p, q, p)))

    # t1: corners 0..3, side vertices, inner square
    nv = 4
    arcs = []
    for j in range(4):
        mids = list(range(nv, nv + q - 1))
        nv += q - 1
        arcs.append((j, *mids, (j + 1) % 4))
    inner = list(range(nv, nv + 4))
    nv += 4
    subs = [("t1", tuple(inner))]
    for j in range(4):
        subs.append((t3, (*arcs[j], inner[(j + 1) % 4], inner[j])))
    templates = [SubdivisionTemplate("t1", nv, tuple(arcs), tuple(subs))]

    def grid_vertex(x, y):
        return y * (q + 1) + x

    if p > 1:
        arcs2 = (
            tuple(grid_vertex(x, 0) for x in range(q + 1)),
            tuple(grid_vertex(q, y) for y in range(p + 1)),
            tuple(grid_vertex(x, p) for x in range(q, -1, -1)),
            tuple(grid_vertex(0, y) for y in range(p, -1, -1)),
        )
        subs2 = tuple(
            (t2, (grid_vertex(x, y), grid_vertex(x + 1, y),
                  grid_vertex(x + 1, y + 1), grid_vertex(x, y + 1)))
            for y in range(p) for x in range(q)
        )
        templates.append(SubdivisionTemplate(t2, (p + 1) * (q + 1), arcs2, subs2))

    # t3: (q+1) x (p+1) grid plus q-1 extra vertices under each bottom cell
    nv = (p + 1) * (q + 1)
    bottom_mids = []
    for _ in range(q):
        bottom_mids.append(list(range(nv, nv + q - 1)))
        nv += q - 1
    arcs3 = [
        (grid_vertex(i, 0), *bottom_mids[i], grid_vertex(i + 1, 0)) for i in range(q)
    ]
    arcs3.append(tuple(grid_vertex(q, y) for y in range(p + 1)))
    arcs3.append(tuple(grid_vertex(x, p) for x in range(q, -1, -1)))
    arcs3.append(tuple(grid_vertex(0, y) for y in range(p, -1, -1)))
    subs3 = [
        (t3, (grid_vertex(x, 0), *bottom_mids[x], grid_vertex(x + 1, 0),
              grid_vertex(x + 1, 1), grid_vertex(x, 1)))
        for x in range(q)
    ]
    subs3 += [
        (t2, (grid_vertex(x, y), grid_vertex(x + 1, y),
              grid_vertex(x + 1, y + 1), grid_vertex(x, y + 1)))
        for y in range(1, p) for x in range(q)
    ]
    templates.append(SubdivisionTemplate(t3, nv, tuple(arcs3), tuple(subs3)))
    return SubdivisionRule(
        tuple(tile_types), tuple(templates),
        name=name or f"R_{p}_{q}", family=("rpq", p, q),
    )


def make_rpq(p: int, q: int) -> SubdivisionRule:
    """Generate the three-type rule R_{p,q}.

    ``t1`` splits into a central ``t1`` ringed by four ``t3``; ``t2`` into a
    ``p`` by ``q`` grid of ``t2``; ``t3`` into the same grid with its bottom
    row of type ``t3``.
    """
    if int(p) != p or int(q) != q or p < 2 or q < 2:
        raise RuleError(f"R_{{p,q}} needs integers p, q >= 2 (got p={p}, q={q})")
    return _rpq(int(p), int(q))


def _pentagonal() -> SubdivisionRule:
    # corners 0-4, edge midpoints 5-9, inner pentagon 10-14
    c = list(range(5))
    m = list(range(5, 10))
    inner = list(range(10, 15))
    arcs = tuple((c[j], m[j], c[(j + 1) % 5]) for j in range(5))
    subs = [("t", tuple(inner))]
    for i in range(5):
        subs.append(("t", (c[i], m[i], inner[i], inner[i - 1], m[i - 1])))
    tpl = SubdivisionTemplate("t", 15, arcs, tuple(subs))
    return SubdivisionRule((TileType("t", 5, (2,) * 5),), (tpl,), name="pentagonal")


def builtin(name: str) -> SubdivisionRule:
    """Return one of the encoded example rules: pentagonal, R1 or R2."""
    key = name.strip()
    if key.lower() in ("pentagonal", "p"):
        return _pentagonal()
    if key.upper() == "R1":
        # R1 behaves like R_{1,2}: a single row, so side edges never split
        return _rpq(1, 2, t3="t2", name="R1")
    if key.upper() == "R2":
        return make_rpq(2, 3)
    raise RuleError(f"unknown built-in rule {name!r} (choose pentagonal, R1, R2)")


BUILTIN_NAMES = ("pentagonal", "R1", "R2")


def counting_matrix(r: SubdivisionRule) -> np.ndarray:
    """Entry ``(i, j)``: subtiles of type ``j`` in the template of type ``i``."""
    names = r.type_names
    idx = {n: i for i, n in enumerate(names)}
    m = np.zeros((len(names), len(names)), dtype=np.int64)
    for n in names:
        for lab, _ in r.template(n).subtiles:
            m[idx[n], idx[r.tile_type(lab).name]] += 1
    return m


def predicted_counts(r: SubdivisionRule, start: dict[str, int], n: int) -> list[dict[str, int]]:
    """Type counts after 0..n subdivisions, from the counting matrix alone."""
    names = r.type_names
    mat = counting_matrix(r).tolist()
    vec = [int(start.get(nm, 0)) for nm in names]
    out = [dict(zip(names, vec))]
    for _ in range(n):
        vec = [sum(vec[i] * mat[i][j] for i in range(len(names))) for j in range(len(names))]
        out.append(dict(zip(names, vec)))
    return out


@dataclass
class MeshReport:
    depth: int
    # (tile type, edge index) pairs never split into two or more pieces
    unsplit_edges: list[tuple[str, int]]
    max_valence: dict[str, int]

    @property
    def mesh_ok(self) -> bool:
        return not self.unsplit_edges

    @property
    def verdict(self) -> str:
        if self.mesh_ok:
            return "every edge subdivides (heuristic)"
        return "mesh does not approach 0 (heuristic)"


def mesh_heuristic(r: SubdivisionRule, depth: int) -> MeshReport:
    """Heuristic check of the mesh-approaching-0 and bounded-valence hypotheses."""
    from .subdivision import iterate

    memo: dict[tuple[str, int, int], bool] = {}

    def splits(name: str, j: int, d: int) -> bool:
        if d <= 0:
            return False
        key = (name, j, d)
        if key in memo:
            return memo[key]
        memo[key] = False
        tt = r.tile_type(name)
        if tt.subdivision[j] >= 2:
            memo[key] = True
            return True
        tpl = r.template(name)
        arc = tpl.arcs[j]
        a, b = arc[0], arc[1]
        res = False
        for lab, cyc in tpl.subtiles:
            k = len(cyc)
            for pos in range(k):
                if cyc[pos] == a and cyc[(pos + 1) % k] == b:
                    res = splits(lab, pos, d - 1)
        memo[key] = res
        return res

    unsplit = [
        (t.name, j) for t in r.tile_types for j in range(t.edge_count)
        if not splits(t.name, j, depth)
    ]
    valence = {}
    for t in r.tile_types:
        chain = iterate(r, r.single_tile(t.name), depth)
        valence[t.name] = max(max(c.complex.degrees) for c in chain)
    return MeshReport(depth, unsplit, valence)
