"""Finite polygonal 2-complexes.

A complex is stored as dense integer ids: vertices ``0..n_vertices-1``,
edges as ``(tail, head)`` pairs, and tiles as cyclic sequences of *darts*.
A dart ``(e, forward)`` traverses edge ``e`` tail->head when ``forward`` is
true and head->tail otherwise. The first dart of a tile starts at the
tile's distinguished corner, so position ``j`` in the cycle is edge ``j`` of
the tile's type.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Sequence

from .errors import NotADiskError

SKINNY = "skinny"
FAT = "fat"
MODES = (SKINNY, FAT)


class Tile(NamedTuple):
    label: str
    darts: tuple[tuple[int, bool], ...]
    # subtile indices back to the generation-0 tile, outermost first
    genealogy: tuple[int, ...] = ()


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: str

    def __str__(self):
        return f"{self.kind}: {self.detail}"


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)
    euler: int | None = None

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, kind: str, detail: str) -> None:
        self.violations.append(Violation(kind, detail))

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def __bool__(self):
        return self.ok


@dataclass(frozen=True, eq=False)
class CellComplex:
    """An immutable polygonal 2-complex."""

    n_vertices: int
    edges: tuple[tuple[int, int], ...]
    tiles: tuple[Tile, ...]

    @classmethod
    def from_vertex_cycles(
        cls,
        cycles: Sequence[Sequence[int]],
        labels: Sequence[str] | None = None,
        n_vertices: int | None = None,
    ) -> "CellComplex":
        """Build a complex from tile vertex cycles; edges are vertex pairs.

        Consecutive cycle vertices ``a, b`` share one edge ``{a, b}``, so this
        constructor cannot express multi-edges.
        """
        if labels is None:
            labels = ["t"] * len(cycles)
        edge_ids: dict[frozenset, int] = {}
        edges: list[tuple[int, int]] = []
        tiles = []
        for label, cyc in zip(labels, cycles):
            darts = []
            for i, a in enumerate(cyc):
                b = cyc[(i + 1) % len(cyc)]
                key = frozenset((a, b))
                if key not in edge_ids:
                    edge_ids[key] = len(edges)
                    edges.append((a, b))
                e = edge_ids[key]
                darts.append((e, edges[e][0] == a))
            tiles.append(Tile(label, tuple(darts)))
        if n_vertices is None:
            n_vertices = 1 + max((v for c in cycles for v in c), default=-1)
        return cls(n_vertices, tuple(edges), tuple(tiles))

    # -- derived incidence -------------------------------------------------

    def dart_tail(self, dart: tuple[int, bool]) -> int:
        e, fwd = dart
        return self.edges[e][0] if fwd else self.edges[e][1]

    def dart_head(self, dart: tuple[int, bool]) -> int:
        e, fwd = dart
        return self.edges[e][1] if fwd else self.edges[e][0]

    @cached_property
    def tile_vertices(self) -> tuple[tuple[int, ...], ...]:
        edges = self.edges
        return tuple(
            tuple(edges[e][0] if fwd else edges[e][1] for e, fwd in t.darts)
            for t in self.tiles
        )

    @cached_property
    def edge_tiles(self) -> tuple[tuple[int, ...], ...]:
        uses: list[list[int]] = [[] for _ in self.edges]
        for i, t in enumerate(self.tiles):
            for e, _ in t.darts:
                if 0 <= e < len(uses):
                    uses[e].append(i)
        return tuple(tuple(u) for u in uses)

    @cached_property
    def vertex_tiles(self) -> tuple[tuple[int, ...], ...]:
        uses: list[set[int]] = [set() for _ in range(self.n_vertices)]
        for i, vs in enumerate(self.tile_vertices):
            for v in vs:
                uses[v].add(i)
        return tuple(tuple(sorted(u)) for u in uses)

    @cached_property
    def boundary_edges(self) -> tuple[int, ...]:
        return tuple(e for e, u in enumerate(self.edge_tiles) if len(u) == 1)

    @cached_property
    def boundary_vertices(self) -> frozenset[int]:
        return frozenset(v for e in self.boundary_edges for v in self.edges[e])

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        deg = [0] * self.n_vertices
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return tuple(deg)

    @property
    def euler_characteristic(self) -> int:
        return self.n_vertices - len(self.edges) + len(self.tiles)

    def label_counts(self) -> Counter:
        return Counter(t.label for t in self.tiles)

    def __len__(self):
        return len(self.tiles)

    def __repr__(self):
        return (
            f"CellComplex(V={self.n_vertices}, E={len(self.edges)}, "
            f"F={len(self.tiles)})"
        )


def validate_complex(c: CellComplex, disk: bool = True) -> ValidationReport:
    """Check the well-formedness conditions of ``c``.

    Never raises; every problem found is recorded as a violation. With
    ``disk=True`` the complex must also be a closed topological disk.
    """
    report = ValidationReport(euler=c.euler_characteristic)
    ne = len(c.edges)
    for e, (a, b) in enumerate(c.edges):
        if not (0 <= a < c.n_vertices and 0 <= b < c.n_vertices):
            report.add("bad vertex", f"edge {e} has endpoint outside 0..{c.n_vertices - 1}")
        elif a == b:
            report.add("self-loop", f"edge {e} is a loop at vertex {a}")
    if not report.ok:
        return report

    structurally_ok = True
    for i, t in enumerate(c.tiles):
        if len(t.darts) < 3:
            report.add("too few sides", f"tile {i} has {len(t.darts)} sides")
        if any(not 0 <= e < ne for e, _ in t.darts):
            report.add("bad edge", f"tile {i} references a missing edge")
            structurally_ok = False
            continue
        k = len(t.darts)
        for j in range(k):
            if c.dart_head(t.darts[j]) != c.dart_tail(t.darts[(j + 1) % k]):
                report.add("open cycle", f"tile {i} breaks between sides {j} and {(j + 1) % k}")
                structurally_ok = False
                break

    uses: list[list[bool]] = [[] for _ in c.edges]
    for t in c.tiles:
        for e, fwd in t.darts:
            if 0 <= e < ne:
                uses[e].append(fwd)
    for e, u in enumerate(uses):
        if not u:
            report.add("dangling edge", f"edge {e} lies on no tile")
        elif len(u) > 2:
            report.add("edge over-shared", f"edge {e} is used by {len(u)} tile sides")
            structurally_ok = False
        elif len(u) == 2 and u[0] == u[1]:
            report.add("orientation", f"edge {e} is traversed twice in the same direction")
            structurally_ok = False

    if not disk:
        return report
    if report.euler != 1:
        report.add("euler", f"V - E + F = {report.euler}, expected 1")
    if not c.tiles:
        return report

    used = {v for e in c.edges for v in e}
    isolated = c.n_vertices - len(used)
    if isolated:
        report.add("isolated vertex", f"{isolated} vertices lie on no edge")
    if not _connected(c):
        report.add("disconnected", "complex has more than one component")
    if not structurally_ok:
        return report

    try:
        n_cycles = len(_boundary_cycles(c))
    except NotADiskError as exc:
        report.add("boundary", str(exc))
    else:
        if n_cycles != 1:
            report.add("boundary", f"{n_cycles} boundary cycles, expected 1")
    pinched = _pinched_vertices(c)
    if pinched:
        report.add("pinched vertex", f"vertices {sorted(pinched)[:10]} are not manifold points")
    return report


def _connected(c: CellComplex) -> bool:
    parent = list(range(c.n_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in c.edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    roots = {find(v) for e in c.edges for v in e}
    return len(roots) <= 1


def _boundary_darts(c: CellComplex) -> list[tuple[int, bool]]:
    out = []
    for t in c.tiles:
        for e, fwd in t.darts:
            if len(c.edge_tiles[e]) == 1:
                out.append((e, fwd))
    return out


def _boundary_cycles(c: CellComplex) -> list[list[tuple[int, bool]]]:
    darts = sorted(_boundary_darts(c), key=lambda d: (c.dart_tail(d), d))
    by_tail = defaultdict(list)
    for d in darts:
        by_tail[c.dart_tail(d)].append(d)
    if any(len(v) > 1 for v in by_tail.values()):
        raise NotADiskError("boundary passes through a vertex more than once")
    seen = set()
    cycles = []
    for d in darts:
        if d in seen:
            continue
        cyc = []
        cur = d
        while cur not in seen:
            seen.add(cur)
            cyc.append(cur)
            nxt = by_tail.get(c.dart_head(cur))
            if not nxt:
                raise NotADiskError("boundary is not a closed cycle")
            cur = nxt[0]
        cycles.append(cyc)
    return cycles


def _pinched_vertices(c: CellComplex) -> set[int]:
    # corners around a vertex must form one fan (a single path or cycle)
    corners = defaultdict(list)  # v -> [(in_edge, out_edge)]
    for t in c.tiles:
        k = len(t.darts)
        for j in range(k):
            d_in, d_out = t.darts[j - 1], t.darts[j]
            corners[c.dart_tail(d_out)].append((d_in[0], d_out[0]))
    bad = set()
    for v, cs in corners.items():
        by_in = {}
        for idx, (ein, _) in enumerate(cs):
            by_in.setdefault(ein, idx)
        parent = list(range(len(cs)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for idx, (_, eout) in enumerate(cs):
            nxt = by_in.get(eout)
            if nxt is not None:
                parent[find(idx)] = find(nxt)
        if len({find(i) for i in range(len(cs))}) != 1:
            bad.add(v)
    return bad


def boundary_cycle(c: CellComplex) -> list[tuple[int, bool]]:
    """Return the boundary of a disk complex as a cycle of darts.

    Darts are oriented like the tiles that own them and the cycle starts at
    the boundary vertex with the smallest id.
    """
    if not c.tiles:
        raise NotADiskError("empty complex has no boundary cycle")
    cycles = _boundary_cycles(c)
    if len(cycles) != 1:
        raise NotADiskError(f"expected one boundary cycle, found {len(cycles)}")
    return cycles[0]


def boundary_vertex_cycle(c: CellComplex) -> list[int]:
    return [c.dart_tail(d) for d in boundary_cycle(c)]


def tile_adjacency(c: CellComplex, mode: str = FAT) -> list[tuple[int, ...]]:
    """Neighbour lists over tiles.

    ``fat``: tiles sharing an edge. ``skinny``: tiles sharing a vertex.
    """
    if mode not in MODES:
        raise ValueError(f"unknown adjacency mode {mode!r}")
    n = len(c.tiles)
    nbrs: list[set[int]] = [set() for _ in range(n)]
    groups = c.edge_tiles if mode == FAT else c.vertex_tiles
    for g in groups:
        if len(g) < 2:
            continue
        for a in g:
            nbrs[a].update(g)
    for i in range(n):
        nbrs[i].discard(i)
    return [tuple(sorted(s)) for s in nbrs]
