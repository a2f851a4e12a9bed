"""Seeds, expansion towers, exact balls of the limit complex, and annuli.

A seed of type ``t`` at level ``k`` is a subtile of type ``t`` inside
``R^k(t)``. Stage ``m`` of the tower is ``R^(k*m)(t)``; the seed sits in
it as the tile whose genealogy is the seed path repeated ``m`` times, and
``phi^j(S)`` is the set of tiles whose genealogy starts with ``m - j``
copies of that path. Tiles of the expansion complex are therefore
identified across stages by stripping leading path blocks.
"""

from __future__ import annotations

import warnings
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterable

from .complex import FAT, MODES, SKINNY, CellComplex
from .errors import BudgetExceededError, FSRError, InsufficientStagesError
from .rules import SubdivisionRule
from .subdivision import DEFAULT_MAX_TILES, iterate, subdivide


@dataclass(frozen=True)
class Seed:
    tile_type: str
    level: int
    path: tuple[int, ...]
    # vertices of the subtile in R^level(t), listed against t's corners 0, 1, ...
    corners: tuple[int, ...]
    interior: bool


def find_seed(r: SubdivisionRule, max_level: int = 2,
              max_tiles: int = DEFAULT_MAX_TILES) -> list[Seed]:
    """Single-tile seeds: subtiles of ``R^k(t)`` of type ``t`` for k <= max_level.

    A level whose subdivision is a single tile is skipped, since such a
    subtile is ``t`` itself and cannot grow into a plane. Interior seeds come
    first, then lower levels.
    """
    seeds = []
    for t in r.tile_types:
        chain = iterate(r, r.single_tile(t.name), max_level, max_tiles=max_tiles)
        for level in range(1, max_level + 1):
            cx = chain[level].complex
            if len(cx.tiles) <= 1:
                continue
            bv = cx.boundary_vertices
            for i, tile in enumerate(cx.tiles):
                if tile.label != t.name:
                    continue
                vs = cx.tile_vertices[i]
                seeds.append(Seed(t.name, level, tile.genealogy, vs,
                                  interior=not any(v in bv for v in vs)))
    order = {n: i for i, n in enumerate(r.type_names)}
    seeds.sort(key=lambda s: (not s.interior, s.level, order[s.tile_type], s.path))
    return seeds


def primary_seed(r: SubdivisionRule, max_level: int = 3,
                 max_tiles: int = DEFAULT_MAX_TILES) -> Seed:
    for level in range(1, max_level + 1):
        seeds = find_seed(r, level, max_tiles=max_tiles)
        if seeds and seeds[0].interior:
            return seeds[0]
    seeds = find_seed(r, max_level, max_tiles=max_tiles)
    if not seeds:
        raise FSRError(f"rule {r.name} has no single-tile seed up to level {max_level}")
    return seeds[0]


class ExpansionTower:
    """Nested stages ``R^(k*m)(t)`` grown on demand.

    Stages are immutable once built; requesting a stage beyond the top one
    extends the tower, subject to ``max_tiles``.
    """

    def __init__(self, rule: SubdivisionRule, seed: Seed,
                 max_tiles: int = DEFAULT_MAX_TILES):
        self.rule = rule
        self.seed = seed
        self.max_tiles = max_tiles
        self._stages: list[CellComplex] = [rule.single_tile(seed.tile_type)]
        self._index: dict[int, dict[tuple[int, ...], int]] = {}
        if not seed.interior:
            warnings.warn(
                f"seed of type {seed.tile_type} touches the boundary of its parent; "
                "ball stabilization is checked empirically at every stage",
                stacklevel=2,
            )

    @property
    def built(self) -> int:
        """Index of the highest stage built so far."""
        return len(self._stages) - 1

    def stage(self, m: int) -> CellComplex:
        while self.built < m:
            self._extend()
        return self._stages[m]

    def _extend(self) -> None:
        cx = self._stages[-1]
        for _ in range(self.seed.level):
            try:
                cx = subdivide(self.rule, cx, max_tiles=self.max_tiles).complex
            except BudgetExceededError as exc:
                raise BudgetExceededError(
                    f"{exc}; tower reached stage {self.built}", stage=self.built) from None
        self._stages.append(cx)

    def _genealogy_index(self, m: int) -> dict[tuple[int, ...], int]:
        if m not in self._index:
            self._index[m] = {t.genealogy: i for i, t in enumerate(self.stage(m).tiles)}
        return self._index[m]

    def seed_tiles(self, m: int) -> list[int]:
        return [self._genealogy_index(m)[self.seed.path * m]]

    def blocks(self, m: int, i: int) -> int:
        """Number of leading seed-path blocks in the genealogy of tile ``i``."""
        g = self.stage(m).tiles[i].genealogy
        k = self.seed.level
        path = self.seed.path
        b = 0
        while b < m and g[b * k:(b + 1) * k] == path:
            b += 1
        return b

    def layer(self, m: int, i: int) -> int:
        """Smallest ``j`` with tile ``i`` of stage ``m`` in ``phi^j(S)``."""
        return m - self.blocks(m, i)

    def region(self, m: int, j: int) -> list[int]:
        """Tiles of stage ``m`` lying in ``phi^j(S)``."""
        if not 0 <= j <= m:
            raise ValueError("need 0 <= j <= m")
        prefix = self.seed.path * (m - j)
        n = len(prefix)
        return [i for i, t in enumerate(self.stage(m).tiles) if t.genealogy[:n] == prefix]

    def canonical_key(self, m: int, i: int) -> tuple[int, tuple[int, ...]]:
        """Stage-independent name of a tile: (first stage it appears in, genealogy there)."""
        j = self.layer(m, i)
        g = self.stage(m).tiles[i].genealogy
        return j, g[(m - j) * self.seed.level:]

    def verify_markers(self, m: int) -> bool:
        """Stage ``m - 1`` embeds in stage ``m`` as ``phi^(m-1)(S)``."""
        if m < 1:
            return True
        idx = self._genealogy_index(m)
        prev = self.stage(m - 1)
        for t in prev.tiles:
            j = idx.get(self.seed.path + t.genealogy)
            if j is None or self.stage(m).tiles[j].label != t.label:
                return False
        return len(self.region(m, m - 1)) == len(prev.tiles)


def build_tower(r: SubdivisionRule, seed: Seed, stages: int,
                max_tiles: int = DEFAULT_MAX_TILES) -> ExpansionTower:
    tower = ExpansionTower(r, seed, max_tiles=max_tiles)
    tower.stage(stages)
    for m in range(1, stages + 1):
        if not tower.verify_markers(m):
            raise FSRError(f"stage {m} does not contain stage {m - 1} as phi^{m - 1}(S)")
    return tower


def bfs_norms(c: CellComplex, sources: Iterable[int], mode: str) -> list[int]:
    """Path norm of every tile from ``sources`` (-1 if unreachable)."""
    if mode not in MODES:
        raise ValueError(f"unknown norm {mode!r}")
    dist = [-1] * len(c.tiles)
    q = deque()
    for s in sources:
        dist[s] = 0
        q.append(s)
    if mode == SKINNY:
        hubs = c.vertex_tiles
        members = c.tile_vertices
    else:
        hubs = c.edge_tiles
        members = tuple(tuple(e for e, _ in t.darts) for t in c.tiles)
    used = bytearray(len(hubs))
    while q:
        a = q.popleft()
        d = dist[a] + 1
        for h in members[a]:
            if used[h]:
                continue
            used[h] = 1
            for b in hubs[h]:
                if dist[b] < 0:
                    dist[b] = d
                    q.append(b)
    return dist


def boundary_distance(c: CellComplex, dist: list[int]) -> int:
    """Least norm among tiles that touch the outer boundary."""
    bv = c.boundary_vertices
    return min(
        (dist[i] for i, vs in enumerate(c.tile_vertices) if any(v in bv for v in vs)),
        default=0,
    )


@dataclass
class Ball:
    tower: ExpansionTower
    stage: int
    mode: str
    radius: int
    # tile index in the stage complex -> norm, for norms <= radius
    norms: dict[int, int]
    boundary_distance: int

    def keyed(self) -> dict[tuple, int]:
        return {self.tower.canonical_key(self.stage, i): n for i, n in self.norms.items()}

    def sphere_counts(self) -> list[int]:
        c = Counter(self.norms.values())
        return [c.get(n, 0) for n in range(self.radius + 1)]

    def __len__(self):
        return len(self.norms)


def ball(tower: ExpansionTower, radius: int, mode: str = FAT, min_stage: int = 0) -> Ball:
    """Exact tiles of the expansion complex with norm <= ``radius``.

    The tower is extended until every tile touching the outer boundary of
    the top stage has skinny norm > ``radius``; skinny distances bound fat
    ones from below, so one certificate serves both norms.
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    if mode not in MODES:
        raise ValueError(f"unknown norm {mode!r}")
    m = min_stage
    prev_d = None
    while True:
        try:
            cx = tower.stage(m)
        except BudgetExceededError as exc:
            raise BudgetExceededError(
                f"ball of radius {radius} did not stabilize: {exc}", stage=exc.stage) from None
        src = tower.seed_tiles(m)
        skinny = bfs_norms(cx, src, SKINNY)
        d = boundary_distance(cx, skinny)
        if d > radius:
            break
        if prev_d is not None and d <= prev_d and m > min_stage + 3 * max(1, radius):
            raise FSRError(
                f"distance from seed to stage boundary stopped growing at {d} (stage {m})")
        prev_d = d
        m += 1
    norms = skinny if mode == SKINNY else bfs_norms(cx, src, FAT)
    kept = {i: n for i, n in enumerate(norms) if 0 <= n <= radius}
    return Ball(tower, m, mode, radius, kept, d)


@dataclass
class Annulus:
    tower: ExpansionTower
    n: int
    complex: CellComplex
    tiles: list[int]
    layer: dict[int, int]
    inner: frozenset[int]
    outer: frozenset[int]
    seed_tiles: tuple[int, ...] = field(default=())

    def layer_counts(self) -> dict[int, int]:
        c = Counter(self.layer.values())
        return {k: c[k] for k in sorted(c)}

    def __len__(self):
        return len(self.tiles)


def annulus(tower: ExpansionTower, n: int) -> Annulus:
    """``phi^n(S)`` minus the interior of ``S``, with layer indices."""
    if n < 1:
        raise ValueError("annulus index must be >= 1")
    if tower.built < n:
        try:
            tower.stage(n)
        except BudgetExceededError as exc:
            raise InsufficientStagesError(f"tower cannot reach stage {n}: {exc}") from None
    cx = tower.stage(n)
    seed = tower.seed_tiles(n)
    seed_set = set(seed)
    tiles = [i for i in range(len(cx.tiles)) if i not in seed_set]
    layer = {i: tower.layer(n, i) for i in tiles}
    seed_vertices = {v for s in seed for v in cx.tile_vertices[s]}
    bv = cx.boundary_vertices
    inner = frozenset(i for i in tiles if any(v in seed_vertices for v in cx.tile_vertices[i]))
    outer = frozenset(i for i in tiles if any(v in bv for v in cx.tile_vertices[i]))
    return Annulus(tower, n, cx, tiles, layer, inner, outer, tuple(seed))
