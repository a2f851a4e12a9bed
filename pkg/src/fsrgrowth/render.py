"""SVG drawings of disk complexes via a Tutte (barycentric) embedding."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from .complex import CellComplex, boundary_vertex_cycle
from .errors import FSRError, NotADiskError

PALETTE = ("#f4d35e", "#8ecae6", "#f6bd9c", "#b5e48c", "#cdb4db", "#ffafcc", "#bde0fe")


@dataclass
class RenderSpec:
    complex: CellComplex
    size: int = 600
    # tile type -> (fill, stroke); missing types get palette colours
    styles: dict[str, tuple[str, str]] = field(default_factory=dict)
    embedding: str = "tutte"
    stroke_width: float = 0.6
    highlight: set[int] = field(default_factory=set)

    def style_for(self, label: str) -> tuple[str, str]:
        if label not in self.styles:
            used = len(self.styles)
            self.styles[label] = (PALETTE[used % len(PALETTE)], "#333333")
        return self.styles[label]


def tutte_embedding(c: CellComplex) -> np.ndarray:
    """Vertex positions: boundary on a regular polygon, interior at neighbour averages."""
    bcycle = boundary_vertex_cycle(c)
    if len(bcycle) < 3:
        raise NotADiskError("boundary cycle needs at least three vertices")
    pos = np.zeros((c.n_vertices, 2))
    nb = len(bcycle)
    fixed = np.zeros(c.n_vertices, dtype=bool)
    for i, v in enumerate(bcycle):
        ang = math.pi / 2 + 2 * math.pi * i / nb
        pos[v] = (math.cos(ang), math.sin(ang))
        fixed[v] = True
    free = np.flatnonzero(~fixed)
    if free.size == 0:
        return pos
    col = -np.ones(c.n_vertices, dtype=np.int64)
    col[free] = np.arange(free.size)
    rows, cols, vals = [], [], []
    rhs = np.zeros((free.size, 2))
    deg = np.zeros(free.size)
    for a, b in c.edges:
        for u, v in ((a, b), (b, a)):
            if fixed[u]:
                continue
            iu = col[u]
            deg[iu] += 1
            if fixed[v]:
                rhs[iu] += pos[v]
            else:
                rows.append(iu)
                cols.append(col[v])
                vals.append(-1.0)
    rows.extend(range(free.size))
    cols.extend(range(free.size))
    vals.extend(deg)
    if np.any(deg == 0):
        raise FSRError("embedding system is singular: isolated interior vertex")
    L = sp.csr_matrix((vals, (rows, cols)), shape=(free.size, free.size))
    sol = spsolve(L.tocsc(), rhs)
    if not np.all(np.isfinite(sol)):
        raise FSRError("embedding system is singular (disconnected interior)")
    pos[free] = sol.reshape(-1, 2)
    return pos


def polygon_area(pts: np.ndarray) -> float:
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def tile_polygons(c: CellComplex, pos: np.ndarray | None = None) -> list[np.ndarray]:
    if pos is None:
        pos = tutte_embedding(c)
    return [pos[list(vs)] for vs in c.tile_vertices]


def render_svg(spec: RenderSpec) -> str:
    """Filled polygons for every tile, laid out by the Tutte embedding."""
    if spec.embedding != "tutte":
        raise ValueError(f"unsupported embedding {spec.embedding!r}")
    c = spec.complex
    pos = tutte_embedding(c)
    half = spec.size / 2
    margin = 0.04 * spec.size
    scale = half - margin
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{spec.size}" height="{spec.size}" '
        f'viewBox="0 0 {spec.size} {spec.size}">',
        f'<rect width="{spec.size}" height="{spec.size}" fill="white"/>',
    ]
    for i, (tile, vs) in enumerate(zip(c.tiles, c.tile_vertices)):
        fill, stroke = spec.style_for(tile.label)
        if i in spec.highlight:
            fill = "#e63946"
        pts = " ".join(
            f"{half + scale * pos[v, 0]:.3f},{half - scale * pos[v, 1]:.3f}" for v in vs
        )
        lines.append(
            f'<polygon class="tile {escape(tile.label)}" data-tile="{i}" points="{pts}" '
            f'fill="{fill}" stroke="{stroke}" stroke-width="{spec.stroke_width}"/>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
