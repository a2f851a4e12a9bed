"""Fat-flow modulus of the annuli R_n = phi^n(S) minus int(S).

Height is the least total weight of a fat path of tiles running from a
tile meeting the seed to a tile meeting the outer boundary, both endpoints
counted. Area is the sum of squared weights and the modulus is H^2 / A.
"""

from __future__ import annotations

import csv
import heapq
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

import numpy as np
from scipy.optimize import nnls

from .errors import DisconnectedAnnulusError, IterationCapError, ZeroAreaError
from .expansion import Annulus, ExpansionTower, annulus


@dataclass
class WeightAssignment:
    weights: dict[int, float | Fraction | int]
    provenance: str = "user"

    def __post_init__(self):
        if any(v < 0 for v in self.weights.values()):
            raise ValueError("weights must be nonnegative")

    def scaled(self, factor) -> "WeightAssignment":
        return WeightAssignment({t: factor * v for t, v in self.weights.items()}, self.provenance)

    def __getitem__(self, tile):
        return self.weights.get(tile, 0)


@dataclass
class ModulusReport:
    n: int
    height: float | Fraction | int
    area: float | Fraction | int
    modulus: float | Fraction
    witness: list[int]
    provenance: str


@dataclass
class SolverReport(ModulusReport):
    sum_sq: float = math.nan
    shortest: float = math.nan
    iterations: int = 0
    paths: int = 0
    # (sum of squares, shortest path length) after every solve
    history: list[tuple[float, float]] = field(default_factory=list)

    @property
    def upper_bound(self) -> float:
        """1 / sum w^2 of the relaxed problem: an upper bound on the modulus."""
        return 1.0 / self.sum_sq


def layer_weights(a: Annulus, base: int) -> WeightAssignment:
    """Weight base^(n - k) on every tile of layer k."""
    if base < 1:
        raise ValueError("base must be positive")
    return WeightAssignment({t: base ** (a.n - k) for t, k in a.layer.items()}, "layer-geometric")


def _fat_neighbours(a: Annulus) -> dict[int, list[int]]:
    members = set(a.tiles)
    cx = a.complex
    nbrs = {t: [] for t in a.tiles}
    for group in cx.edge_tiles:
        if len(group) == 2:
            x, y = group
            if x in members and y in members:
                nbrs[x].append(y)
                nbrs[y].append(x)
    return nbrs


def _shortest_path(a: Annulus, nbrs, weight) -> tuple[object, list[int]]:
    """Node-weighted Dijkstra from the inner tiles to the outer tiles."""
    dist = {}
    prev = {}
    heap = []
    counter = 0
    for s in sorted(a.inner):
        d = weight(s)
        if s not in dist or d < dist[s]:
            dist[s] = d
            prev[s] = None
            heap.append((d, counter, s))
            counter += 1
    heapq.heapify(heap)
    done = set()
    while heap:
        d, _, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        if u in a.outer:
            path = [u]
            while prev[path[-1]] is not None:
                path.append(prev[path[-1]])
            return d, path[::-1]
        for v in nbrs[u]:
            if v in done:
                continue
            nd = d + weight(v)
            if v not in dist or nd < dist[v]:
                dist[v] = nd
                prev[v] = u
                heapq.heappush(heap, (nd, counter, v))
                counter += 1
    raise DisconnectedAnnulusError(f"no fat path joins the boundaries of R_{a.n}")


def height(a: Annulus, w: WeightAssignment) -> tuple[object, list[int]]:
    """Minimal fat-path weight between the boundary components, with a witness path."""
    if not a.tiles or not a.inner or not a.outer:
        raise DisconnectedAnnulusError(f"annulus R_{a.n} has an empty boundary tile set")
    return _shortest_path(a, _fat_neighbours(a), w.__getitem__)


def area(a: Annulus, w: WeightAssignment):
    return sum(w[t] * w[t] for t in a.tiles)


def modulus(a: Annulus, w: WeightAssignment) -> ModulusReport:
    """H^2 / A, exact when the weights are rational."""
    A = area(a, w)
    if A == 0:
        raise ZeroAreaError("all weights vanish on the annulus")
    H, path = height(a, w)
    if isinstance(H, Rational) and isinstance(A, Rational):
        M = Fraction(H) ** 2 / Fraction(A)
    else:
        M = float(H) ** 2 / float(A)
    return ModulusReport(a.n, H, A, M, path, w.provenance)


def _least_distance(rows: np.ndarray) -> np.ndarray:
    # min ||w|| subject to rows @ w >= 1, via the NNLS dual (Lawson & Hanson)
    m, n = rows.shape
    E = np.vstack([rows.T, np.ones((1, m))])
    f = np.zeros(n + 1)
    f[n] = 1.0
    u, _ = nnls(E, f, maxiter=50 * (n + m + 1))
    r = E @ u - f
    if abs(r[n]) < 1e-300:
        raise ArithmeticError("path constraints are infeasible")
    return np.maximum(-r[:n] / r[n], 0.0)


def optimize_modulus(a: Annulus, tol: float = 1e-6, max_iter: int | None = None) -> SolverReport:
    """Fat-flow modulus of ``a`` by cutting planes.

    Minimises sum w^2 subject to every inner-to-outer fat path having weight
    at least 1, adding the shortest path under the current weights until
    none is shorter than ``1 - tol``. The reported modulus is H^2/A of the
    final weights, a certified lower bound; ``upper_bound`` bounds it above.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not a.inner or not a.outer:
        raise DisconnectedAnnulusError(f"annulus R_{a.n} has an empty boundary tile set")
    nbrs = _fat_neighbours(a)
    col = {t: i for i, t in enumerate(a.tiles)}
    n = len(a.tiles)
    if max_iter is None:
        max_iter = 10 * n

    _, first = _shortest_path(a, nbrs, lambda t: 1)
    paths = [first]
    seen = {tuple(first)}
    rows = [np.bincount([col[t] for t in first], minlength=n).astype(float)]
    history = []
    w = np.zeros(n)
    L, path = 0.0, first
    for it in range(1, max_iter + 1):
        w = _least_distance(np.array(rows))
        L, path = _shortest_path(a, nbrs, lambda t: w[col[t]])
        ss = float(w @ w)
        history.append((ss, float(L)))
        if L >= 1 - tol:
            break
        key = tuple(path)
        if key in seen:
            # numerically stalled on an already-enforced path
            break
        seen.add(key)
        paths.append(path)
        rows.append(np.bincount([col[t] for t in path], minlength=n).astype(float))
    else:
        ss = float(w @ w)
        raise IterationCapError(
            f"cutting-plane loop hit {max_iter} iterations on R_{a.n}", sum_sq=ss, shortest=float(L))

    ss = float(w @ w)
    L = float(L)
    weights = {t: float(w[col[t]]) for t in a.tiles}
    return SolverReport(
        a.n, L, ss, L * L / ss, path, "solver",
        sum_sq=ss, shortest=L, iterations=len(history), paths=len(paths), history=history,
    )


@dataclass
class IndicatorReport:
    base: int
    sequence: list[Fraction]
    limit: float
    ratio: float | None
    bounded: bool

    @property
    def verdict(self) -> str:
        if self.bounded:
            return "bounded (hyperbolic indicator)"
        return "unbounded trend (no hyperbolicity indication)"


def fit_limit(seq) -> tuple[float, float | None, bool]:
    """Geometric-tail extrapolation of a monotone sequence.

    Returns (limit, ratio of the last two increments, bounded?). Increments
    that do not shrink by a ratio below 0.9 are read as an unbounded trend.
    """
    xs = [float(x) for x in seq]
    if len(xs) < 3:
        raise ValueError("need at least three terms")
    d1, d2 = xs[-2] - xs[-3], xs[-1] - xs[-2]
    if d2 <= 0:
        return xs[-1], None, True
    if d1 <= 0:
        return math.inf, None, False
    r = d2 / d1
    if r >= 0.9:
        return math.inf, r, False
    return xs[-1] + d2 * r / (1 - r), r, True


def hyperbolicity_indicator(tower: ExpansionTower, N: int, base: int) -> IndicatorReport:
    """Layer-weight moduli M(R_1..R_N) and whether they stay bounded.

    An indicator read off finitely many annuli, not a proof of hyperbolicity.
    """
    seq = []
    for n in range(1, N + 1):
        a = annulus(tower, n)
        seq.append(modulus(a, layer_weights(a, base)).modulus)
    limit, ratio, bounded = fit_limit(seq)
    return IndicatorReport(base, seq, limit, ratio, bounded)


def modulus_csv(rows) -> str:
    """rows: iterables of (n, H, A, M_closed, M_solver or None)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "H", "A", "M_closed", "M_solver", "gap"])
    for n, H, A, M, Ms in rows:
        if Ms is None:
            w.writerow([n, H, A, str(M), "", ""])
        else:
            w.writerow([n, H, A, str(M), repr(float(Ms)), repr(float(Ms) - float(M))])
    return buf.getvalue()
