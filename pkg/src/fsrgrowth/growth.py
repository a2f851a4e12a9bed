"""Growth tables, the R_{p,q} sphere series, and growth-degree estimates.

Counts and series coefficients are Python integers throughout; only
``degree_estimate`` works in floating point.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .complex import FAT, MODES
from .errors import FSRError
from .expansion import ExpansionTower, Seed, ball
from .rules import SubdivisionRule
from .subdivision import DEFAULT_MAX_TILES


@dataclass(frozen=True)
class GrowthTable:
    mode: str
    spheres: tuple[int, ...]

    @property
    def N(self) -> int:
        return len(self.spheres) - 1

    @property
    def balls(self) -> tuple[int, ...]:
        out, acc = [], 0
        for s in self.spheres:
            acc += s
            out.append(acc)
        return tuple(out)

    def ln_ratio(self, n: int) -> float | None:
        """ln(b_n) / ln(n), undefined for n < 2."""
        if n < 2:
            return None
        return math.log(self.balls[n]) / math.log(n)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "s_n", "b_n", "ln_ratio"])
        for n, (s, b) in enumerate(zip(self.spheres, self.balls)):
            r = self.ln_ratio(n)
            w.writerow([n, s, b, "" if r is None else repr(round(r, 12))])
        return buf.getvalue()


def growth_table(rule: SubdivisionRule, seed: Seed, N: int, mode: str = FAT,
                 max_tiles: int = DEFAULT_MAX_TILES,
                 tower: ExpansionTower | None = None) -> GrowthTable:
    """Exact sphere counts s_0..s_N of (X, S) under the chosen norm."""
    if mode not in MODES:
        raise ValueError(f"unknown norm {mode!r}")
    if seed is None:
        raise FSRError("growth tables need a seed")
    if tower is None:
        tower = ExpansionTower(rule, seed, max_tiles=max_tiles)
    b = ball(tower, N, mode)
    return GrowthTable(mode, tuple(b.sphere_counts()))


def _block(p: int, n: int) -> tuple[int, int]:
    # largest k with (p^k - 1)/(p - 1) <= n, and the offset m past that point
    k, start = 0, 0
    while start + p ** k <= n:
        start += p ** k
        k += 1
    return k, n - start


def closed_form_bn(p: int, q: int, n: int) -> int:
    """Ball count b_n of X_{p,q} from its closed form."""
    if p < 2 or q < 2 or n < 0:
        raise ValueError("need p, q >= 2 and n >= 0")
    k, m = _block(p, n)
    return 1 + 4 * ((p * q) ** k - 1) // (p * q - 1) + m * 4 * q ** k


@dataclass(frozen=True)
class SeriesPoly:
    """Truncated power series with exact integer coefficients."""

    coefficients: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __getitem__(self, i):
        return self.coefficients[i]

    def __len__(self):
        return len(self.coefficients)

    def to_text(self) -> str:
        return "\n".join(f"{i} {c}" for i, c in enumerate(self.coefficients)) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SeriesPoly":
        coeffs = {}
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if line:
                i, c = line.split()
                coeffs[int(i)] = int(c)
        return cls(tuple(coeffs.get(i, 0) for i in range(max(coeffs) + 1)))


def sphere_series_rpq(p: int, q: int, N: int) -> SeriesPoly:
    """Coefficients of g(z) for X_{p,q}: 1, 4, then 4q^k repeated p^k times."""
    coeffs = [1]
    k = 0
    while len(coeffs) <= N:
        coeffs.extend([4 * q ** k] * p ** k)
        k += 1
    return SeriesPoly(tuple(coeffs[:N + 1]))


def _mul(a: Sequence[int], b: Sequence[int], deg: int) -> list[int]:
    out = [0] * (deg + 1)
    for i, x in enumerate(a[:deg + 1]):
        if x:
            for j, y in enumerate(b[:deg + 1 - i]):
                out[i + j] += x * y
    return out


@dataclass(frozen=True)
class EquationCheck:
    ok: bool
    checked_degree: int
    first_failure: int | None
    lhs: tuple[int, ...]
    rhs: tuple[int, ...]

    def __bool__(self):
        return self.ok


def check_functional_equation(p: int, q: int, g: SeriesPoly) -> EquationCheck:
    """Test q(g(z^p) - 1)(1 + z + ... + z^(p-1)) = z^(p-2)(g(z) - 1 - 4z).

    Both sides are compared through the highest degree fully determined by
    the known coefficients of ``g``.
    """
    if g.degree < p:
        raise ValueError(f"need coefficients through degree >= {p}")
    deg = g.degree + p - 2
    c = list(g.coefficients)
    inner = [0] * (deg + 1)
    for i in range(1, deg // p + 1):
        inner[i * p] = q * c[i]
    lhs = _mul(inner, [1] * p, deg)
    core = c[:]
    core[0] -= 1
    core[1] -= 4
    rhs = [0] * (deg + 1)
    for i, x in enumerate(core):
        if i + p - 2 <= deg:
            rhs[i + p - 2] = x
    first = next((d for d in range(deg + 1) if lhs[d] != rhs[d]), None)
    return EquationCheck(first is None, deg, first, tuple(lhs), tuple(rhs))


@dataclass(frozen=True)
class DegreeEstimate:
    slope: float
    sup_ratio: float
    window: tuple[int, int]
    increasing: bool

    @property
    def estimate(self) -> float:
        return self.slope

    @property
    def diagnostics(self) -> dict:
        return {
            "slope": self.slope,
            "sup_ratio": self.sup_ratio,
            "window": self.window,
            "non_increasing": not self.increasing,
        }


def default_window(N: int) -> tuple[int, int]:
    return max(2, math.ceil(N / 4)), N


def degree_estimate(table: GrowthTable | Sequence[int],
                    window: tuple[int, int] | None = None) -> DegreeEstimate:
    """Estimate the polynomial growth degree from ball counts.

    Reports the least-squares slope of ln(b_n) against ln(n) over the window
    together with the window maximum of ln(b_n)/ln(n). The default window
    drops the first quarter of the table, where additive constants dominate.
    """
    balls = table.balls if isinstance(table, GrowthTable) else tuple(table)
    N = len(balls) - 1
    if N < 8:
        raise ValueError("need a table with N >= 8")
    lo, hi = window or default_window(N)
    if lo < 2 or hi > N or hi - lo < 2:
        raise ValueError(f"window ({lo}, {hi}) too small or outside [2, {N}]")
    ns = np.arange(lo, hi + 1)
    b = np.array([balls[n] for n in ns], dtype=float)
    if np.any(b <= 0):
        raise ValueError("ball counts must be positive")
    ln_n = np.log(ns)
    ln_b = np.log(b)
    slope = float(np.polyfit(ln_n, ln_b, 1)[0])
    sup_ratio = float(np.max(ln_b / ln_n))
    increasing = bool(np.all(np.diff(b) > 0))
    if not increasing and abs(slope) < 1e-12:
        slope = 0.0
    return DegreeEstimate(slope, sup_ratio, (lo, hi), increasing)


def rpq_degree(p: int, q: int) -> float:
    return 1 + math.log(q) / math.log(p)


def approximate_degree(d: float, eps: float) -> tuple[int, int]:
    """Find p, q >= 2 with |1 + ln q / ln p - d| < eps, and q > p when d > 2."""
    if d < 2 or eps <= 0:
        raise ValueError("need d >= 2 and eps > 0")
    p = 2
    while True:
        target = p ** (d - 1)
        for q in sorted({math.floor(target), math.ceil(target)}, key=lambda x: abs(x - target)):
            if q < 2 or (d > 2 and q <= p):
                continue
            if abs(rpq_degree(p, q) - d) < eps:
                return p, q
        p += 1
