"""Spectrum approximation: periodic-approximant band spectra, stable-set
sweeps via trace-map classification, measure statistics, and a finite
tridiagonal eigenvalue oracle (Sturm-count bisection).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import GridTooCoarse
from .tracemap import classify_many
from .transfer import half_traces_many
from .words import ModelSpec, level_words_prime, qs_prefix

ENERGY_MARGIN = 0.5


@dataclass(frozen=True)
class BandList:
    """Sorted disjoint closed energy intervals with provenance."""

    bands: Tuple[Tuple[float, float], ...]
    level: str
    merged: bool = False

    def __post_init__(self):
        prev_hi = -np.inf
        for lo, hi in self.bands:
            if lo > hi:
                raise ValueError(f"band [{lo}, {hi}] has lo > hi")
            if lo < prev_hi:
                raise ValueError("bands must be sorted and disjoint")
            prev_hi = hi

    @property
    def band_count(self) -> int:
        return len(self.bands)

    @property
    def total_measure(self) -> float:
        return float(sum(hi - lo for lo, hi in self.bands))

    def covers(self, E: float, dilation: float = 0.0) -> bool:
        return any(lo - dilation <= E <= hi + dilation for lo, hi in self.bands)


def energy_window(spec: ModelSpec) -> Tuple[float, float]:
    """[min f - 2 - margin, max f + 2 + margin]; everything outside is resolvent."""
    values = list(spec.potential.values())
    return min(values) - 2.0 - ENERGY_MARGIN, max(values) + 2.0 + ENERGY_MARGIN


def periodic_bands(spec: ModelSpec, n: int, tol: float = 1e-10) -> BandList:
    """sigma(H_n) = {E : |tr M_E(n)| <= 2} for the |s'_n|-periodic approximant.

    Band edges are located by sign-change bisection of |tau| - 2 on a seed
    grid of at least 8 |s'_n| points, refined to tol.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if tol <= 0:
        raise ValueError("tol must be > 0")
    expected = len(level_words_prime(spec, n)[n + 1])
    lo, hi = energy_window(spec)

    seed = max(8 * expected, 1024)
    prev_count = -1
    for _attempt in range(5):
        grid = np.linspace(lo, hi, seed + 1)
        with np.errstate(over="ignore"):
            g = np.abs(2.0 * half_traces_many(spec, grid, n)) - 2.0
        inside = g <= 0.0
        bands = _bands_from_indicator(spec, n, grid, g, inside, tol)
        if len(bands) >= expected:
            break
        if len(bands) == prev_count:
            break  # touching bands merge; the count has stabilized
        prev_count = len(bands)
        seed *= 2
    if not bands:
        raise GridTooCoarse(
            f"no bands found for level {n} on a {seed}-point grid"
        )
    merged = len(bands) < expected
    return BandList(tuple(bands), level=f"periodic:{n}", merged=merged)


def _bands_from_indicator(spec, n, grid, g, inside, tol) -> List[Tuple[float, float]]:
    """Assemble bands from the seed-grid indicator, bisecting all boundaries
    simultaneously."""
    runs = []  # (first inside index, last inside index)
    i = 0
    K = len(grid)
    while i < K:
        if not inside[i]:
            i += 1
            continue
        j = i
        while j + 1 < K and inside[j + 1]:
            j += 1
        runs.append((i, j))
        i = j + 1
    if not runs:
        return []
    # For each run, bisect the outer bracket; runs touching the window ends
    # keep the grid point itself.
    e_out, e_in, slots = [], [], []
    edges = {}
    for r, (i, j) in enumerate(runs):
        if i == 0:
            edges[(r, 0)] = float(grid[0])
        else:
            slots.append((r, 0))
            e_out.append(grid[i - 1])
            e_in.append(grid[i])
        if j == K - 1:
            edges[(r, 1)] = float(grid[K - 1])
        else:
            slots.append((r, 1))
            e_out.append(grid[j + 1])
            e_in.append(grid[j])
    if slots:
        refined = _bisect_edges(spec, n, np.array(e_out), np.array(e_in), tol)
        for slot, e in zip(slots, refined):
            edges[slot] = float(e)
    return [(edges[(r, 0)], edges[(r, 1)]) for r in range(len(runs))]


def _bisect_edges(spec, n, e_out, e_in, tol):
    """Bisect |tau| - 2 between outside points and inside points, elementwise."""
    for _ in range(200):
        if np.max(np.abs(e_out - e_in)) <= tol:
            break
        mid = 0.5 * (e_out + e_in)
        with np.errstate(over="ignore"):
            g = np.abs(2.0 * half_traces_many(spec, mid, n)) - 2.0
        hit = g <= 0.0
        e_in = np.where(hit, mid, e_in)
        e_out = np.where(hit, e_out, mid)
    return e_in


@dataclass(frozen=True)
class StableSweep:
    """Stable-set sweep: grid cells whose center has a bounded trace-map orbit."""

    bands: BandList
    grid: np.ndarray = field(repr=False)
    bounded: np.ndarray = field(repr=False)
    sup_norm: np.ndarray = field(repr=False)
    cell_width: float = 0.0

    @property
    def stable_centers(self) -> np.ndarray:
        return self.grid[self.bounded]

    @property
    def escaped_centers(self) -> np.ndarray:
        return self.grid[~self.bounded]


def stable_set(spec: ModelSpec, grid: int = 4000, n_levels: int = 30) -> StableSweep:
    """Classify every grid-cell center and return the closure of bounded
    cells as intervals, with the per-cell empirical orbit bound.
    """
    if n_levels < 10:
        raise ValueError("n_levels must be >= 10")
    if grid < 2:
        raise ValueError("grid must have at least 2 cells")
    lo, hi = energy_window(spec)
    width = (hi - lo) / grid
    centers = lo + width * (np.arange(grid) + 0.5)
    escaped, _steps, sup, _inv = classify_many(spec, centers, n_levels)
    bounded = ~escaped
    bands = []
    i = 0
    while i < grid:
        if not bounded[i]:
            i += 1
            continue
        j = i
        while j + 1 < grid and bounded[j + 1]:
            j += 1
        bands.append((float(centers[i] - 0.5 * width), float(centers[j] + 0.5 * width)))
        i = j + 1
    band_list = BandList(tuple(bands), level=f"stable:grid={grid},levels={n_levels}")
    return StableSweep(band_list, centers, bounded, sup, width)


def finite_eigenvalues(spec: ModelSpec, shift: int, size: int) -> np.ndarray:
    """All eigenvalues of the size x size symmetric tridiagonal truncation
    (diagonal = potential values, off-diagonal 1), by bisection on the
    Sturm sign-count, each to 1e-10.
    """
    if size < 2:
        raise ValueError("size must be >= 2")
    diag = spec.potential_values(qs_prefix(spec, size, shift=shift))
    lo = float(diag.min()) - 2.0 - 1e-6
    hi = float(diag.max()) + 2.0 + 1e-6

    def counts(lams: np.ndarray) -> np.ndarray:
        """Number of eigenvalues strictly below each lambda (Sturm count)."""
        q = diag[0] - lams
        q = np.where(np.abs(q) < 1e-300, -1e-300, q)
        neg = (q < 0).astype(np.int64)
        for i in range(1, size):
            q = diag[i] - lams - 1.0 / q
            q = np.where(np.abs(q) < 1e-300, -1e-300, q)
            neg += q < 0
        return neg

    lows = np.full(size, lo)
    highs = np.full(size, hi)
    targets = np.arange(1, size + 1)
    for _ in range(80):
        mids = 0.5 * (lows + highs)
        c = counts(mids)
        below = c < targets  # eigenvalue k is above mid
        lows = np.where(below, mids, lows)
        highs = np.where(below, highs, mids)
        if np.max(highs - lows) < 1e-10:
            break
    return 0.5 * (lows + highs)


@dataclass(frozen=True)
class MeasureRow:
    n: int
    band_count: int
    total_measure: float


def measure_report(spec: ModelSpec, n_range: Sequence[int], tol: float = 1e-10) -> List[MeasureRow]:
    """Per-level band statistics: count proliferation and measure decay."""
    if not n_range:
        raise ValueError("n_range must be nonempty")
    rows = []
    for n in n_range:
        bl = periodic_bands(spec, n, tol=tol)
        rows.append(MeasureRow(n, bl.band_count, bl.total_measure))
    return rows
