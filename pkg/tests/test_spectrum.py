"""Band spectra, stable-set sweeps, finite eigenvalues, measure reports."""

import math

import numpy as np
import pytest

from qsturm.contfrac import ContinuedFraction
from qsturm.spectrum import (
    BandList,
    energy_window,
    finite_eigenvalues,
    measure_report,
    periodic_bands,
    stable_set,
)
from qsturm.words import ModelSpec, Substitution, Word


# ------------------------------------------------------------------- BandList

def test_bandlist_validation():
    with pytest.raises(ValueError):
        BandList(((0.0, -1.0),), level="x")
    with pytest.raises(ValueError):
        BandList(((0.0, 2.0), (1.0, 3.0)), level="x")
    bl = BandList(((0.0, 1.0), (2.0, 2.5)), level="x")
    assert bl.band_count == 2
    assert bl.total_measure == pytest.approx(1.5)
    assert bl.covers(0.5) and not bl.covers(1.5)
    assert bl.covers(1.1, dilation=0.2)


def test_energy_window(fib_spec):
    lo, hi = energy_window(fib_spec)
    assert lo == pytest.approx(-2.5)
    assert hi == pytest.approx(4.5)


# ------------------------------------------------------------- periodic bands

def test_free_band(free_spec):
    bl = periodic_bands(free_spec, 1)
    assert bl.band_count == 1
    lo, hi = bl.bands[0]
    assert lo == pytest.approx(-2.0, abs=1e-8)
    assert hi == pytest.approx(2.0, abs=1e-8)


def test_period2_bands_closed_form():
    # period-2 potential (2, 0): bands [1 - sqrt5, 0] and [2, 1 + sqrt5]
    cf = ContinuedFraction((), (1,))
    subst = Substitution.from_strings({"a": "ab", "b": "ab"})
    spec = ModelSpec(cf, subst, Word.from_str("", ("a", "b")),
                     {"a": 2.0, "b": 0.0})
    bl = periodic_bands(spec, 1, tol=1e-12)
    s5 = math.sqrt(5.0)
    expected = [(1.0 - s5, 0.0), (2.0, 1.0 + s5)]
    assert bl.band_count == 2
    for (lo, hi), (elo, ehi) in zip(bl.bands, expected):
        assert lo == pytest.approx(elo, abs=1e-8)
        assert hi == pytest.approx(ehi, abs=1e-8)
    assert bl.total_measure == pytest.approx(2.0 * s5 - 2.0, abs=1e-7)


def test_band_count_matches_period(fib_spec):
    for n in (3, 5, 7):
        bl = periodic_bands(fib_spec, n)
        # one band per site of the period unless bands touch
        from qsturm.words import level_words_prime
        expected = len(level_words_prime(fib_spec, n)[n + 1])
        assert bl.band_count == expected
        assert not bl.merged


def test_bands_nested_measure_decreases(fib_spec):
    rows = measure_report(fib_spec, range(3, 9))
    measures = [r.total_measure for r in rows]
    assert all(m2 <= m1 + 1e-9 for m1, m2 in zip(measures, measures[1:]))


def test_bad_arguments(fib_spec):
    with pytest.raises(ValueError):
        periodic_bands(fib_spec, 0)
    with pytest.raises(ValueError):
        periodic_bands(fib_spec, 3, tol=-1.0)
    with pytest.raises(ValueError):
        measure_report(fib_spec, [])


# ----------------------------------------------------------------- stable set

def test_stable_set_free_case(free_spec):
    sweep = stable_set(free_spec, grid=1000, n_levels=15)
    bl = sweep.bands
    assert bl.band_count == 1
    lo, hi = bl.bands[0]
    width = sweep.cell_width
    assert abs(lo - (-2.0)) <= width
    assert abs(hi - 2.0) <= width
    assert np.all(np.abs(sweep.stable_centers) <= 2.0 + width)


def test_stable_set_inside_bands(fib_spec):
    # cells that stay bounded through many levels sit inside every coarse
    # band approximation (up to one cell width)
    sweep = stable_set(fib_spec, grid=4000, n_levels=30)
    bl6 = periodic_bands(fib_spec, 6)
    assert len(sweep.stable_centers) >= 1
    for E in sweep.stable_centers:
        assert bl6.covers(float(E), dilation=sweep.cell_width)


def test_stable_set_guards(fib_spec):
    with pytest.raises(ValueError):
        stable_set(fib_spec, grid=100, n_levels=5)
    with pytest.raises(ValueError):
        stable_set(fib_spec, grid=1, n_levels=15)


# ---------------------------------------------------------- finite eigenvalues

def test_finite_eigenvalues_free(free_spec):
    size = 50
    lams = finite_eigenvalues(free_spec, 0, size)
    # Dirichlet Laplacian on 50 sites: 2 cos(k pi / 51), sorted ascending
    expected = np.sort(2.0 * np.cos(np.pi * np.arange(1, size + 1) / (size + 1)))
    assert lams == pytest.approx(expected, abs=1e-8)


def test_finite_eigenvalues_sorted_and_sized(fib_spec):
    lams = finite_eigenvalues(fib_spec, 0, 120)
    assert len(lams) == 120
    assert np.all(np.diff(lams) >= -1e-12)
    lo, hi = energy_window(fib_spec)
    assert np.all((lams >= lo) & (lams <= hi))


def test_finite_eigenvalues_guard(fib_spec):
    with pytest.raises(ValueError):
        finite_eigenvalues(fib_spec, 0, 1)
