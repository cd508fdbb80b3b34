# tests/unit/core/test_grids.py
import numpy as np
import pytest

from osim.core.exceptions import GridTooCoarseError
from osim.core.grids import as_grid, monotone_scan, pairwise_scan, worst


def test_worst_takes_full_shape_tolerances():
    drops = np.array([[0.0, 0.1, 0.0], [0.0, 0.0, 0.5]])
    tol = np.array([[1.0, 1.0, 1.0], [1.0, 1.0, 0.2]])
    scan = worst(drops, tol)
    assert scan.index == 5
    assert np.unravel_index(scan.index, drops.shape) == (1, 2)
    assert scan.violation == pytest.approx(0.5)
    assert scan.tolerance == pytest.approx(0.2)
    print("\n[PASSED] test_worst_takes_full_shape_tolerances")


@pytest.mark.parametrize("tol", [0.3, np.array([0.3, 0.3, 0.3]), np.full((2, 3), 0.3)])
def test_worst_broadcasts_tolerances_against_violation_shape(tol):
    drops = np.array([[0.0, 0.4, 0.0], [0.1, 0.0, 0.0]])
    scan = worst(drops, tol)
    assert scan.index == 1
    assert scan.tolerance == pytest.approx(0.3)
    print(f"\n[PASSED] test_worst_broadcasts_tolerances_against_violation_shape: {np.shape(tol)}")


def test_worst_of_empty_scan():
    scan = worst(np.array([]), 1e-9)
    assert scan.index == -1
    assert scan.violation == 0.0
    print("\n[PASSED] test_worst_of_empty_scan")


def test_monotone_scan_finds_the_break():
    scan = monotone_scan(np.array([0.0, 1.0, 0.5, 2.0]), increasing=True, rel_tol=1e-9)
    assert scan.index == 1
    assert scan.violation == pytest.approx(0.5)
    assert monotone_scan(np.array([3.0, 2.0, 2.0]), increasing=False).violation == 0.0
    print("\n[PASSED] test_monotone_scan_finds_the_break")


def test_pairwise_scan_uses_standard_errors():
    values = np.array([0.0, 0.2, 0.1])
    assert pairwise_scan(values, np.full(3, 0.01)).violation <= pairwise_scan(values, np.full(3, 0.01)).tolerance
    tight = pairwise_scan(values, np.full(3, 1e-6))
    assert tight.violation > tight.tolerance
    print("\n[PASSED] test_pairwise_scan_uses_standard_errors")


def test_as_grid_rejects_short_grids():
    with pytest.raises(GridTooCoarseError):
        as_grid([0.1, 0.2], 50)
    print("\n[PASSED] test_as_grid_rejects_short_grids")
