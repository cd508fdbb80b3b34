# osim/core/grids.py
"""Evaluation grids and tolerance-aware monotonicity scans shared by the checkers."""
from typing import NamedTuple, Optional

import numpy as np

from osim.config import app_settings
from osim.core.exceptions import GridTooCoarseError


class Scan(NamedTuple):
    """Worst entry of a violation scan: the violation, its tolerance and where it occurred."""

    violation: float
    tolerance: float
    index: int


def generator_grid(lo: Optional[float] = None, hi: Optional[float] = None, points: Optional[int] = None) -> np.ndarray:
    lo = app_settings.GRID_LO if lo is None else lo
    hi = app_settings.GRID_HI if hi is None else hi
    points = app_settings.GRID_POINTS if points is None else points
    return np.geomspace(lo, hi, points)


def as_grid(grid, min_points: int) -> np.ndarray:
    arr = np.asarray(grid, dtype=float)
    if arr.ndim != 1 or arr.size < min_points:
        raise GridTooCoarseError(f"grid needs at least {min_points} points, got {arr.size}")
    return arr


def span_grid(lo: float, hi: float, points: int) -> np.ndarray:
    """Geometric spacing when the span is strictly positive, linear otherwise."""
    if lo > 0 and hi > lo:
        return np.geomspace(lo, hi, points)
    return np.linspace(lo, hi, points)


def worst(violations: np.ndarray, tolerances: np.ndarray) -> Scan:
    """Pick the entry with the largest excess over its own tolerance.

    ``tolerances`` broadcasts against the shape of ``violations``; the index is flat.
    """
    violations = np.asarray(violations, dtype=float)
    tolerances = np.broadcast_to(np.asarray(tolerances, dtype=float), violations.shape).ravel()
    violations = violations.ravel()
    if violations.size == 0:
        return Scan(0.0, float(tolerances[0]) if tolerances.size else 0.0, -1)
    idx = int(np.argmax(violations - tolerances))
    return Scan(max(float(violations[idx]), 0.0), float(tolerances[idx]), idx)


def monotone_scan(values: np.ndarray, increasing: bool = True, rel_tol: Optional[float] = None) -> Scan:
    """Scan consecutive entries for breaks of non-strict monotonicity.

    The tolerance at each step scales with ``max(1, |v_i|, |v_{i+1}|)``.
    """
    rel_tol = app_settings.MONOTONE_TOL if rel_tol is None else rel_tol
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        return Scan(0.0, rel_tol, -1)
    drops = v[:-1] - v[1:] if increasing else v[1:] - v[:-1]
    scale = np.maximum(1.0, np.maximum(np.abs(v[:-1]), np.abs(v[1:])))
    return worst(drops, rel_tol * scale)


def pairwise_scan(values: np.ndarray, variances: np.ndarray, z: float = 3.0) -> Scan:
    """All ordered pairs j < k of a noisy sequence that should be nondecreasing.

    The tolerance of a pair is ``z`` times the standard error of the difference,
    taken as ``sqrt(var_j + var_k)``.
    """
    v = np.asarray(values, dtype=float)
    var = np.asarray(variances, dtype=float)
    j, k = np.triu_indices(v.size, k=1)
    drops = v[j] - v[k]
    tol = z * np.sqrt(var[j] + var[k])
    scan = worst(drops, tol)
    return scan
