# osim/core/orderings.py
"""
Stochastic order checkers
=========================

Analytic checks evaluate closed-form (or tabulated) laws on a grid; empirical
checks work on seeded samples and carry 3-SE bands. Every verdict reports the
worst violation together with the tolerance it was judged against.

Direction is always ``X <= Y`` in the named order.
"""
import logging
import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import integrate, stats

from osim.config import app_settings
from osim.core.distributions import DistributionSpec
from osim.core.exceptions import (
    DimensionMismatchError,
    EmptySampleError,
    GridOutsideSupportError,
    GridTooCoarseError,
    LengthMismatchError,
    NonAnalyticModelError,
    NonPositiveEntryError,
    ParamOutOfDomainError,
    UnsupportedModeError,
)
from osim.core.grids import Scan, as_grid, monotone_scan, pairwise_scan, span_grid, worst
from osim.core.ordered_models import (
    DgosModel,
    OrderedModel,
    dgos_increment_sum,
    dsos_conditional_hazard,
    dsos_conditional_quantile,
    dsos_min_survival,
    dsos_transition_survival,
    flag_endpoint_draws,
    is_analytic,
    sample_many,
)
from osim.core.streams import Key, child_generator
from osim.models.verdict_models import (
    CheckMode,
    MajorizationKind,
    MajorizationResult,
    OrderRelation,
    OrderVerdict,
    VerdictStatus,
)

logger = logging.getLogger(__name__)

MIN_SAMPLE_ROWS = 100
MIN_EMPIRICAL_ROWS = 1000
ANALYTIC_GRID_POINTS = 200
MIN_ANALYTIC_POINTS = 50
DISP_LEVELS = np.linspace(0.02, 0.98, 49)
_QUAD_TOL = 1e-8
_GAUSS_ROUGHNESS = 1.0 / (2.0 * math.sqrt(math.pi))

UNIVARIATE_RELATIONS = (
    OrderRelation.ST,
    OrderRelation.HR,
    OrderRelation.RH,
    OrderRelation.LR,
    OrderRelation.DISP,
    OrderRelation.ICX,
    OrderRelation.MRL,
    OrderRelation.C,
)


# --- Samples ---
class SampleMatrix:
    """N x d draws with their seed provenance.

    Rows flagged by ``flagged`` (e.g. clamped at a finite endpoint) are dropped.
    """

    def __init__(self, draws, seed: Optional[int] = None, tag: str = "sample",
                 flagged: Optional[np.ndarray] = None):
        arr = np.asarray(draws, dtype=float)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2:
            raise ParamOutOfDomainError(f"draws must be a 1-D or 2-D array, got shape {arr.shape}")
        if flagged is not None:
            flagged = np.asarray(flagged, dtype=bool)
            if flagged.any():
                logger.warning(f"{tag}: dropping {int(flagged.sum())} flagged rows")
            arr = arr[~flagged]
        if arr.shape[0] == 0:
            raise EmptySampleError(f"{tag}: no rows left")
        if np.isnan(arr).any():
            raise ParamOutOfDomainError(f"{tag}: draws contain missing values")
        if arr.shape[0] < MIN_SAMPLE_ROWS:
            raise ParamOutOfDomainError(f"{tag}: need at least {MIN_SAMPLE_ROWS} rows, got {arr.shape[0]}")
        self.draws = arr
        self.seed = seed
        self.tag = tag

    @classmethod
    def from_model(cls, model: OrderedModel, total: int, seed: int, keys: Sequence[Key] = (),
                   tag: Optional[str] = None) -> "SampleMatrix":
        draws = sample_many(model, total, seed, keys=keys)
        return cls(draws, seed=seed, tag=tag or model.tag, flagged=flag_endpoint_draws(model, draws))

    @property
    def n_rows(self) -> int:
        return self.draws.shape[0]

    @property
    def dim(self) -> int:
        return self.draws.shape[1]

    def column(self, i: int) -> np.ndarray:
        """Coordinate i (1-based)."""
        if not 1 <= i <= self.dim:
            raise ParamOutOfDomainError(f"{self.tag}: coordinate must be in 1..{self.dim}, got {i}")
        return self.draws[:, i - 1]

    def select(self, view: Sequence[int], tag: Optional[str] = None) -> "SampleMatrix":
        """Sub-vector of 1-based coordinates; a 0 entry inserts a zero coordinate."""
        cols = [np.zeros(self.n_rows) if i == 0 else self.column(i) for i in view]
        return SampleMatrix(np.column_stack(cols), seed=self.seed, tag=tag or f"{self.tag}{list(view)}")

    def __repr__(self) -> str:
        return f"<SampleMatrix {self.tag} {self.n_rows}x{self.dim} seed={self.seed}>"


Column = Union[np.ndarray, SampleMatrix, Sequence[float]]


def _as_column(sample: Column, what: str = "sample") -> np.ndarray:
    if isinstance(sample, SampleMatrix):
        if sample.dim != 1:
            raise DimensionMismatchError(f"{what}: expected one column, got {sample.dim}")
        return sample.draws[:, 0]
    arr = np.asarray(sample, dtype=float).ravel()
    if arr.size == 0:
        raise EmptySampleError(f"{what} is empty")
    return arr


def dkw_bound(n: int, alpha: float = 0.01) -> float:
    """Half-width of the (1 - alpha) DKW band for an ECDF of n draws."""
    if n <= 0:
        raise EmptySampleError("DKW bound needs at least one draw")
    return math.sqrt(math.log(2.0 / alpha) / (2.0 * n))


def ks_distance(sample: Column, dist: Union[DistributionSpec, Callable]) -> float:
    """Kolmogorov distance between a sample and a law given by its DistributionSpec or survival function."""
    x = _as_column(sample)
    if isinstance(dist, DistributionSpec):
        cdf = dist.cdf
    else:
        cdf = lambda t: 1.0 - np.asarray(dist(t), dtype=float)  # noqa: E731
    return float(stats.kstest(x, cdf).statistic)


def ks_two_sample(a: Column, b: Column) -> float:
    return float(stats.ks_2samp(_as_column(a), _as_column(b)).statistic)


def empirical_stats(sample: Column, kind: str, at: float) -> float:
    """ecdf, quantile (right-continuous inverse of the ECDF), stop_loss or integrated_survival."""
    x = np.sort(_as_column(sample))
    n = x.size
    if kind == "ecdf":
        return float(np.searchsorted(x, at, side="right") / n)
    if kind == "quantile":
        if not 0.0 < at <= 1.0:
            raise ParamOutOfDomainError(f"quantile level must be in (0, 1], got {at}")
        return float(x[max(int(math.ceil(at * n)) - 1, 0)])
    if kind in ("stop_loss", "integrated_survival"):
        return float(np.mean(np.maximum(x - at, 0.0)))
    raise ParamOutOfDomainError(f"unknown statistic '{kind}'")


# --- Helpers ---
def _status(scan: Scan) -> VerdictStatus:
    return VerdictStatus.HOLDS if scan.violation <= scan.tolerance else VerdictStatus.VIOLATED


def _verdict(relation, scan: Scan, mode: CheckMode, grid, witness: Dict, notes: Optional[List[str]] = None,
             status: Optional[VerdictStatus] = None) -> OrderVerdict:
    status = status or _status(scan)
    logger.debug(f"{relation.value} ({mode.value}): {status.value} violation={scan.violation:.3g} "
                 f"tolerance={scan.tolerance:.3g}")
    return OrderVerdict(
        relation=relation,
        status=status,
        mode=mode,
        max_violation=scan.violation,
        tolerance=scan.tolerance,
        witness=witness,
        grid=[float(g) for g in np.asarray(grid, dtype=float).ravel()],
        notes=notes or [],
    )


def _pair(index: int, size: int) -> Tuple[int, int]:
    j, k = np.triu_indices(size, k=1)
    return int(j[index]), int(k[index])


# --- Analytic univariate checks ---
def _support_grid(x: DistributionSpec, y: DistributionSpec, overlap: bool) -> np.ndarray:
    lo_x, hi_x = np.atleast_1d(x.ppf(np.array([1e-3, 0.999])))
    lo_y, hi_y = np.atleast_1d(y.ppf(np.array([1e-3, 0.999])))
    if overlap:
        lo, hi = max(lo_x, lo_y), min(hi_x, hi_y)
    else:
        lo, hi = min(lo_x, lo_y), max(hi_x, hi_y)
    if not hi > lo:
        raise GridOutsideSupportError(f"{x.label} and {y.label} have no common support to compare on")
    return span_grid(float(lo), float(hi), ANALYTIC_GRID_POINTS)


def _log(values: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(values)


def _analytic_uni(x: DistributionSpec, y: DistributionSpec, relation: OrderRelation,
                  grid: Optional[Sequence[float]]) -> OrderVerdict:
    tol = max(app_settings.MONOTONE_TOL, x.numeric_tolerance, y.numeric_tolerance)

    if relation == OrderRelation.DISP:
        u = DISP_LEVELS if grid is None else as_grid(grid, 5)
        if np.any((u <= 0) | (u >= 1)):
            raise GridOutsideSupportError("dispersive grid must lie inside (0, 1)")
        diff = y.ppf(u) - x.ppf(u)
        err = x.ppf_error(u) + y.ppf_error(u)
        scale = np.maximum(1.0, np.maximum(np.abs(diff[:-1]), np.abs(diff[1:])))
        scan = worst(diff[:-1] - diff[1:], tol * scale + err[:-1] + err[1:])
        witness = {"u": float(u[scan.index]), "u_next": float(u[scan.index + 1])} if scan.index >= 0 else {}
        return _verdict(relation, scan, CheckMode.ANALYTIC, u, witness)

    overlap = relation not in (OrderRelation.ST, OrderRelation.ICX)
    t = _support_grid(x, y, overlap) if grid is None else as_grid(grid, MIN_ANALYTIC_POINTS)

    if relation == OrderRelation.ST:
        sx, sy = x.sf(t), y.sf(t)
        scan = worst(sx - sy, tol)
        return _verdict(relation, scan, CheckMode.ANALYTIC, t, {"x": float(t[scan.index])})
    if relation == OrderRelation.ICX:
        px, py = np.atleast_1d(x.integrated_sf(t)), np.atleast_1d(y.integrated_sf(t))
        tol = max(tol, _QUAD_TOL)
        scan = worst(px - py, tol * np.maximum(1.0, np.maximum(px, py)))
        return _verdict(relation, scan, CheckMode.ANALYTIC, t, {"x": float(t[scan.index])})

    if relation == OrderRelation.HR:
        values = x.cumhaz(t) - y.cumhaz(t)
    elif relation == OrderRelation.RH:
        values = _log(y.cdf(t)) - _log(x.cdf(t))
    elif relation == OrderRelation.LR:
        values = y.log_pdf(t) - x.log_pdf(t)
    elif relation == OrderRelation.C:
        values = _log(x.hazard(t)) - _log(y.hazard(t))
    elif relation == OrderRelation.MRL:
        tol = max(tol, _QUAD_TOL)
        values = _log(np.atleast_1d(y.integrated_sf(t))) - _log(np.atleast_1d(x.integrated_sf(t)))
    else:
        raise UnsupportedModeError(f"no analytic checker for '{relation.value}'")

    if not np.all(np.isfinite(values)):
        raise GridOutsideSupportError(f"{relation.value}: functional is not finite on the grid")
    scan = monotone_scan(values, increasing=True, rel_tol=tol)
    witness = {"x": float(t[scan.index]), "x_next": float(t[scan.index + 1])} if scan.index >= 0 else {}
    return _verdict(relation, scan, CheckMode.ANALYTIC, t, witness)


# --- Empirical univariate checks ---
def _sorted_sides(x: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    for side, arr in (("X", x), ("Y", y)):
        if arr.size < MIN_EMPIRICAL_ROWS:
            raise ParamOutOfDomainError(f"empirical checks need {MIN_EMPIRICAL_ROWS} draws per side, "
                                        f"{side} has {arr.size}")
    return np.sort(x), np.sort(y), np.concatenate([x, y])


def _ecdf(sorted_x: np.ndarray, t: np.ndarray) -> np.ndarray:
    return np.searchsorted(sorted_x, t, side="right") / sorted_x.size


def _quantiles(sorted_x: np.ndarray, levels: np.ndarray) -> np.ndarray:
    idx = np.maximum(np.ceil(levels * sorted_x.size).astype(int) - 1, 0)
    return sorted_x[idx]


def _quantile_variance(sorted_x: np.ndarray, levels: np.ndarray) -> np.ndarray:
    """p(1-p) / (N f^2) with the density taken from +-sqrt(N) spacings."""
    n = sorted_x.size
    m = max(1, int(math.sqrt(n)))
    idx = np.ceil(levels * n).astype(int) - 1
    hi = sorted_x[np.minimum(idx + m, n - 1)]
    lo = sorted_x[np.maximum(idx - m, 0)]
    spacing = np.maximum(hi - lo, 1e-300)
    density = (np.minimum(idx + m, n - 1) - np.maximum(idx - m, 0)) / (n * spacing)
    return levels * (1.0 - levels) / (n * density**2)


def _stop_loss(x: np.ndarray, t: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    excess = np.maximum(x[:, None] - t[None, :], 0.0)
    return excess.mean(axis=0), excess.var(axis=0, ddof=1)


def _pairwise_verdict(relation, values, variances, t, notes, min_points: int = 5) -> OrderVerdict:
    keep = np.isfinite(values) & np.isfinite(variances)
    values, variances, t = values[keep], variances[keep], t[keep]
    if values.size < min_points:
        note = f"only {values.size} grid points passed the tail-count gate (need {min_points})"
        logger.warning(f"{relation.value}: {note}")
        scan = pairwise_scan(values, variances) if values.size >= 2 else Scan(0.0, 0.0, -1)
        return _verdict(relation, scan, CheckMode.EMPIRICAL, t, {}, notes + [note], VerdictStatus.INCONCLUSIVE)
    scan = pairwise_scan(values, variances)
    witness = {}
    if scan.index >= 0:
        j, k = _pair(scan.index, values.size)
        witness = {"x": float(t[j]), "x_later": float(t[k])}
    return _verdict(relation, scan, CheckMode.EMPIRICAL, t, witness, notes)


def _empirical_uni(x: np.ndarray, y: np.ndarray, relation: OrderRelation) -> OrderVerdict:
    if relation == OrderRelation.C:
        raise UnsupportedModeError("the 'c' order is only checked from analytic hazards")
    xs, ys, pooled = _sorted_sides(x, y)
    nx, ny = xs.size, ys.size

    if relation == OrderRelation.ST:
        t = np.quantile(pooled, np.linspace(0.005, 0.995, ANALYTIC_GRID_POINTS))
        diff = (1.0 - _ecdf(xs, t)) - (1.0 - _ecdf(ys, t))
        scan = worst(diff, dkw_bound(nx) + dkw_bound(ny))
        return _verdict(relation, scan, CheckMode.EMPIRICAL, t, {"x": float(t[scan.index])},
                        ["tolerance: sum of the 99% DKW half-widths"])

    if relation == OrderRelation.HR:
        t = np.quantile(pooled, np.linspace(0.05, 0.95, 20))
        sx, sy = 1.0 - _ecdf(xs, t), 1.0 - _ecdf(ys, t)
        ok = (sx >= 20.0 / nx) & (sy >= 20.0 / ny)
        with np.errstate(divide="ignore", invalid="ignore"):
            values = np.where(ok, _log(sy) - _log(sx), np.nan)
            var = (1.0 - sy) / (ny * sy) + (1.0 - sx) / (nx * sx)
        return _pairwise_verdict(relation, values, var, t, ["log survival ratio, pairwise 3-SE bands"])

    if relation == OrderRelation.RH:
        t = np.quantile(pooled, np.linspace(0.05, 0.95, 20))
        fx, fy = _ecdf(xs, t), _ecdf(ys, t)
        ok = (fx >= 20.0 / nx) & (fy >= 20.0 / ny)
        with np.errstate(divide="ignore", invalid="ignore"):
            values = np.where(ok, _log(fy) - _log(fx), np.nan)
            var = (1.0 - fy) / (ny * fy) + (1.0 - fx) / (nx * fx)
        return _pairwise_verdict(relation, values, var, t, ["log distribution ratio, pairwise 3-SE bands"])

    if relation == OrderRelation.LR:
        return _empirical_lr(xs, ys, pooled)

    if relation == OrderRelation.DISP:
        u = DISP_LEVELS
        values = _quantiles(ys, u) - _quantiles(xs, u)
        var = _quantile_variance(ys, u) + _quantile_variance(xs, u)
        return _pairwise_verdict(relation, values, var, u, ["quantile difference, pairwise 3-SE bands"])

    if relation == OrderRelation.ICX:
        t = np.quantile(pooled, np.linspace(0.02, 0.98, 50))
        px, vx = _stop_loss(xs, t)
        py, vy = _stop_loss(ys, t)
        scan = worst(px - py, 3.0 * np.sqrt(vx / nx + vy / ny))
        return _verdict(relation, scan, CheckMode.EMPIRICAL, t, {"x": float(t[scan.index])},
                        ["stop-loss means, pointwise 3-SE bands"])

    if relation == OrderRelation.MRL:
        t = np.quantile(pooled, np.linspace(0.05, 0.95, 20))
        px, vx = _stop_loss(xs, t)
        py, vy = _stop_loss(ys, t)
        with np.errstate(divide="ignore", invalid="ignore"):
            values = _log(py) - _log(px)
            var = vy / (ny * py**2) + vx / (nx * px**2)
        return _pairwise_verdict(relation, values, var, t, ["log stop-loss ratio, pairwise 3-SE bands"])

    raise UnsupportedModeError(f"no empirical checker for '{relation.value}'")


def _empirical_lr(xs: np.ndarray, ys: np.ndarray, pooled: np.ndarray) -> OrderVerdict:
    relation = OrderRelation.LR
    n = min(xs.size, ys.size)
    bandwidth = 1.06 * float(np.std(pooled, ddof=1)) * n ** (-0.2)
    t = np.quantile(pooled, np.linspace(0.1, 0.9, 10))
    log_f, var = [], []
    for side in (ys, xs):
        kde = stats.gaussian_kde(side, bw_method=bandwidth / float(np.std(side, ddof=1)))
        f = kde(t)
        log_f.append(_log(f))
        var.append(_GAUSS_ROUGHNESS / (side.size * bandwidth * f))
    values = log_f[0] - log_f[1]
    variances = var[0] + var[1]
    notes = [f"gaussian KDE, common bandwidth {bandwidth:.4g}"]
    scan = pairwise_scan(values, variances)
    witness = {}
    if scan.index >= 0:
        j, k = _pair(scan.index, values.size)
        witness = {"x": float(t[j]), "x_later": float(t[k])}
    status = _status(scan)
    if status == VerdictStatus.HOLDS and scan.violation > 0:
        status = VerdictStatus.INCONCLUSIVE
        notes.append("density ratio drops inside its standard-error band")
    return _verdict(relation, scan, CheckMode.EMPIRICAL, t, witness, notes, status)


def check_order_uni(x: Union[DistributionSpec, Column], y: Union[DistributionSpec, Column],
                    relation: Union[str, OrderRelation], mode: Optional[Union[str, CheckMode]] = None,
                    grid: Optional[Sequence[float]] = None) -> OrderVerdict:
    """Check ``X <= Y`` in a univariate order.

    Distributions are compared analytically, samples empirically; ``mode`` only
    needs to be given to make the expectation explicit.
    """
    relation = OrderRelation(relation)
    if relation not in UNIVARIATE_RELATIONS:
        raise UnsupportedModeError(f"'{relation.value}' is not a univariate order")
    analytic = isinstance(x, DistributionSpec) and isinstance(y, DistributionSpec)
    if analytic != (isinstance(x, DistributionSpec) or isinstance(y, DistributionSpec)):
        raise UnsupportedModeError("cannot compare a distribution with a sample")
    mode = CheckMode(mode) if mode is not None else (CheckMode.ANALYTIC if analytic else CheckMode.EMPIRICAL)
    if (mode == CheckMode.ANALYTIC) != analytic:
        raise UnsupportedModeError(f"{mode.value} mode needs {'distributions' if not analytic else 'samples'}")
    if analytic:
        return _analytic_uni(x, y, relation, grid)
    return _empirical_uni(_as_column(x, "X"), _as_column(y, "Y"), relation)


# --- Multivariate usual stochastic order ---
Functional = Tuple[str, Callable[[np.ndarray], np.ndarray]]


def default_battery(x: SampleMatrix, y: SampleMatrix, seed: int = 0, orthants: int = 50,
                    weighted_sums: int = 20) -> List[Functional]:
    """Increasing functionals: coordinates, min, max, sum, prod(1 - e^-x), orthant indicators, weighted sums."""
    d = x.dim
    rng = child_generator(seed, "battery")
    pooled = np.vstack([x.draws, y.draws])
    battery: List[Functional] = [(f"x{i + 1}", lambda a, i=i: a[:, i]) for i in range(d)]
    battery += [
        ("min", lambda a: a.min(axis=1)),
        ("max", lambda a: a.max(axis=1)),
        ("sum", lambda a: a.sum(axis=1)),
        ("prod_1_minus_exp", lambda a: np.prod(-np.expm1(-np.maximum(a, 0.0)), axis=1)),
    ]
    for j in range(orthants):
        levels = rng.uniform(0.1, 0.9, size=d)
        corner = np.array([np.quantile(pooled[:, i], levels[i]) for i in range(d)])
        battery.append((f"orthant{j}", lambda a, c=corner: np.all(a > c, axis=1).astype(float)))
    for j in range(weighted_sums):
        w = rng.uniform(0.05, 1.0, size=d)
        battery.append((f"wsum{j}", lambda a, w=w: a @ w))
    return battery


def check_st_multi(x: SampleMatrix, y: SampleMatrix, battery: Optional[Sequence[Functional]] = None,
                   seed: int = 0) -> OrderVerdict:
    """E g(X) <= E g(Y) + 3 SE for every increasing g in the battery."""
    if x.dim != y.dim:
        raise DimensionMismatchError(f"cannot compare dimension {x.dim} with {y.dim}")
    battery = list(battery) if battery is not None else default_battery(x, y, seed)
    names, excess, tols = [], [], []
    for name, g in battery:
        gx, gy = np.asarray(g(x.draws), dtype=float), np.asarray(g(y.draws), dtype=float)
        se = math.sqrt(gx.var(ddof=1) / gx.size + gy.var(ddof=1) / gy.size)
        names.append(name)
        excess.append(float(gx.mean() - gy.mean()))
        tols.append(3.0 * se)
    scan = worst(np.array(excess), np.array(tols))
    notes = [f"necessary-condition battery of {len(battery)} increasing functionals, not a proof of the order"]
    return _verdict(OrderRelation.ST_MULTI, scan, CheckMode.EMPIRICAL, [], {"functional": names[scan.index]}, notes)


# --- Dynamic multivariate hazard rate order ---
def _require_analytic(*models) -> None:
    for model in models:
        if not is_analytic(model):
            raise NonAnalyticModelError(f"{model.tag}: needs builtin generator and closed-form distributions")


def _first_hazard(model: OrderedModel, offset: int, u: np.ndarray) -> Tuple[np.ndarray, bool]:
    """Hazard of model coordinate offset + 1 at u before any failure is observed."""
    if offset == 0:
        return dsos_conditional_hazard(model, 1, 0.0, u), False
    if offset != 1:
        raise ParamOutOfDomainError(f"first-failure hazards are available for offsets 0 and 1, got {offset}")
    dsos = model.as_dsos()

    def f1(s: float) -> float:
        s_arr = np.array([s])
        return float(dsos_min_survival(dsos, s_arr)[0] * dsos_conditional_hazard(dsos, 1, 0.0, s_arr)[0])

    out = np.empty_like(u)
    for idx, ui in enumerate(u):
        ui_arr = np.array([ui])

        def surv(s: float) -> float:
            return f1(s) * float(dsos_transition_survival(dsos, 2, s, ui_arr)[0])

        def dens(s: float) -> float:
            return surv(s) * float(dsos_conditional_hazard(dsos, 2, s, ui_arr)[0])

        num, _ = integrate.quad(dens, 0.0, ui, limit=200)
        tail, _ = integrate.quad(surv, 0.0, ui, limit=200)
        out[idx] = num / (float(dsos_min_survival(dsos, ui_arr)[0]) + tail)
    return out, True


def _hazard_table(model: OrderedModel, r: int, times: np.ndarray) -> np.ndarray:
    """table[s, u] = hazard of step r at u given the previous failure at s; NaN where u < s."""
    table = np.full((times.size, times.size), np.nan)
    for si, s in enumerate(times):
        u = times[si:]
        table[si, si:] = dsos_conditional_hazard(model, r, s, u)
    return table


def dyn_hr_time_grid(model: OrderedModel, levels: int = 9) -> np.ndarray:
    """Union of the 0.1..0.9 quantiles of the first and last step laws."""
    dsos = model.as_dsos()
    levels = np.linspace(0.1, 0.9, levels)
    first, _ = dsos.step(1)
    last, _ = dsos.step(dsos.n)
    return np.unique(np.concatenate([first.ppf(levels), last.ppf(levels)]))


def check_dyn_hr(model_x: OrderedModel, model_y: OrderedModel, offset_x: int = 0, offset_y: int = 0,
                 dim: Optional[int] = None, times: Optional[Sequence[float]] = None) -> OrderVerdict:
    """Dynamic multivariate hazard rate order between coordinate blocks of two ordered models.

    The compared vectors are coordinates ``offset+1 .. offset+dim`` of each model.
    Histories are ordered: i failures at times s_1 <= ... <= s_i, so only the
    next coordinate has a positive hazard and the Markov kernels give it from
    the last failure time. For each t <= u the Y hazard after a failure at t
    must not exceed the X hazard after any failure at s <= t.
    """
    _require_analytic(model_x, model_y)
    dim = dim or min(model_x.n - offset_x, model_y.n - offset_y)
    if dim < 1 or offset_x + dim > model_x.n or offset_y + dim > model_y.n:
        raise DimensionMismatchError(f"blocks of length {dim} at offsets ({offset_x}, {offset_y}) do not fit "
                                     f"models of size ({model_x.n}, {model_y.n})")
    grid = np.sort(np.asarray(times, dtype=float)) if times is not None else dyn_hr_time_grid(model_x)
    grid = as_grid(grid, 5)
    rel_tol = app_settings.MONOTONE_TOL

    eta0, quad_x = _first_hazard(model_x, offset_x, grid)
    lam0, quad_y = _first_hazard(model_y, offset_y, grid)
    if quad_x or quad_y:
        rel_tol = max(rel_tol, 100.0 * app_settings.MONOTONE_TOL)
    scans = [(worst(lam0 - eta0, rel_tol * np.maximum(1.0, np.abs(lam0))), 0, None)]

    for i in range(1, dim):
        eta = _hazard_table(model_x, offset_x + i + 1, grid)
        lam = _hazard_table(model_y, offset_y + i + 1, grid)
        # smallest X hazard over all earlier X histories s <= t
        eta_min = np.minimum.accumulate(np.where(np.isnan(eta), np.inf, eta), axis=0)
        mask = ~np.isnan(lam)
        excess = np.where(mask, lam - eta_min, -np.inf)
        tol = rel_tol * np.maximum(1.0, np.where(mask, np.abs(lam), 0.0))
        scans.append((worst(excess, tol), i, excess.shape))

    best = max(scans, key=lambda item: item[0].violation - item[0].tolerance)
    scan, failures, shape = best
    witness: Dict = {"failures": failures}
    if scan.index >= 0:
        if shape is None:
            witness["u"] = float(grid[scan.index])
        else:
            t_idx, u_idx = np.unravel_index(scan.index, shape)
            witness.update({"t": float(grid[t_idx]), "u": float(grid[u_idx])})
    notes = [
        "histories restricted to the ordered support; later failures in X alone give zero Y hazard",
        f"offsets X={offset_x}, Y={offset_y}, block length {dim}",
    ]
    return _verdict(OrderRelation.DYN_HR, scan, CheckMode.ANALYTIC, grid, witness, notes)


# --- Multivariate dispersive order ---
def _view_transform(model: OrderedModel, view: Sequence[int], u: List[np.ndarray]) -> Tuple[List[np.ndarray],
                                                                                          List[np.ndarray]]:
    """Sequential conditional quantile transform x_k(u_1..u_k) of the viewed coordinates, with error bounds."""
    coords = list(view)
    if any(c < 0 or c > model.n for c in coords):
        raise ParamOutOfDomainError(f"{model.tag}: view {coords} leaves 0..{model.n}")
    nonzero = [c for c in coords if c > 0]
    if coords[: len(coords) - len(nonzero)] != [0] * (len(coords) - len(nonzero)) or any(
        b <= a for a, b in zip(nonzero, nonzero[1:])
    ):
        raise ParamOutOfDomainError(
            f"{model.tag}: view must be leading zeros then increasing coordinates, got {coords}"
        )

    xs, errs = [], []
    prev_coord = 0
    prev_x = np.zeros_like(u[0])
    prev_y = np.zeros_like(u[0])
    prev_err = np.zeros_like(u[0])
    for c, level in zip(coords, u):
        if c == 0:
            xs.append(np.zeros_like(level))
            errs.append(np.zeros_like(level))
            continue
        if isinstance(model, DgosModel):
            law = dgos_increment_sum(model, prev_coord + 1, c)
            prev_y = prev_y + law.ppf(level)
            prev_err = prev_err + law.ppf_error(level)
            x = model.baseline.cumhaz_inv(prev_y)
            with np.errstate(divide="ignore", invalid="ignore"):
                err = np.where(prev_err > 0, prev_err / model.baseline.hazard(x), 0.0)
        else:
            if c != prev_coord + 1:
                raise NonAnalyticModelError(f"{model.tag}: DSOS conditional quantiles need consecutive steps from 1")
            x = dsos_conditional_quantile(model, c, prev_x, level)
            err = np.zeros_like(level)
        xs.append(x)
        errs.append(err)
        prev_coord, prev_x = c, x
    return xs, errs


def check_disp_multi(model_x: OrderedModel, view_x: Sequence[int], model_y: OrderedModel, view_y: Sequence[int],
                     u_points: int = 9) -> OrderVerdict:
    """y_k(u) - x_k(u) nondecreasing in each u_j, j <= k, over a u-grid in (0, 1)^d."""
    _require_analytic(model_x, model_y)
    if len(view_x) != len(view_y):
        raise DimensionMismatchError(f"views of length {len(view_x)} and {len(view_y)}")
    if u_points < 5:
        raise GridTooCoarseError(f"dispersive grid needs at least 5 points per axis, got {u_points}")
    d = len(view_x)
    levels = np.linspace(0.05, 0.95, u_points)
    u = np.meshgrid(*([levels] * d), indexing="ij")
    xs, ex = _view_transform(model_x, view_x, u)
    ys, ey = _view_transform(model_y, view_y, u)

    best = Scan(0.0, app_settings.DISP_MULTI_TOL, -1)
    best_at: Dict = {}
    for k in range(d):
        delta = ys[k] - xs[k]
        err = ex[k] + ey[k]
        for j in range(k + 1):
            lo = [slice(None)] * d
            hi = [slice(None)] * d
            lo[j], hi[j] = slice(None, -1), slice(1, None)
            lo_t, hi_t = tuple(lo), tuple(hi)
            drop = delta[lo_t] - delta[hi_t]
            scale = np.maximum(1.0, np.maximum(np.abs(delta[lo_t]), np.abs(delta[hi_t])))
            tol = app_settings.DISP_MULTI_TOL * scale + err[lo_t] + err[hi_t]
            scan = worst(drop, tol)
            if scan.index >= 0 and scan.violation - scan.tolerance > best.violation - best.tolerance:
                best = scan
                point = np.unravel_index(scan.index, drop.shape)
                best_at = {"coordinate": k + 1, "axis": j + 1, "u": [float(levels[p]) for p in point]}
    notes = [f"views X={list(view_x)}, Y={list(view_y)}; {u_points} levels per axis"]
    return _verdict(OrderRelation.DISP_MULTI, best, CheckMode.ANALYTIC, levels, best_at, notes)


# --- Majorization ---
def check_majorization(x: Sequence[float], y: Sequence[float],
                       kind: Union[str, MajorizationKind]) -> MajorizationResult:
    """Does ``y`` precede ``x`` (y is majorized by x in the given sense)?

    Both vectors are sorted ascending; with partial sums/products over the
    first j entries, w_super needs sum x <= sum y, p_larger needs prod x <= prod y
    and rm needs sum 1/x >= sum 1/y for every j.
    """
    kind = MajorizationKind(kind)
    xa = np.sort(np.asarray(x, dtype=float))
    ya = np.sort(np.asarray(y, dtype=float))
    if xa.shape != ya.shape:
        raise LengthMismatchError(f"vectors of length {xa.size} and {ya.size}")
    if kind != MajorizationKind.W_SUPER and (np.any(xa <= 0) or np.any(ya <= 0)):
        raise NonPositiveEntryError(f"{kind.value} needs strictly positive entries")

    if kind == MajorizationKind.W_SUPER:
        lhs, rhs = np.cumsum(xa), np.cumsum(ya)
    elif kind == MajorizationKind.P_LARGER:
        lhs, rhs = np.cumsum(np.log(xa)), np.cumsum(np.log(ya))
    else:
        lhs, rhs = np.cumsum(1.0 / ya), np.cumsum(1.0 / xa)
    margins = rhs - lhs
    tol = 1e-12 * np.maximum(1.0, np.maximum(np.abs(lhs), np.abs(rhs)))
    failed = np.nonzero(margins < -tol)[0]
    return MajorizationResult(
        kind=kind,
        holds=failed.size == 0,
        violated_at=int(failed[0]) + 1 if failed.size else None,
        margins=margins.tolist(),
    )
