# osim/core/distributions.py
"""
Lifetime distributions
======================

Nonnegative lifetime laws described through their cumulative hazard
D(x) = -ln S(x) and its inverse, the PHR transform, the increment laws of the
DGOS representation, tabulated sums of independent increments and the aging
class checks used as theorem hypotheses.
"""
import logging
import math
from abc import ABC, abstractmethod
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import integrate, optimize, signal, special, stats

from osim.config import app_settings
from osim.core.exceptions import GridOutsideSupportError, ParamOutOfDomainError, UnknownDistributionError
from osim.core.grids import as_grid, monotone_scan
from osim.models.verdict_models import AgingClass, CheckMode, OrderVerdict, VerdictStatus

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


class DistributionSpec(ABC):
    """A lifetime distribution on [0, right_endpoint].

    Subclasses implement ``sf``, ``pdf``, ``cumhaz`` and ``cumhaz_inv``; every other
    quantity derives from those unless a subclass has a sharper closed form.
    """

    name: str = "distribution"

    def __init__(self, params: Optional[Mapping[str, float]] = None):
        self.params: Dict[str, float] = dict(params or {})

    @abstractmethod
    def sf(self, x: ArrayLike) -> np.ndarray: ...

    @abstractmethod
    def pdf(self, x: ArrayLike) -> np.ndarray: ...

    @abstractmethod
    def cumhaz(self, x: ArrayLike) -> np.ndarray: ...

    @abstractmethod
    def cumhaz_inv(self, y: ArrayLike) -> np.ndarray: ...

    @property
    def right_endpoint(self) -> float:
        return math.inf

    @property
    def numeric_tolerance(self) -> float:
        """Accuracy of tabulated quantities; 0 for closed forms."""
        return 0.0

    def ppf_error(self, p: ArrayLike) -> np.ndarray:
        """Bound on the quantile error at level p; 0 for closed forms."""
        return np.zeros(np.shape(p))

    def cdf(self, x: ArrayLike) -> np.ndarray:
        return -np.expm1(-self.cumhaz(x))

    def ppf(self, p: ArrayLike) -> np.ndarray:
        return self.cumhaz_inv(-np.log1p(-np.asarray(p, dtype=float)))

    def log_pdf(self, x: ArrayLike) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(self.pdf(x))

    def hazard(self, x: ArrayLike) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.pdf(x) / self.sf(x)

    def rhazard(self, x: ArrayLike) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.pdf(x) / self.cdf(x)

    def log_pdf_d1(self, x: ArrayLike) -> np.ndarray:
        """f'(x)/f(x) by central differences."""
        x = np.asarray(x, dtype=float)
        h = 1e-5 * np.maximum(1.0, x)
        h = np.minimum(h, 0.5 * x) if np.all(x > 0) else h
        return (self.log_pdf(x + h) - self.log_pdf(x - h)) / (2.0 * h)

    def integrated_sf(self, t: ArrayLike) -> np.ndarray:
        """int_t^inf S(u) du (the stop-loss transform)."""
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty_like(t_arr)
        for i, lo in enumerate(t_arr):
            value, _ = integrate.quad(lambda u: float(self.sf(np.array([u]))[0]), max(lo, 0.0), self.right_endpoint,
                                      limit=200)
            out[i] = value + max(-lo, 0.0)
        return out if np.ndim(t) else out[0]

    def mean(self) -> float:
        return float(np.atleast_1d(self.integrated_sf(0.0))[0])

    @property
    def label(self) -> str:
        if not self.params:
            return self.name
        inner = ", ".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"{self.name}({inner})"

    def describe(self) -> Dict:
        return {"name": self.name, "params": dict(self.params)}

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.label}>"


def _require_positive(family: str, **values: float) -> None:
    for key, value in values.items():
        if not (np.isfinite(value) and value > 0):
            raise ParamOutOfDomainError(f"{family} requires {key} > 0, got {value}")


def _clip0(x: ArrayLike) -> np.ndarray:
    return np.maximum(np.asarray(x, dtype=float), 0.0)


# --- Builtin families ---
class Exponential(DistributionSpec):
    name = "exponential"

    def __init__(self, rate: float):
        _require_positive(self.name, rate=rate)
        super().__init__({"rate": float(rate)})
        self.rate = float(rate)

    def sf(self, x):
        return np.exp(-self.rate * _clip0(x))

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x < 0, 0.0, self.rate * np.exp(-self.rate * _clip0(x)))

    def cumhaz(self, x):
        return self.rate * _clip0(x)

    def cumhaz_inv(self, y):
        return _clip0(y) / self.rate

    def hazard(self, x):
        return np.full(np.shape(x), self.rate)

    def log_pdf_d1(self, x):
        return np.full(np.shape(x), -self.rate)

    def integrated_sf(self, t):
        t = np.asarray(t, dtype=float)
        return np.exp(-self.rate * _clip0(t)) / self.rate + np.maximum(-t, 0.0)


class Weibull(DistributionSpec):
    name = "weibull"

    def __init__(self, shape: float, scale: float = 1.0):
        _require_positive(self.name, shape=shape, scale=scale)
        super().__init__({"shape": float(shape), "scale": float(scale)})
        self.shape = float(shape)
        self.scale = float(scale)

    def cumhaz(self, x):
        return np.power(_clip0(x) / self.scale, self.shape)

    def cumhaz_inv(self, y):
        return self.scale * np.power(_clip0(y), 1.0 / self.shape)

    def sf(self, x):
        return np.exp(-self.cumhaz(x))

    def hazard(self, x):
        x = _clip0(x)
        with np.errstate(divide="ignore"):
            return self.shape / self.scale * np.power(x / self.scale, self.shape - 1.0)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x < 0, 0.0, self.hazard(x) * self.sf(x))

    def log_pdf_d1(self, x):
        x = np.asarray(x, dtype=float)
        return (self.shape - 1.0) / x - self.hazard(x)

    def integrated_sf(self, t):
        a = 1.0 / self.shape
        t = np.asarray(t, dtype=float)
        tail = self.scale * a * special.gamma(a) * special.gammaincc(a, self.cumhaz(t))
        return tail + np.maximum(-t, 0.0)


class Lomax(DistributionSpec):
    name = "lomax"

    def __init__(self, shape: float, scale: float):
        _require_positive(self.name, shape=shape, scale=scale)
        super().__init__({"shape": float(shape), "scale": float(scale)})
        self.shape = float(shape)
        self.scale = float(scale)

    def cumhaz(self, x):
        return self.shape * np.log1p(_clip0(x) / self.scale)

    def cumhaz_inv(self, y):
        return self.scale * np.expm1(_clip0(y) / self.shape)

    def sf(self, x):
        return np.power(1.0 + _clip0(x) / self.scale, -self.shape)

    def hazard(self, x):
        return self.shape / (self.scale + _clip0(x))

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x < 0, 0.0, self.hazard(x) * self.sf(x))

    def log_pdf_d1(self, x):
        return -(self.shape + 1.0) / (self.scale + _clip0(x))

    def integrated_sf(self, t):
        t = np.asarray(t, dtype=float)
        if self.shape <= 1.0:
            return np.full(t.shape, np.inf) if t.ndim else math.inf
        tail = self.scale / (self.shape - 1.0) * np.power(1.0 + _clip0(t) / self.scale, 1.0 - self.shape)
        return tail + np.maximum(-t, 0.0)


class Gamma(DistributionSpec):
    """Gamma(shape, rate); D^-1 from the inverse regularised gamma with a bracketed fallback."""

    name = "gamma"

    def __init__(self, shape: float, rate: float):
        _require_positive(self.name, shape=shape, rate=rate)
        super().__init__({"shape": float(shape), "rate": float(rate)})
        self.shape = float(shape)
        self.rate = float(rate)
        self._law = stats.gamma(self.shape, scale=1.0 / self.rate)

    def sf(self, x):
        return special.gammaincc(self.shape, self.rate * _clip0(x))

    def cumhaz(self, x):
        return -self._law.logsf(_clip0(x))

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x < 0, 0.0, self._law.pdf(_clip0(x)))

    def hazard(self, x):
        x = _clip0(x)
        return np.exp(self._law.logpdf(x) - self._law.logsf(x))

    def log_pdf_d1(self, x):
        x = np.asarray(x, dtype=float)
        return (self.shape - 1.0) / x - self.rate

    def cumhaz_inv(self, y):
        shape = np.shape(y)
        y = np.atleast_1d(_clip0(y))
        with np.errstate(under="ignore"):
            out = special.gammainccinv(self.shape, np.exp(-y)) / self.rate
        redo = ~np.isfinite(out) | (np.abs(self.cumhaz(out) - y) > 1e-8 * np.maximum(1.0, y))
        for i in np.flatnonzero(redo):
            out[i] = self._solve_cumhaz(float(y[i]))
        return out.reshape(shape)

    def _solve_cumhaz(self, target: float) -> float:
        if target <= 0.0:
            return 0.0
        hi = max(1.0, self.shape / self.rate)
        while float(self.cumhaz(hi)) < target:
            hi *= 2.0
        return optimize.brentq(lambda x: float(self.cumhaz(x)) - target, 0.0, hi, xtol=app_settings.QUANTILE_XTOL)

    def integrated_sf(self, t):
        t = np.asarray(t, dtype=float)
        z = self.rate * _clip0(t)
        tail = self.shape / self.rate * special.gammaincc(self.shape + 1.0, z) - _clip0(t) * special.gammaincc(
            self.shape, z
        )
        return tail + np.maximum(-t, 0.0)


_BUILTINS = {
    "exponential": (Exponential, ("rate",)),
    "weibull": (Weibull, ("shape", "scale")),
    "lomax": (Lomax, ("shape", "scale")),
    "gamma": (Gamma, ("shape", "rate")),
}


def builtin_names() -> List[str]:
    return list(_BUILTINS)


def make_distribution(name: str, params: Union[Sequence[float], Mapping[str, float]]) -> DistributionSpec:
    key = name.strip().lower()
    if key not in _BUILTINS:
        raise UnknownDistributionError(f"unknown distribution '{name}'; builtins: {', '.join(_BUILTINS)}")
    cls, names = _BUILTINS[key]
    if isinstance(params, Mapping):
        unknown = set(params) - set(names)
        if unknown:
            raise ParamOutOfDomainError(f"{key} got unexpected parameters {sorted(unknown)}")
        kwargs = {k: float(v) for k, v in params.items()}
    else:
        if not 1 <= len(params) <= len(names):
            raise ParamOutOfDomainError(f"{key} takes parameters {names}, got {len(params)} values")
        kwargs = {k: float(v) for k, v in zip(names, params)}
    try:
        return cls(**kwargs)
    except TypeError as e:
        raise ParamOutOfDomainError(f"{key}: {e}") from e


# --- Transforms ---
class PhrDistribution(DistributionSpec):
    """Proportional hazards transform: S(x) = S_base(x)^alpha."""

    name = "phr"

    def __init__(self, baseline: DistributionSpec, alpha: float):
        _require_positive("phr", alpha=alpha)
        super().__init__({"alpha": float(alpha)})
        self.baseline = baseline
        self.alpha = float(alpha)

    @property
    def label(self) -> str:
        return f"phr({self.baseline.label}, alpha={self.alpha:g})"

    def describe(self) -> Dict:
        return {"phr": {"baseline": self.baseline.describe(), "alpha": self.alpha}}

    @property
    def right_endpoint(self) -> float:
        return self.baseline.right_endpoint

    @property
    def numeric_tolerance(self) -> float:
        return self.baseline.numeric_tolerance

    def cumhaz(self, x):
        return self.alpha * self.baseline.cumhaz(x)

    def cumhaz_inv(self, y):
        return self.baseline.cumhaz_inv(np.asarray(y, dtype=float) / self.alpha)

    def sf(self, x):
        return np.exp(-self.cumhaz(x))

    def hazard(self, x):
        return self.alpha * self.baseline.hazard(x)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x < 0, 0.0, self.hazard(x) * self.sf(x))

    def log_pdf_d1(self, x):
        return self.baseline.log_pdf_d1(x) - (self.alpha - 1.0) * self.baseline.hazard(x)

    def ppf_error(self, p):
        return self.baseline.ppf_error(-np.expm1(np.log1p(-np.asarray(p, dtype=float)) / self.alpha))


def make_phr(baseline: DistributionSpec, alpha: float) -> DistributionSpec:
    return PhrDistribution(baseline, alpha)


class BIncrementDistribution(DistributionSpec):
    """Law of W/alpha where W has survival phi(count * psi(e^-t)).

    These are the independent increments on the cumulative-hazard scale of a
    DGOS vector; ``count`` may be non-integer.
    """

    name = "b_increment"

    def __init__(self, gen, count: float, alpha: float):
        _require_positive(self.name, count=count, alpha=alpha)
        super().__init__({"count": float(count), "alpha": float(alpha)})
        self.gen = gen
        self.count = float(count)
        self.alpha = float(alpha)

    @property
    def label(self) -> str:
        return f"b_increment({self.gen.label}, count={self.count:g}, alpha={self.alpha:g})"

    def _inner(self, x):
        return self.count * self.gen.psi_neglog(self.alpha * _clip0(x))

    def sf(self, x):
        return self.gen.phi(self._inner(x))

    def cumhaz(self, x):
        return -self.gen.log_phi(self._inner(x)) + 0.0

    def cumhaz_inv(self, y):
        return -self.gen.log_phi(self.gen.psi_neglog(_clip0(y)) / self.count) / self.alpha + 0.0

    def log_pdf(self, x):
        x = np.asarray(x, dtype=float)
        s = np.maximum(self.gen.psi_neglog(self.alpha * _clip0(x)), 1e-300)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (
                math.log(self.alpha * self.count)
                - self.alpha * _clip0(x)
                + self.gen.log_abs_phi_dk(self.count * s, 1)
                - self.gen.log_abs_phi_dk(s, 1)
            )
        return np.where(x < 0, -np.inf, out)

    def pdf(self, x):
        return np.exp(self.log_pdf(x))

    def hazard(self, x):
        return np.exp(self.log_pdf(x) + self.cumhaz(x))


class ConvolutionDistribution(DistributionSpec):
    """Sum of independent nonnegative parts, tabulated on a uniform grid.

    Exact cell masses of every part are convolved by FFT; each resulting atom is
    spread uniformly over its cell, so the CDF is piecewise linear and the
    density piecewise constant (interpolated between cell centres). The
    accuracy estimate compares the tabulation against one on half as many cells.
    """

    name = "convolution"
    _TAIL = 1e-12

    def __init__(self, parts: Sequence[DistributionSpec], points: Optional[int] = None):
        if not parts:
            raise ParamOutOfDomainError("a convolution needs at least one part")
        super().__init__({"parts": float(len(parts))})
        self.parts = list(parts)
        self.points = app_settings.CONVOLUTION_POINTS if points is None else int(points)
        m = len(self.parts)
        upper = 0.0
        for part in self.parts:
            cut = float(np.atleast_1d(part.cumhaz_inv(-math.log(self._TAIL / m)))[0])
            upper += min(cut, part.right_endpoint)
        self.upper = upper
        self._edges, self._cdf, self._sf, self._centers, self._density, self._h = self._tabulate(self.points)
        self._tolerance, self._quantile_tolerance = self._accuracy()
        logger.debug(f"Tabulated sum of {m} parts on {self.points} cells up to {upper:.4g} (tol {self._tolerance:.2e})")

    @property
    def label(self) -> str:
        return "convolution(" + ", ".join(p.label for p in self.parts) + ")"

    @property
    def numeric_tolerance(self) -> float:
        return self._tolerance

    def _tabulate(self, cells: int):
        m = len(self.parts)
        h = self.upper / cells
        grid = np.arange(cells + 1) * h
        mass = None
        for part in self.parts:
            cell = np.clip(-np.diff(part.sf(grid)), 0.0, None)
            mass = cell if mass is None else np.clip(signal.fftconvolve(mass, cell), 0.0, None)
        mass = mass[: cells + 1]
        # atom j sits at (j + m/2) h and covers the cell of width h around it
        edges = (np.arange(mass.size + 1) + 0.5 * (m - 1)) * h
        cdf = np.concatenate(([0.0], np.cumsum(mass)))
        sf = np.concatenate((np.cumsum(mass[::-1])[::-1], [0.0]))
        centers = (np.arange(mass.size) + 0.5 * m) * h
        return edges, cdf, sf, centers, mass / h, h

    def _accuracy(self) -> Tuple[float, float]:
        edges, cdf, sf, centers, density, _ = self._tabulate(max(self.points // 2, 64))
        sf_gap = float(np.max(np.abs(self.sf(edges) - sf)))
        body = (sf[:-1] > 1e-3) & (sf[1:] < 0.999) & (density > 0)
        with np.errstate(divide="ignore"):
            log_gap = np.abs(self.log_pdf(centers[body]) - np.log(density[body]))
        log_gap = float(np.max(log_gap)) if log_gap.size else 0.0
        levels = np.linspace(0.01, 0.99, 99)
        q_gap = float(np.max(np.abs(self.ppf(levels) - np.interp(levels, cdf, edges))))
        return max(1e-9, 4.0 * max(sf_gap, log_gap)), max(1e-12, 4.0 * q_gap)

    def ppf_error(self, p):
        return np.full(np.shape(p), self._quantile_tolerance)

    def cdf(self, x):
        return np.interp(np.asarray(x, dtype=float), self._edges, self._cdf, left=0.0, right=self._cdf[-1])

    def sf(self, x):
        return np.interp(np.asarray(x, dtype=float), self._edges, self._sf, left=1.0, right=0.0)

    def pdf(self, x):
        return np.interp(np.asarray(x, dtype=float), self._centers, self._density, left=0.0, right=0.0)

    def cumhaz(self, x):
        with np.errstate(divide="ignore"):
            return -np.log(self.sf(x))

    def cumhaz_inv(self, y):
        target = np.exp(-_clip0(y))
        # sf decreases along the edges; interpolate on the reversed arrays
        return np.interp(target, self._sf[::-1], self._edges[::-1])

    def ppf(self, p):
        return np.interp(np.asarray(p, dtype=float), self._cdf, self._edges)

    def integrated_sf(self, t):
        tail = integrate.cumulative_trapezoid(self._sf[::-1], -self._edges[::-1], initial=0.0)[::-1]
        t = np.asarray(t, dtype=float)
        below = np.maximum(self._edges[0] - t, 0.0)
        return np.interp(t, self._edges, tail, left=tail[0], right=0.0) + below


class HazardTransformedDistribution(DistributionSpec):
    """Law of D_F^-1(S): ``inner`` lives on the cumulative-hazard scale of ``baseline``."""

    name = "hazard_transformed"

    def __init__(self, inner: DistributionSpec, baseline: DistributionSpec):
        super().__init__({})
        self.inner = inner
        self.baseline = baseline

    @property
    def label(self) -> str:
        return f"D^-1[{self.baseline.label}]({self.inner.label})"

    @property
    def right_endpoint(self) -> float:
        return self.baseline.right_endpoint

    @property
    def numeric_tolerance(self) -> float:
        return max(self.inner.numeric_tolerance, self.baseline.numeric_tolerance)

    def sf(self, x):
        return self.inner.sf(self.baseline.cumhaz(x))

    def cdf(self, x):
        return self.inner.cdf(self.baseline.cumhaz(x))

    def cumhaz(self, x):
        return self.inner.cumhaz(self.baseline.cumhaz(x))

    def cumhaz_inv(self, y):
        return self.baseline.cumhaz_inv(self.inner.cumhaz_inv(y))

    def ppf(self, p):
        return self.baseline.cumhaz_inv(self.inner.ppf(p))

    def pdf(self, x):
        return self.inner.pdf(self.baseline.cumhaz(x)) * self.baseline.hazard(x)

    def hazard(self, x):
        return self.inner.hazard(self.baseline.cumhaz(x)) * self.baseline.hazard(x)

    def log_pdf_d1(self, x):
        h = self.baseline.hazard(x)
        return self.inner.log_pdf_d1(self.baseline.cumhaz(x)) * h + self.baseline.log_pdf_d1(x) + h

    def ppf_error(self, p):
        x = self.ppf(p)
        return self.inner.ppf_error(p) / self.baseline.hazard(x) + self.baseline.ppf_error(self.baseline.cdf(x))


# --- Aging classes ---
_AGING_SHAPES = {
    AgingClass.ILR: ("log_pdf_d1", False),
    AgingClass.DLR: ("log_pdf_d1", True),
    AgingClass.IFR: ("hazard", True),
    AgingClass.DFR: ("hazard", False),
    AgingClass.DRFR: ("rhazard", False),
}


def aging_grid(dist: DistributionSpec, points: int = 200) -> np.ndarray:
    """Log-spaced grid between the 1e-4 and 1 - 1e-4 quantiles (densities may blow up at 0)."""
    lo, hi = np.atleast_1d(dist.ppf(np.array([1e-4, 1.0 - 1e-4])))
    return np.geomspace(lo, hi, points)


def check_aging_class(dist: DistributionSpec, aging_class: Union[str, AgingClass],
                      grid: Optional[Sequence[float]] = None) -> OrderVerdict:
    aging_class = AgingClass(aging_class)
    x = aging_grid(dist) if grid is None else as_grid(grid, 100)
    if np.any(x < 0) or np.any(x > dist.right_endpoint) or np.any(dist.sf(x) <= 0):
        raise GridOutsideSupportError(f"aging grid for {dist.label} leaves the support")

    attr, increasing = _AGING_SHAPES[aging_class]
    values = getattr(dist, attr)(x)
    tol = max(app_settings.MONOTONE_TOL, dist.numeric_tolerance)
    scan = monotone_scan(values, increasing=increasing, rel_tol=tol)
    holds = scan.violation <= scan.tolerance
    logger.debug(f"{dist.label} {aging_class.value}: holds={holds} violation={scan.violation:.3g}")
    witness = {}
    if scan.index >= 0:
        witness = {"x": float(x[scan.index]), "x_next": float(x[scan.index + 1])}
    return OrderVerdict(
        relation=aging_class,
        direction=aging_class.value,
        status=VerdictStatus.HOLDS if holds else VerdictStatus.VIOLATED,
        mode=CheckMode.ANALYTIC,
        max_violation=scan.violation,
        tolerance=scan.tolerance,
        witness=witness,
        grid=x.tolist(),
    )
