# osim/core/copulagen.py
"""
Archimedean generators
======================

Generators phi with inverses psi, derivatives of every order, the diagnostic
functionals H, R and G, the monotonicity conditions built on them,
d-monotonicity validation and copula/W sampling.

Every function is vectorised over numpy arrays.
"""
import functools
import logging
import math
from abc import ABC, abstractmethod
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import integrate, special

from osim.config import app_settings
from osim.core.exceptions import (
    DegenerateDenominatorError,
    DerivativeUnavailableError,
    GeneratorValidationError,
    ParamOutOfDomainError,
    RootNotBracketedError,
    UnknownGeneratorError,
)
from osim.core.grids import as_grid, generator_grid, monotone_scan, worst
from osim.models.verdict_models import ConditionId, ConditionVerdict, GeneratorDiagnostics, ValidityReport

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

_FD_MAX_ORDER = 4
_BISECT_MAX_ITER = 200
_BRACKET_MAX_DOUBLINGS = 128


def _falling(a: float, j: int) -> float:
    """a (a-1) ... (a-j+1), with the empty product equal to 1."""
    out = 1.0
    for i in range(j):
        out *= a - i
    return out


def bisect_decreasing(func: Callable[[np.ndarray], np.ndarray], target: np.ndarray, lo: ArrayLike, hi: ArrayLike,
                      xtol: Optional[float] = None) -> np.ndarray:
    """Vectorised bisection for ``func(y) = target`` with ``func`` decreasing on [lo, hi].

    ``lo`` and ``hi`` are scalars or one bound per target. Raises
    RootNotBracketedError when some target lies outside ``[func(hi), func(lo)]``.
    """
    xtol = app_settings.ROOT_XTOL if xtol is None else xtol
    target = np.asarray(target, dtype=float)
    lo_arr = np.broadcast_to(np.asarray(lo, dtype=float), target.shape).copy()
    hi_arr = np.broadcast_to(np.asarray(hi, dtype=float), target.shape).copy()
    short = func(hi_arr) > target
    if np.any(short):
        at = int(np.argmax(short.ravel()))
        raise RootNotBracketedError(
            f"target {target.ravel()[at]:.6g} not bracketed on [{lo_arr.ravel()[at]:g}, {hi_arr.ravel()[at]:g}]"
        )
    width = float(np.max(hi_arr - lo_arr)) if hi_arr.size else 0.0
    iterations = min(_BISECT_MAX_ITER, int(math.ceil(math.log2(max(width, xtol) / xtol))) + 1)
    for _ in range(iterations):
        mid = 0.5 * (lo_arr + hi_arr)
        above = func(mid) > target
        lo_arr = np.where(above, mid, lo_arr)
        hi_arr = np.where(above, hi_arr, mid)
    return 0.5 * (lo_arr + hi_arr)


def grow_bracket(func: Callable[[np.ndarray], np.ndarray], target: np.ndarray, hi: float) -> np.ndarray:
    """Per-target upper bounds with ``func(hi) <= target``, doubling ``hi`` where it falls short."""
    target = np.asarray(target, dtype=float)
    hi_arr = np.full(target.shape, float(hi))
    for _ in range(_BRACKET_MAX_DOUBLINGS):
        short = func(hi_arr) > target
        if not np.any(short):
            return hi_arr
        hi_arr = np.where(short, 2.0 * hi_arr, hi_arr)
    at = int(np.argmax((func(hi_arr) > target).ravel()))
    raise RootNotBracketedError(f"target {target.ravel()[at]:.6g} not bracketed below {hi_arr.ravel()[at]:g}")


# --- Generator types ---
class GeneratorSpec(ABC):
    """An Archimedean generator phi: [0, inf) -> (0, 1] with inverse psi.

    Subclasses provide ``phi`` and ``psi``; derivatives come from ``_analytic_dk``
    when ``analytic_order`` covers the requested order, otherwise from central
    differences up to order 4.
    """

    name: str = "generator"
    analytic_order: int = 0
    has_frailty: bool = False

    def __init__(self, params: Optional[Mapping[str, float]] = None):
        self.params: Dict[str, float] = dict(params or {})

    # -- core maps --
    @abstractmethod
    def phi(self, u: ArrayLike) -> np.ndarray: ...

    @abstractmethod
    def psi(self, v: ArrayLike) -> np.ndarray: ...

    def log_phi(self, u: ArrayLike) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(self.phi(u))

    def psi_neglog(self, z: ArrayLike) -> np.ndarray:
        """psi(exp(-z)); overridden where a cancellation-free form exists."""
        return self.psi(np.exp(-np.asarray(z, dtype=float)))

    # -- derivatives --
    @property
    def numeric_derivatives(self) -> bool:
        return self.analytic_order < _FD_MAX_ORDER

    def _analytic_dk(self, u: np.ndarray, k: int) -> np.ndarray:
        raise DerivativeUnavailableError(f"{self.label} has no analytic derivative of order {k}")

    def phi_dk(self, u: ArrayLike, k: int) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if k == 0:
            return self.phi(u)
        if k <= self.analytic_order:
            return self._analytic_dk(u, k)
        if k > _FD_MAX_ORDER:
            raise DerivativeUnavailableError(
                f"{self.label}: derivative of order {k} needs an analytic form "
                f"(finite differences stop at {_FD_MAX_ORDER})"
            )
        return self._finite_difference(u, k)

    def phi_d1(self, u: ArrayLike) -> np.ndarray:
        return self.phi_dk(u, 1)

    def phi_d2(self, u: ArrayLike) -> np.ndarray:
        return self.phi_dk(u, 2)

    def log_abs_phi_dk(self, u: ArrayLike, k: int) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self.phi_dk(u, k)))

    def psi_d1(self, v: ArrayLike) -> np.ndarray:
        return 1.0 / self.phi_d1(self.psi(v))

    # -- derivative ratios --
    def d1_over_phi(self, u: ArrayLike) -> np.ndarray:
        """phi'/phi, the slope of log phi."""
        u = np.asarray(u, dtype=float)
        return _checked_ratio(self.phi_d1(u), self.phi(u), "phi'/phi", self, u)

    def d2_over_d1(self, u: ArrayLike) -> np.ndarray:
        """phi''/phi'."""
        u = np.asarray(u, dtype=float)
        return _checked_ratio(self.phi_d2(u), self.phi_d1(u), "phi''/phi'", self, u)

    def curvature_gap(self, u: ArrayLike) -> np.ndarray:
        """phi''/phi' - phi'/phi, the slope of log(phi'/phi)."""
        return self.d2_over_d1(u) - self.d1_over_phi(u)

    def _finite_difference(self, u: np.ndarray, k: int) -> np.ndarray:
        # rounding error of the k-th difference scales as eps / h^k
        h = max(app_settings.FD_STEP, np.finfo(float).eps ** (1.0 / (k + 2)))
        base = self.phi_dk(u, self.analytic_order) if self.analytic_order > 0 else None
        order = k - self.analytic_order if base is not None else k

        def f(x):
            return self.phi_dk(x, self.analytic_order) if base is not None else self.phi(x)

        weights = [(-1) ** i * math.comb(order, i) for i in range(order + 1)]
        central = u - 0.5 * order * h >= 0
        offsets_c = [(0.5 * order - i) * h for i in range(order + 1)]
        offsets_f = [(order - i) * h for i in range(order + 1)]
        acc_c = sum(w * f(u + off) for w, off in zip(weights, offsets_c))
        acc_f = sum(w * f(u + off) for w, off in zip(weights, offsets_f))
        return np.where(central, acc_c, acc_f) / h**order

    # -- frailty --
    def sample_frailty(self, rng: np.random.Generator, size: int) -> np.ndarray:
        raise NotImplementedError(f"{self.label} has no frailty sampler")

    # -- identity --
    @property
    def label(self) -> str:
        if not self.params:
            return self.name
        inner = ", ".join(f"{k}={v:g}" for k, v in sorted(self.params.items()))
        return f"{self.name}({inner})"

    @property
    def cache_key(self) -> Tuple:
        return (self.name, tuple(sorted(self.params.items())))

    def describe(self) -> Dict:
        return {"name": self.name, "params": dict(self.params)}

    @property
    def is_independence(self) -> bool:
        return False

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.label}>"


class _ExpComposedGenerator(GeneratorSpec):
    """Generators of the form phi = exp(g(u)).

    With P_0 = 1 and P_m = sum_j C(m-1, j) g^(j+1) P_(m-1-j), phi^(k) = phi * P_k.
    """

    analytic_order = 64

    @abstractmethod
    def g(self, u: np.ndarray, j: int) -> np.ndarray:
        """j-th derivative of the exponent."""

    def phi(self, u: ArrayLike) -> np.ndarray:
        return np.exp(self.g(np.asarray(u, dtype=float), 0))

    def log_phi(self, u: ArrayLike) -> np.ndarray:
        return self.g(np.asarray(u, dtype=float), 0)

    def _poly(self, u: np.ndarray, k: int) -> np.ndarray:
        gs = [None] + [self.g(u, j) for j in range(1, k + 1)]
        ps: List[np.ndarray] = [np.ones_like(u)]
        for m in range(1, k + 1):
            ps.append(sum(math.comb(m - 1, j) * gs[j + 1] * ps[m - 1 - j] for j in range(m)))
        return ps[k]

    def _analytic_dk(self, u: np.ndarray, k: int) -> np.ndarray:
        with np.errstate(over="ignore", invalid="ignore"):
            return self.phi(u) * self._poly(u, k)

    def log_abs_phi_dk(self, u: ArrayLike, k: int) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if k == 0:
            return self.log_phi(u)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            return self.log_phi(u) + np.log(np.abs(self._poly(u, k)))

    # ratios come from g alone, so they survive phi underflowing to 0
    def d1_over_phi(self, u):
        return self.g(np.asarray(u, dtype=float), 1)

    def d2_over_d1(self, u):
        u = np.asarray(u, dtype=float)
        g1 = self.g(u, 1)
        return g1 + self.g(u, 2) / g1

    def curvature_gap(self, u):
        u = np.asarray(u, dtype=float)
        return self.g(u, 2) / self.g(u, 1)


class IndependenceGenerator(_ExpComposedGenerator):
    name = "independence"
    has_frailty = True

    def g(self, u, j):
        if j == 0:
            return -u
        return np.full_like(u, -1.0) if j == 1 else np.zeros_like(u)

    def psi(self, v):
        with np.errstate(divide="ignore"):
            return -np.log(np.asarray(v, dtype=float))

    def psi_neglog(self, z):
        return np.asarray(z, dtype=float) + 0.0

    def sample_frailty(self, rng, size):
        return np.ones(size)

    @property
    def is_independence(self) -> bool:
        return True


class ClaytonGenerator(GeneratorSpec):
    """phi(u) = (1+u)^(-1/theta); gamma frailty with shape 1/theta."""

    name = "clayton"
    analytic_order = 64
    has_frailty = True

    def __init__(self, theta: float):
        if not theta > 0:
            raise ParamOutOfDomainError(f"clayton requires theta > 0, got {theta}")
        super().__init__({"theta": float(theta)})
        self.theta = float(theta)

    def phi(self, u):
        return np.power(1.0 + np.asarray(u, dtype=float), -1.0 / self.theta)

    def log_phi(self, u):
        return -np.log1p(np.asarray(u, dtype=float)) / self.theta

    def psi(self, v):
        with np.errstate(divide="ignore"):
            return np.expm1(-self.theta * np.log(np.asarray(v, dtype=float)))

    def psi_neglog(self, z):
        return np.expm1(self.theta * np.asarray(z, dtype=float))

    def _analytic_dk(self, u, k):
        a = 1.0 / self.theta
        return (-1) ** k * special.poch(a, k) * np.power(1.0 + u, -a - k)

    def log_abs_phi_dk(self, u, k):
        a = 1.0 / self.theta
        return math.log(special.poch(a, k)) - (a + k) * np.log1p(np.asarray(u, dtype=float))

    def d1_over_phi(self, u):
        return -(1.0 / self.theta) / (1.0 + np.asarray(u, dtype=float))

    def d2_over_d1(self, u):
        return -(1.0 / self.theta + 1.0) / (1.0 + np.asarray(u, dtype=float))

    def curvature_gap(self, u):
        return -1.0 / (1.0 + np.asarray(u, dtype=float))

    def sample_frailty(self, rng, size):
        return rng.gamma(shape=1.0 / self.theta, scale=1.0, size=size)


class GumbelGenerator(_ExpComposedGenerator):
    """phi(u) = exp(-u^(1/theta)); positive-stable frailty."""

    name = "gumbel"
    has_frailty = True

    def __init__(self, theta: float):
        if not theta >= 1:
            raise ParamOutOfDomainError(f"gumbel requires theta >= 1, got {theta}")
        super().__init__({"theta": float(theta)})
        self.theta = float(theta)
        self._a = 1.0 / self.theta

    def g(self, u, j):
        with np.errstate(divide="ignore", invalid="ignore"):
            return -_falling(self._a, j) * np.power(u, self._a - j)

    def psi(self, v):
        with np.errstate(divide="ignore"):
            return np.power(-np.log(np.asarray(v, dtype=float)), self.theta)

    def psi_neglog(self, z):
        return np.power(np.asarray(z, dtype=float), self.theta)

    def sample_frailty(self, rng, size):
        # Kanter's representation of the positive stable law with Laplace transform exp(-s^a)
        a = self._a
        if a == 1.0:
            return np.ones(size)
        theta = rng.uniform(0.0, np.pi, size=size)
        e = rng.exponential(size=size)
        left = np.sin(a * theta) / np.power(np.sin(theta), 1.0 / a)
        right = np.power(np.sin((1.0 - a) * theta) / e, (1.0 - a) / a)
        return left * right


class DoubleExponentialGenerator(_ExpComposedGenerator):
    """phi(u) = exp((1 - e^u)/theta), theta in (0, 1]."""

    name = "ex61"

    def __init__(self, theta: float):
        if not 0 < theta <= 1:
            raise ParamOutOfDomainError(f"ex61 requires theta in (0, 1], got {theta}")
        super().__init__({"theta": float(theta)})
        self.theta = float(theta)

    def g(self, u, j):
        if j == 0:
            return -np.expm1(u) / self.theta
        return -np.exp(u) / self.theta

    def psi(self, v):
        with np.errstate(divide="ignore"):
            return np.log1p(-self.theta * np.log(np.asarray(v, dtype=float)))

    def psi_neglog(self, z):
        return np.log1p(self.theta * np.asarray(z, dtype=float))


class ComplementPowerGenerator(GeneratorSpec):
    """phi(u) = 1 - (1 - e^(-u))^(1/theta), theta >= 1.

    Derivatives are sums of terms c * s^(a-p) * (1-s)^q with s = 1 - e^(-u) and
    a = 1/theta; differentiating maps (p, q) to (p+1, q+1) with weight (a-p) and
    to (p, q) with weight -q.
    """

    name = "ex62"
    analytic_order = 64

    def __init__(self, theta: float):
        if not theta >= 1:
            raise ParamOutOfDomainError(f"ex62 requires theta >= 1, got {theta}")
        super().__init__({"theta": float(theta)})
        self.theta = float(theta)
        self._a = 1.0 / self.theta
        self._terms: List[Dict[Tuple[int, int], float]] = [{(1, 1): -self._a}]

    def phi(self, u):
        u = np.asarray(u, dtype=float)
        with np.errstate(divide="ignore"):
            return -np.expm1(self._a * np.log(-np.expm1(-u)))

    def psi(self, v):
        v = np.asarray(v, dtype=float)
        with np.errstate(divide="ignore"):
            return -np.log1p(-np.power(1.0 - v, self.theta))

    def psi_neglog(self, z):
        return -np.log1p(-np.power(-np.expm1(-np.asarray(z, dtype=float)), self.theta))

    def _term_table(self, k: int) -> Dict[Tuple[int, int], float]:
        while len(self._terms) < k:
            nxt: Dict[Tuple[int, int], float] = {}
            for (p, q), c in self._terms[-1].items():
                nxt[(p + 1, q + 1)] = nxt.get((p + 1, q + 1), 0.0) + c * (self._a - p)
                if q:
                    nxt[(p, q)] = nxt.get((p, q), 0.0) - c * q
            self._terms.append(nxt)
        return self._terms[k - 1]

    def _analytic_dk(self, u, k):
        log_s = np.log(-np.expm1(-u))
        out = np.zeros_like(u)
        with np.errstate(over="ignore", invalid="ignore"):
            for (p, q), c in self._term_table(k).items():
                out = out + c * np.exp((self._a - p) * log_s - q * u)
        return out

    def d2_over_d1(self, u):
        u = np.asarray(u, dtype=float)
        with np.errstate(divide="ignore", over="ignore"):
            return (self._a - 1.0) / np.expm1(u) - 1.0


class ShiftedPowerGenerator(_ExpComposedGenerator):
    """phi(u) = exp(1 - (1+u)^(1/theta)), theta > 0."""

    name = "ex63"

    def __init__(self, theta: float):
        if not theta > 0:
            raise ParamOutOfDomainError(f"ex63 requires theta > 0, got {theta}")
        super().__init__({"theta": float(theta)})
        self.theta = float(theta)
        self._b = 1.0 / self.theta

    def g(self, u, j):
        if j == 0:
            return -np.expm1(self._b * np.log1p(u))
        return -_falling(self._b, j) * np.power(1.0 + u, self._b - j)

    def psi(self, v):
        with np.errstate(divide="ignore"):
            return np.expm1(self.theta * np.log1p(-np.log(np.asarray(v, dtype=float))))

    def psi_neglog(self, z):
        return np.expm1(self.theta * np.log1p(np.asarray(z, dtype=float)))


class CustomGenerator(GeneratorSpec):
    """A user-supplied generator.

    Args:
        name: Label used in reports.
        phi: Vectorised generator.
        psi: Optional inverse; bisection on [0, PSI_BRACKET_HI] when omitted.
        derivatives: Optional analytic derivatives keyed by order, contiguous from 1.
    """

    def __init__(self, name: str, phi: Callable, psi: Optional[Callable] = None,
                 derivatives: Optional[Mapping[int, Callable]] = None, params: Optional[Mapping[str, float]] = None):
        super().__init__(params)
        self.name = name
        self._phi = phi
        self._psi = psi
        self._derivatives = dict(derivatives or {})
        order = 0
        while order + 1 in self._derivatives:
            order += 1
        self.analytic_order = order
        if self.numeric_derivatives:
            logger.debug(f"{self.label}: derivatives above order {order} use finite differences")

    def phi(self, u):
        return np.asarray(self._phi(np.asarray(u, dtype=float)), dtype=float)

    def psi(self, v):
        v = np.asarray(v, dtype=float)
        if self._psi is not None:
            return np.asarray(self._psi(v), dtype=float)
        return bisect_decreasing(self.phi, v, 0.0, app_settings.PSI_BRACKET_HI)

    def _analytic_dk(self, u, k):
        return np.asarray(self._derivatives[k](u), dtype=float)


# --- Registry ---
_BUILTINS: Dict[str, type] = {
    "independence": IndependenceGenerator,
    "clayton": ClaytonGenerator,
    "gumbel": GumbelGenerator,
    "ex61": DoubleExponentialGenerator,
    "ex62": ComplementPowerGenerator,
    "ex63": ShiftedPowerGenerator,
}


def builtin_names() -> List[str]:
    return list(_BUILTINS)


def make_generator(name: str, params: Union[None, Sequence[float], Mapping[str, float]] = None) -> GeneratorSpec:
    """Instantiate a builtin generator from a name and positional or named parameters."""
    key = name.strip().lower()
    if key not in _BUILTINS:
        raise UnknownGeneratorError(f"unknown generator '{name}'; builtins: {', '.join(_BUILTINS)}")
    cls = _BUILTINS[key]
    if cls is IndependenceGenerator:
        if params:
            raise ParamOutOfDomainError("independence takes no parameters")
        return cls()
    if params is None or len(params) == 0:
        raise ParamOutOfDomainError(f"{key} requires a theta parameter")
    if isinstance(params, Mapping):
        unknown = set(params) - {"theta"}
        if unknown:
            raise ParamOutOfDomainError(f"{key} got unexpected parameters {sorted(unknown)}")
        theta = params["theta"]
    else:
        if len(params) != 1:
            raise ParamOutOfDomainError(f"{key} takes exactly one parameter, got {len(params)}")
        theta = params[0]
    return cls(float(theta))


# --- Diagnostics ---
def _checked_ratio(num: np.ndarray, den: np.ndarray, what: str, gen: GeneratorSpec, u: np.ndarray) -> np.ndarray:
    bad = (den == 0) | np.isnan(den)
    if np.any(bad):
        at = np.asarray(u, dtype=float).ravel()[np.argmax(np.ravel(bad))] if np.ndim(u) else float(u)
        raise DegenerateDenominatorError(f"{gen.label}: denominator of {what} vanishes at u={at:.6g}")
    return num / den


def h_functional(gen: GeneratorSpec, u: ArrayLike) -> np.ndarray:
    """H(u) = u phi'(u) / (1 - phi(u)), evaluated as R(u) / (1/phi(u) - 1)."""
    u = np.asarray(u, dtype=float)
    with np.errstate(over="ignore"):
        odds = np.expm1(-gen.log_phi(u))
    return _checked_ratio(r_functional(gen, u), odds, "H", gen, u)


def r_functional(gen: GeneratorSpec, u: ArrayLike) -> np.ndarray:
    """R(u) = u phi'(u) / phi(u)."""
    u = np.asarray(u, dtype=float)
    return u * gen.d1_over_phi(u)


def g_functional(gen: GeneratorSpec, u: ArrayLike) -> np.ndarray:
    """G(u) = u phi''(u) / phi'(u)."""
    u = np.asarray(u, dtype=float)
    return u * gen.d2_over_d1(u)


def generator_diagnostics(gen: GeneratorSpec, grid: Union[None, float, Sequence[float]] = None) -> GeneratorDiagnostics:
    """H, R and G at a single point u or over a grid (the configured generator grid by default)."""
    u = generator_grid() if grid is None else as_grid(np.atleast_1d(np.asarray(grid, dtype=float)), 1)
    return GeneratorDiagnostics(
        generator=gen.label,
        params=gen.params,
        grid=u.tolist(),
        H=h_functional(gen, u).tolist(),
        R=r_functional(gen, u).tolist(),
        G=g_functional(gen, u).tolist(),
    )


# condition -> (monotone direction, required sign); sign +1 positive, -1 negative, 0 none
_CONDITION_SHAPES: Dict[ConditionId, Tuple[bool, int]] = {
    ConditionId.R_RATIO_POS_INC: (True, 1),
    ConditionId.R_RATIO_INC: (True, 0),
    ConditionId.H_RATIO_NEG_DEC: (False, -1),
    ConditionId.H_RATIO_DEC: (False, 0),
    ConditionId.R_DEC: (False, 0),
    ConditionId.GR_DIFF_POS_INC: (True, 1),
}


def condition_functional(gen: GeneratorSpec, condition: Union[str, ConditionId], u: ArrayLike,
                         n: Optional[int] = None) -> np.ndarray:
    """Evaluate the functional a condition constrains.

    uR'/R reduces to 1 + G - R = 1 + u (phi''/phi' - phi'/phi) and uH'/H to 1 + G + H.
    """
    condition = ConditionId(condition)
    u = np.asarray(u, dtype=float)
    if condition in (ConditionId.R_RATIO_POS_INC, ConditionId.R_RATIO_INC):
        return 1.0 + u * gen.curvature_gap(u)
    if condition in (ConditionId.H_RATIO_NEG_DEC, ConditionId.H_RATIO_DEC):
        return 1.0 + g_functional(gen, u) + h_functional(gen, u)
    if condition == ConditionId.R_DEC:
        return r_functional(gen, u)
    if n is None or n < 1:
        raise ParamOutOfDomainError(f"{condition.value} needs a dimension n >= 1, got {n}")
    return (g_functional(gen, n * u) - g_functional(gen, u)) / r_functional(gen, u)


def check_condition(gen: GeneratorSpec, condition: Union[str, ConditionId], grid: Optional[Sequence[float]] = None,
                    n: Optional[int] = None, rel_tol: Optional[float] = None) -> ConditionVerdict:
    """Check a generator condition on a log-spaced grid (non-strict monotonicity)."""
    condition = ConditionId(condition)
    rel_tol = app_settings.MONOTONE_TOL if rel_tol is None else rel_tol
    u = generator_grid() if grid is None else as_grid(grid, 50)
    values = condition_functional(gen, condition, u, n)
    if not np.all(np.isfinite(values)):
        at = u[np.argmax(~np.isfinite(values))]
        raise DegenerateDenominatorError(f"{gen.label}: {condition.value} is not finite at u={at:.6g}")

    increasing, sign = _CONDITION_SHAPES[condition]
    mono = monotone_scan(values, increasing=increasing, rel_tol=rel_tol)
    slacks = [(mono.tolerance - mono.violation, u[mono.index] if mono.index >= 0 else None)]
    if sign != 0:
        sign_tol = rel_tol * np.maximum(1.0, np.abs(values))
        sign_scan = worst(-sign * values, sign_tol)
        slacks.append((sign_scan.tolerance - sign_scan.violation, u[sign_scan.index]))
        if sign_scan.violation == 0.0:
            # sign clause satisfied everywhere; report its tightest point
            idx = int(np.argmin(sign * values))
            slacks[-1] = (float(sign * values[idx]), u[idx])
    margin, at = min(slacks, key=lambda item: item[0])
    holds = all(s >= 0 for s, _ in slacks)
    logger.debug(f"{gen.label} {condition.value}: holds={holds} margin={margin:.3g}")
    return ConditionVerdict(
        condition=condition,
        generator=gen.label,
        holds=holds,
        worst_u=None if at is None else float(at),
        worst_margin=float(margin),
        n=n if condition == ConditionId.GR_DIFF_POS_INC else None,
        grid_lo=float(u[0]),
        grid_hi=float(u[-1]),
        grid_points=int(u.size),
    )


# --- Validity ---
_VALIDITY_CACHE_SIZE = 256


def validate_generator(gen: GeneratorSpec, dim: int, grid: Optional[Sequence[float]] = None,
                       rel_tol: Optional[float] = None) -> ValidityReport:
    """Check that phi generates a dim-dimensional Archimedean copula on the grid.

    (-1)^k phi^(k) >= 0 for k = 0..dim-2, and (-1)^(dim-2) phi^(dim-2) is
    nonincreasing and convex (checked through grid slopes). Builtins on the
    default grid are memoised in a bounded LRU cache.
    """
    if dim < 2:
        raise ParamOutOfDomainError(f"copula dimension must be >= 2, got {dim}")
    rel_tol = app_settings.MONOTONE_TOL if rel_tol is None else rel_tol
    if grid is None and type(gen) is _BUILTINS.get(gen.name):
        name, params = gen.cache_key
        return _cached_validity(name, params, dim, rel_tol)
    return _validity(gen, dim, grid, rel_tol)


@functools.lru_cache(maxsize=_VALIDITY_CACHE_SIZE)
def _cached_validity(name: str, params: Tuple, dim: int, rel_tol: float) -> ValidityReport:
    return _validity(make_generator(name, dict(params)), dim, None, rel_tol)


def _validity(gen: GeneratorSpec, dim: int, grid: Optional[Sequence[float]], rel_tol: float) -> ValidityReport:
    top = dim - 2
    if top > gen.analytic_order and top > _FD_MAX_ORDER:
        raise DerivativeUnavailableError(f"{gen.label}: dimension {dim} needs derivatives up to order {top}")
    u = generator_grid() if grid is None else as_grid(grid, 50)

    def report(valid: bool, clause: Optional[str] = None, idx: Optional[int] = None, value: Optional[float] = None):
        return ValidityReport(
            generator=gen.label,
            dim=dim,
            valid=valid,
            failed_clause=clause,
            witness_u=None if idx is None else float(u[idx]),
            witness_value=value,
            numeric_derivatives=top > gen.analytic_order,
        )

    result = None
    phi0 = float(gen.phi(np.array([0.0]))[0])
    if abs(phi0 - 1.0) > rel_tol:
        result = report(False, "phi(0) == 1", None, phi0)

    for k in range(top + 1):
        if result is not None:
            break
        vals = (-1) ** k * gen.phi_dk(u, k)
        scan = worst(-vals, rel_tol * np.maximum(1.0, np.abs(vals)))
        if scan.violation > scan.tolerance:
            result = report(False, f"(-1)^{k} phi^({k}) >= 0", scan.index, float(vals[scan.index]))

    if result is None:
        h = (-1) ** top * gen.phi_dk(u, top)
        mono = monotone_scan(h, increasing=False, rel_tol=rel_tol)
        if mono.violation > mono.tolerance:
            result = report(False, f"(-1)^{top} phi^({top}) nonincreasing", mono.index, float(h[mono.index]))
    if result is None:
        slopes = np.diff(h) / np.diff(u)
        conv = monotone_scan(slopes, increasing=True, rel_tol=rel_tol)
        if conv.violation > conv.tolerance:
            result = report(False, f"(-1)^{top} phi^({top}) convex", conv.index + 1, float(h[conv.index + 1]))
    if result is None:
        result = report(True)

    if not result.valid:
        logger.debug(f"{gen.label} is not {dim}-monotone: {result.failed_clause} at u={result.witness_u}")
    return result


# --- Sampling ---
def sample_copula_uniforms(gen: GeneratorSpec, dim: int, rng: np.random.Generator, size: Optional[int] = None,
                           method: str = "auto") -> np.ndarray:
    """Draw from the Archimedean copula C(u) = phi(sum psi(u_j)).

    ``method`` is ``frailty`` (Marshall-Olkin, needs a frailty sampler),
    ``conditional`` (sequential inversion of C(u_k | u_1..u_{k-1})) or ``auto``.
    """
    validity = validate_generator(gen, dim)
    if not validity.valid:
        raise GeneratorValidationError(
            f"{gen.label} is not a valid {dim}-dimensional generator: "
            f"{validity.failed_clause} at u={validity.witness_u}"
        )
    rows = 1 if size is None else int(size)
    if method not in ("auto", "frailty", "conditional"):
        raise ParamOutOfDomainError(f"unknown copula sampling method '{method}'")
    if method == "frailty" and not gen.has_frailty:
        raise ParamOutOfDomainError(f"{gen.label} has no frailty sampler")

    if gen.has_frailty and method != "conditional":
        frailty = gen.sample_frailty(rng, rows)
        e = rng.exponential(size=(rows, dim))
        out = gen.phi(e / frailty[:, None])
    else:
        out = _conditional_uniforms(gen, dim, rng, rows)
    return out[0] if size is None else out


def _conditional_uniforms(gen: GeneratorSpec, dim: int, rng: np.random.Generator, rows: int) -> np.ndarray:
    v = 1.0 - rng.random((rows, dim))
    out = np.empty((rows, dim))
    out[:, 0] = v[:, 0]
    s = gen.psi(v[:, 0])
    for k in range(2, dim + 1):
        base = gen.log_abs_phi_dk(s, k - 1)
        s_now = s

        def ratio(y, s_now=s_now, base=base, k=k):
            return np.exp(gen.log_abs_phi_dk(s_now + y, k - 1) - base)

        # heavy-tailed derivatives decay on the scale of s, far past a fixed bracket
        hi = grow_bracket(ratio, v[:, k - 1], app_settings.PSI_BRACKET_HI)
        y = bisect_decreasing(ratio, v[:, k - 1], 0.0, hi)
        out[:, k - 1] = gen.phi(y)
        s = s + y
    return out


def w_survival(gen: GeneratorSpec, count: float, t: ArrayLike) -> np.ndarray:
    """P(W > t) = phi(count * psi(e^-t)), the survival of the min of ``count`` linked unit exponentials."""
    return gen.phi(count * gen.psi_neglog(np.maximum(np.asarray(t, dtype=float), 0.0)))


def w_quantile(gen: GeneratorSpec, count: float, p: ArrayLike) -> np.ndarray:
    """Inverse of the W distribution: -ln phi(psi(1-p)/count)."""
    p = np.asarray(p, dtype=float)
    return -gen.log_phi(gen.psi_neglog(-np.log1p(-p)) / count) + 0.0


def sample_w(gen: GeneratorSpec, count: float, rng: np.random.Generator, size: Optional[int] = None,
             route: str = "inversion") -> np.ndarray:
    """Sample W with survival phi(count * psi(e^-t)).

    ``inversion`` uses the closed-form quantile and works for any generator and
    any positive ``count``; ``copula_min`` takes the minimum of -ln U_j over
    copula uniforms (U_j read as survival probabilities) and needs an integer
    ``count`` with a valid ``count``-dimensional copula.
    """
    if not count > 0:
        raise ParamOutOfDomainError(f"count must be positive, got {count}")
    rows = 1 if size is None else int(size)
    if route == "inversion":
        v = 1.0 - rng.random(rows)
        w = -gen.log_phi(gen.psi(v) / count) + 0.0
    elif route == "copula_min":
        if count < 1 or float(count) != int(count):
            raise ParamOutOfDomainError(f"copula_min needs an integer count >= 1, got {count}")
        if count == 1:
            u = 1.0 - rng.random((rows, 1))
        else:
            u = sample_copula_uniforms(gen, int(count), rng, size=rows)
        w = np.min(-np.log(u), axis=1)
    else:
        raise ParamOutOfDomainError(f"unknown W sampling route '{route}'")
    return w[0] if size is None else w


def kendall_tau(gen: GeneratorSpec) -> float:
    """Kendall's tau of the bivariate copula: 1 + 4 * int_0^1 psi(t) phi'(psi(t)) dt."""

    def integrand(t):
        s = gen.psi(np.array([t]))
        return float(s[0] * gen.phi_d1(s)[0])

    value, _ = integrate.quad(integrand, 0.0, 1.0, limit=200)
    return 1.0 + 4.0 * value
