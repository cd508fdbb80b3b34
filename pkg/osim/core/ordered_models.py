# osim/core/ordered_models.py
"""
Ordered random vectors
======================

DSOS and DGOS models with Archimedean dependence inside each step: the DGOS
parameter algebra and presets, exact samplers built on the W/B increment
representation, and the closed-form Markov kernels.

Step r (1-based) of a model has a distribution F_r and a count c_r, the number
of linked components competing at that step (n - r + 1 unless a preset says
otherwise). Given X_{r-1} = x, the next failure time has survival
phi(c_r * psi(S_r(t) / S_r(x))).
"""
import logging
import math
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from osim.core.copulagen import CustomGenerator, GeneratorSpec, validate_generator
from osim.core.distributions import (
    BIncrementDistribution,
    ConvolutionDistribution,
    DistributionSpec,
    HazardTransformedDistribution,
    PhrDistribution,
)
from osim.core.exceptions import (
    CumHazardOverflowError,
    DerivativeUnavailableError,
    InvalidGammaError,
    NotIncreasingError,
    ParamOutOfDomainError,
    PresetNeedsIndependenceError,
    SupportExhaustedError,
    UnknownPresetError,
)
from osim.core.streams import Key, sample_in_chunks
from osim.models.verdict_models import ValidityReport

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]
_TINY = 1e-300


def _default_counts(n: int) -> np.ndarray:
    return np.arange(n, 0, -1, dtype=float)


def _model_validity(gen: GeneratorSpec, counts: np.ndarray, tag: str) -> Optional[ValidityReport]:
    dim = max(2, int(math.ceil(float(np.max(counts)))))
    try:
        report = validate_generator(gen, dim)
    except DerivativeUnavailableError as e:
        logger.warning(f"{tag}: could not validate {gen.label} in dimension {dim}: {e}")
        return None
    if not report.valid:
        logger.warning(
            f"{tag}: {gen.label} is not {dim}-monotone ({report.failed_clause} at u={report.witness_u}); "
            f"sampling still works through the W representation"
        )
    return report


# --- DSOS ---
class DsosModel:
    """DSOS(F_1, ..., F_n; phi).

    Args:
        dists: Step distributions F_1..F_n with nondecreasing right endpoints.
        gen: Archimedean generator of the within-step dependence.
        counts: Effective counts per step; defaults to n, n-1, ..., 1.
        tag: Label used in logs and reports.
    """

    kind = "dsos"

    def __init__(self, dists: Sequence[DistributionSpec], gen: GeneratorSpec,
                 counts: Optional[Sequence[float]] = None, tag: str = "dsos", check_validity: bool = True):
        if len(dists) < 1:
            raise ParamOutOfDomainError("a DSOS model needs at least one step distribution")
        self.dists: List[DistributionSpec] = list(dists)
        self.n = len(self.dists)
        self.gen = gen
        self.tag = tag
        self.counts = _default_counts(self.n) if counts is None else np.asarray(counts, dtype=float)
        if self.counts.shape != (self.n,) or np.any(self.counts <= 0):
            raise ParamOutOfDomainError(f"counts must be {self.n} positive values, got {list(self.counts)}")
        endpoints = [d.right_endpoint for d in self.dists]
        for r in range(1, self.n):
            if endpoints[r] < endpoints[r - 1]:
                raise SupportExhaustedError(
                    f"right endpoint of F_{r + 1} ({endpoints[r]:g}) is below that of F_{r} ({endpoints[r - 1]:g})"
                )
        self.validity = _model_validity(gen, self.counts, tag) if check_validity else None

    def step(self, r: int) -> Tuple[DistributionSpec, float]:
        if not 1 <= r <= self.n:
            raise ParamOutOfDomainError(f"step index must be in 1..{self.n}, got {r}")
        return self.dists[r - 1], float(self.counts[r - 1])

    def as_dsos(self) -> "DsosModel":
        return self

    def describe(self) -> Dict:
        return {
            "type": self.kind,
            "n": self.n,
            "generator": self.gen.describe(),
            "distributions": [d.describe() for d in self.dists],
            "counts": self.counts.tolist(),
        }

    def __repr__(self) -> str:
        return f"<DsosModel {self.tag} n={self.n} gen={self.gen.label}>"


# --- DGOS parameter algebra ---
class DgosParams(BaseModel):
    """(n, k, m_1..m_{n-1}) with gamma_i = k + n - i + M_i, M_i = m_i + ... + m_{n-1}, gamma_n = k."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    n: int = Field(..., ge=1)
    k: float = Field(..., gt=0)
    m: Tuple[float, ...] = Field(default=(), description="m_1..m_{n-1}")

    @field_validator("m", mode="before")
    @classmethod
    def coerce_m(cls, value):
        return tuple(float(v) for v in value)

    @model_validator(mode="after")
    def check_gamma(self) -> "DgosParams":
        if len(self.m) != self.n - 1:
            raise ValueError(f"m must have n-1 = {self.n - 1} entries, got {len(self.m)}")
        for i, g in enumerate(self.gamma, start=1):
            if not g > 0:
                raise InvalidGammaError(i, g)
        return self

    @property
    def M(self) -> List[float]:
        return [float(sum(self.m[i:])) for i in range(self.n - 1)]

    @property
    def gamma(self) -> List[float]:
        M = self.M
        return [self.k + self.n - i + M[i - 1] for i in range(1, self.n)] + [self.k]

    @property
    def alpha(self) -> List[float]:
        return [g / (self.n - i + 1) for i, g in enumerate(self.gamma, start=1)]

    @property
    def m_plus_one_nonneg(self) -> bool:
        return all(mi + 1 >= 0 for mi in self.m)


def dgos_params(n: int, k: float, m: Sequence[float]) -> DgosParams:
    return DgosParams(n=n, k=k, m=tuple(m))


def dgos_params_from_gamma(gamma: Sequence[float]) -> DgosParams:
    """Inverse algebra: k = gamma_n and m_i = gamma_i - gamma_{i+1} - 1."""
    gamma = [float(g) for g in gamma]
    if not gamma:
        raise ParamOutOfDomainError("gamma must be non-empty")
    for i, g in enumerate(gamma, start=1):
        if not g > 0:
            raise InvalidGammaError(i, g)
    m = [gamma[i] - gamma[i + 1] - 1.0 for i in range(len(gamma) - 1)]
    return DgosParams(n=len(gamma), k=gamma[-1], m=tuple(m))


def extend_dgos(params: DgosParams, m_next: float) -> DgosParams:
    """m~_{n+1} = (m~_n, m_next)."""
    return DgosParams(n=params.n + 1, k=params.k, m=tuple(params.m) + (float(m_next),))


class DgosModel:
    """DGOS(F, gamma_1..gamma_n; phi): step r is PHR(F, alpha_r) with count c_r and gamma_r = c_r * alpha_r."""

    kind = "dgos"

    def __init__(self, baseline: DistributionSpec, params: DgosParams, gen: GeneratorSpec,
                 counts: Optional[Sequence[float]] = None, preset: Optional[str] = None, tag: str = "dgos"):
        self.baseline = baseline
        self.params = params
        self.gen = gen
        self.n = params.n
        self.preset = preset
        self.tag = tag
        self.counts = _default_counts(self.n) if counts is None else np.asarray(counts, dtype=float)
        if self.counts.shape != (self.n,) or np.any(self.counts <= 0):
            raise ParamOutOfDomainError(f"counts must be {self.n} positive values, got {list(self.counts)}")
        self.gamma = np.asarray(params.gamma, dtype=float)
        self.alpha = self.gamma / self.counts
        self.validity = _model_validity(gen, self.counts, tag)
        self._dsos: Optional[DsosModel] = None
        self._laws: Dict[Tuple[int, int], DistributionSpec] = {}

    def as_dsos(self) -> DsosModel:
        if self._dsos is None:
            dists = [PhrDistribution(self.baseline, a) for a in self.alpha]
            self._dsos = DsosModel(dists, self.gen, counts=self.counts, tag=self.tag, check_validity=False)
            self._dsos.validity = self.validity
        return self._dsos

    def step(self, r: int) -> Tuple[DistributionSpec, float]:
        return self.as_dsos().step(r)

    def increment(self, j: int) -> BIncrementDistribution:
        """Law of B_j = W_j / alpha_j."""
        if not 1 <= j <= self.n:
            raise ParamOutOfDomainError(f"step index must be in 1..{self.n}, got {j}")
        return BIncrementDistribution(self.gen, float(self.counts[j - 1]), float(self.alpha[j - 1]))

    def describe(self) -> Dict:
        return {
            "type": self.kind,
            "n": self.n,
            "k": self.params.k,
            "m": list(self.params.m),
            "gamma": self.gamma.tolist(),
            "alpha": self.alpha.tolist(),
            "counts": self.counts.tolist(),
            "preset": self.preset,
            "generator": self.gen.describe(),
            "baseline": self.baseline.describe(),
        }

    def __repr__(self) -> str:
        return f"<DgosModel {self.tag} gamma={self.gamma.tolist()} gen={self.gen.label}>"


OrderedModel = Union[DsosModel, DgosModel]


# --- Presets ---
def _vector(preset: str, values: Mapping, key: str, length: Optional[int] = None) -> np.ndarray:
    if key not in values:
        raise ParamOutOfDomainError(f"preset {preset} requires '{key}'")
    arr = np.asarray(values[key], dtype=float).ravel()
    if length is not None and arr.size != length:
        raise ParamOutOfDomainError(f"preset {preset}: '{key}' must have {length} entries, got {arr.size}")
    return arr


def _scalar(preset: str, values: Mapping, key: str) -> float:
    if key not in values:
        raise ParamOutOfDomainError(f"preset {preset} requires '{key}'")
    return float(values[key])


def _os(values: Mapping) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    n = int(_scalar("OS", values, "n"))
    return np.asarray(dgos_params(n, 1.0, [0.0] * (n - 1)).gamma), None


def _os_nonintegral(values: Mapping):
    n = int(_scalar("OS_nonintegral", values, "n"))
    a = _scalar("OS_nonintegral", values, "a")
    if not a > n - 1:
        raise ParamOutOfDomainError(f"OS_nonintegral requires a > n - 1 = {n - 1}, got {a}")
    gamma = a - np.arange(n, dtype=float)
    return gamma, gamma.copy()


def _sos_phr(values: Mapping):
    alpha = _vector("SOS_PHR", values, "alpha")
    if np.any(alpha <= 0):
        raise ParamOutOfDomainError("SOS_PHR requires positive alpha")
    return _default_counts(alpha.size) * alpha, None


def _gos(values: Mapping):
    return _vector("GOS", values, "gamma"), None


def _k_record(values: Mapping):
    n = int(_scalar("k_record", values, "n"))
    k = _scalar("k_record", values, "k")
    return np.full(n, k), np.full(n, k)


def _record(values: Mapping):
    n = int(_scalar("record", values, "n"))
    return np.ones(n), np.ones(n)


def _truncation(values: Mapping):
    k_r = _vector("truncation", values, "k")
    alpha = _vector("truncation", values, "alpha", k_r.size)
    if np.any(k_r <= 0) or np.any(alpha <= 0):
        raise ParamOutOfDomainError("truncation requires positive k and alpha")
    return k_r * alpha, k_r


def _progressive(values: Mapping):
    scheme = _vector("progressive_typeII", values, "R")
    if np.any(scheme < 0):
        raise ParamOutOfDomainError("progressive_typeII removals must be nonnegative")
    gamma = np.cumsum((scheme + 1.0)[::-1])[::-1]
    if "nu" in values and float(values["nu"]) != scheme.size + scheme.sum():
        raise ParamOutOfDomainError(
            f"progressive_typeII: nu = {values['nu']} does not match n + sum(R) = {scheme.size + scheme.sum():g}"
        )
    return gamma, gamma.copy()


_PRESETS = {
    "os": ("OS", _os, False),
    "os_nonintegral": ("OS_nonintegral", _os_nonintegral, False),
    "sos_phr": ("SOS_PHR", _sos_phr, False),
    "gos": ("GOS", _gos, True),
    "k_record": ("k_record", _k_record, False),
    "record": ("record", _record, True),
    "truncation": ("truncation", _truncation, False),
    "progressive_typeii": ("progressive_typeII", _progressive, False),
}


def preset_names() -> List[str]:
    return [name for name, _, _ in _PRESETS.values()]


def dgos_from_preset(preset: str, baseline: DistributionSpec, gen: GeneratorSpec,
                     preset_params: Optional[Mapping] = None, tag: Optional[str] = None) -> DgosModel:
    key = preset.strip().lower()
    if key not in _PRESETS:
        raise UnknownPresetError(f"unknown preset '{preset}'; available: {', '.join(preset_names())}")
    name, build, needs_independence = _PRESETS[key]
    if needs_independence and not gen.is_independence:
        raise PresetNeedsIndependenceError(f"preset {name} is defined for the independence generator only")
    gamma, counts = build(dict(preset_params or {}))
    params = dgos_params_from_gamma(gamma)
    logger.debug(f"Preset {name}: gamma={params.gamma} counts={None if counts is None else counts.tolist()}")
    return DgosModel(baseline, params, gen, counts=counts, preset=name, tag=tag or name)


# --- Sampling ---
def _inverse_step(dist: DistributionSpec, target: np.ndarray, strict: bool, r: int) -> np.ndarray:
    x = dist.cumhaz_inv(target)
    end = dist.right_endpoint
    bad = ~np.isfinite(x) | (x > end)
    if np.any(bad):
        if strict or not np.isfinite(end):
            raise CumHazardOverflowError(f"step {r}: cumulative hazard target beyond the range of {dist.label}")
        logger.warning(f"step {r}: {int(bad.sum())} draws clamped at the right endpoint {end:g} of {dist.label}")
        x = np.where(bad, end, x)
    return x


def sample_dsos(model: OrderedModel, rng: np.random.Generator, size: Optional[int] = None,
                strict: bool = False) -> np.ndarray:
    """x_r = D_r^-1(W_r + D_r(x_{r-1})) with independent W_r at count c_r."""
    dsos = model.as_dsos()
    rows = 1 if size is None else int(size)
    out = np.empty((rows, dsos.n))
    prev = np.zeros(rows)
    for r in range(1, dsos.n + 1):
        dist, count = dsos.step(r)
        v = 1.0 - rng.random(rows)
        w = -dsos.gen.log_phi(dsos.gen.psi(v) / count) + 0.0
        x = _inverse_step(dist, w + dist.cumhaz(prev), strict, r)
        # ties (and round-off below the previous failure) go to the earlier step
        prev = np.maximum(x, prev)
        out[:, r - 1] = prev
    return out[0] if size is None else out


def sample_dgos(model: DgosModel, rng: np.random.Generator, size: Optional[int] = None,
                strict: bool = False) -> np.ndarray:
    """x_i = D^-1(B_1 + ... + B_i) with B_j = W_j / alpha_j."""
    rows = 1 if size is None else int(size)
    b = np.empty((rows, model.n))
    for j in range(model.n):
        v = 1.0 - rng.random(rows)
        b[:, j] = -model.gen.log_phi(model.gen.psi(v) / model.counts[j]) / model.alpha[j] + 0.0
    x = _inverse_step(model.baseline, np.cumsum(b, axis=1), strict, model.n)
    x = np.maximum.accumulate(x, axis=1)
    return x[0] if size is None else x


def sample_model(model: OrderedModel, rng: np.random.Generator, size: Optional[int] = None,
                 strict: bool = False) -> np.ndarray:
    if isinstance(model, DgosModel):
        return sample_dgos(model, rng, size, strict)
    return sample_dsos(model, rng, size, strict)


def sample_many(model: OrderedModel, total: int, master_seed: int, keys: Sequence[Key] = (),
                chunk: Optional[int] = None, workers: Optional[int] = None, strict: bool = False) -> np.ndarray:
    """Deterministic chunked sampling of ``total`` rows."""
    return sample_in_chunks(lambda rng, size: sample_model(model, rng, size, strict), total, master_seed,
                            keys=keys, chunk=chunk, workers=workers).reshape(total, model.n)


def flag_endpoint_draws(model: OrderedModel, draws: np.ndarray) -> np.ndarray:
    """Rows with a coordinate clamped at a finite right endpoint."""
    draws = np.atleast_2d(draws)
    dsos = model.as_dsos()
    ends = np.array([d.right_endpoint for d in dsos.dists])
    finite = np.isfinite(ends)
    if not np.any(finite):
        return np.zeros(draws.shape[0], dtype=bool)
    return np.any((draws >= ends) & finite, axis=1)


# --- Markov kernels ---
def _check_alive(dist: DistributionSpec, x: ArrayLike, r: int) -> None:
    if np.any(dist.sf(x) <= 0):
        raise SupportExhaustedError(f"step {r}: survival of {dist.label} vanishes at the conditioning time")


def dsos_transition_survival(model: OrderedModel, r: int, x: ArrayLike, t: ArrayLike) -> np.ndarray:
    """P(X_r > t | X_{r-1} = x) = phi(c_r psi(S_r(t)/S_r(x))), t >= x; r = 1 with x = 0 gives the minimum."""
    dsos = model.as_dsos()
    dist, count = dsos.step(r)
    _check_alive(dist, x, r)
    z = np.maximum(dist.cumhaz(t) - dist.cumhaz(x), 0.0)
    return dsos.gen.phi(count * dsos.gen.psi_neglog(z))


def dsos_conditional_quantile(model: OrderedModel, r: int, x: ArrayLike, p: ArrayLike) -> np.ndarray:
    """Level-p quantile of X_r given X_{r-1} = x."""
    dsos = model.as_dsos()
    dist, count = dsos.step(r)
    _check_alive(dist, x, r)
    p = np.asarray(p, dtype=float)
    z = -dsos.gen.log_phi(dsos.gen.psi_neglog(-np.log1p(-p)) / count) + 0.0
    return np.maximum(dist.cumhaz_inv(dist.cumhaz(x) + z), x)


def dsos_conditional_hazard(model: OrderedModel, r: int, x: ArrayLike, t: ArrayLike) -> np.ndarray:
    """Hazard of X_r at t given X_{r-1} = x.

    With z = D_r(t) - D_r(x) and u = psi(e^-z):
    c e^-z phi'(c u) / (phi'(u) phi(c u)) * h_r(t), evaluated in logs.
    """
    dsos = model.as_dsos()
    dist, count = dsos.step(r)
    t = np.asarray(t, dtype=float)
    _check_alive(dist, t, r)
    gen = dsos.gen
    z = np.maximum(dist.cumhaz(t) - dist.cumhaz(x), 0.0)
    u = np.maximum(gen.psi_neglog(z), _TINY)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_rate = (
            math.log(count)
            - z
            + gen.log_abs_phi_dk(count * u, 1)
            - gen.log_abs_phi_dk(u, 1)
            - gen.log_phi(count * u)
            + np.log(dist.hazard(t))
        )
    return np.exp(log_rate)


def dsos_min_survival(model: OrderedModel, t: ArrayLike) -> np.ndarray:
    """phi(c_1 psi(S_1(t))): survival of the first failure."""
    dsos = model.as_dsos()
    dist, count = dsos.step(1)
    return dsos.gen.phi(count * dsos.gen.psi_neglog(dist.cumhaz(np.maximum(np.asarray(t, dtype=float), 0.0))))


def _check_increasing(x: np.ndarray, n: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise ParamOutOfDomainError(f"expected a point of length {n}, got shape {x.shape}")
    if not (x[0] > 0 and np.all(np.diff(x) > 0)):
        raise NotIncreasingError(f"joint density needs 0 < x_1 < ... < x_n, got {x.tolist()}")
    return x


def dsos_joint_density(model: OrderedModel, x: Sequence[float]) -> float:
    """Product of the transition densities along 0 = x_0 < x_1 < ... < x_n."""
    dsos = model.as_dsos()
    x = _check_increasing(np.asarray(x), dsos.n)
    prev = 0.0
    log_f = 0.0
    for r in range(1, dsos.n + 1):
        xr = x[r - 1 : r]
        surv = dsos_transition_survival(dsos, r, prev, xr)
        rate = dsos_conditional_hazard(dsos, r, prev, xr)
        with np.errstate(divide="ignore"):
            log_f += float(np.log(surv[0]) + np.log(rate[0]))
        prev = float(x[r - 1])
    return math.exp(log_f)


def dgos_joint_density(model: DgosModel, x: Sequence[float]) -> float:
    """Joint density of a DGOS vector.

    Factor j: phi'(c_j psi(s_j)) c_j alpha_j psi'(s_j) S^(alpha_j - 1)(x_j) f(x_j) / S^alpha_j(x_{j-1}),
    s_j = S^alpha_j(x_j) / S^alpha_j(x_{j-1}), x_0 = 0.
    """
    x = _check_increasing(np.asarray(x), model.n)
    F = model.baseline
    gen = model.gen
    D = F.cumhaz(np.concatenate(([0.0], x)))
    if not np.all(np.isfinite(D[:-1])):
        raise SupportExhaustedError(f"baseline survival vanishes inside {x.tolist()}")
    log_f = 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        for j in range(1, model.n + 1):
            c, a = float(model.counts[j - 1]), float(model.alpha[j - 1])
            u = max(float(gen.psi_neglog(np.array([a * (D[j] - D[j - 1])]))[0]), _TINY)
            u_arr = np.array([u])
            log_f += (
                float(gen.log_abs_phi_dk(c * u_arr, 1)[0])
                - float(gen.log_abs_phi_dk(u_arr, 1)[0])
                + math.log(c * a)
                - (a - 1.0) * D[j]
                + a * D[j - 1]
                + float(F.log_pdf(x[j - 1 : j])[0])
            )
    return math.exp(log_f)


# --- Univariate DGOS laws ---
def dgos_increment_sum(model: DgosModel, lo: int, hi: int) -> DistributionSpec:
    """Law of B_lo + ... + B_hi on the cumulative-hazard scale."""
    if not 1 <= lo <= hi <= model.n:
        raise ParamOutOfDomainError(f"increment range must satisfy 1 <= lo <= hi <= {model.n}, got ({lo}, {hi})")
    key = (lo, hi)
    if key not in model._laws:
        if lo == hi:
            model._laws[key] = model.increment(lo)
        else:
            model._laws[key] = ConvolutionDistribution([model.increment(j) for j in range(lo, hi + 1)])
    return model._laws[key]


def dgos_marginal(model: DgosModel, i: int) -> DistributionSpec:
    """Law of X(i, n, m~, k) = D^-1(B_1 + ... + B_i)."""
    return HazardTransformedDistribution(dgos_increment_sum(model, 1, i), model.baseline)


def is_analytic(model) -> bool:
    if isinstance(model, DgosModel):
        return not isinstance(model.gen, CustomGenerator) and model.baseline.numeric_tolerance == 0.0
    if isinstance(model, DsosModel):
        return not isinstance(model.gen, CustomGenerator) and all(d.numeric_tolerance == 0.0 for d in model.dists)
    return False
