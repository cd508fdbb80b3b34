# osim/core/scenarios.py
"""
Theorem catalog
===============

Each scenario names a comparison of ordered random vectors (or of single
coordinates), the machine-checkable hypotheses under which the comparison is
claimed, and a default configuration whose hypotheses pass.

Sides of a comparison are ``(model, view)`` pairs: ``view`` lists 1-based
coordinates of the model, with a leading 0 standing for a coordinate that is
identically zero.
"""
import logging
import math
from functools import cached_property
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError

from osim.core.copulagen import GeneratorSpec, check_condition, make_generator, validate_generator
from osim.core.distributions import DistributionSpec, check_aging_class, make_distribution, make_phr
from osim.core.exceptions import ConfigParseError, OsimError, ParamOutOfDomainError, UnknownScenarioError
from osim.core.grids import generator_grid
from osim.core.orderings import SampleMatrix, check_majorization, check_order_uni
from osim.core.ordered_models import (
    DgosModel,
    DgosParams,
    DsosModel,
    OrderedModel,
    dgos_from_preset,
    dgos_marginal,
    dgos_params,
    dgos_params_from_gamma,
    extend_dgos,
)
from osim.models.config_models import DistributionRef, ExperimentConfig, parse_experiment
from osim.models.report_models import HypothesisKind, HypothesisResult, ScenarioInfo, ScenarioMethod
from osim.models.verdict_models import AgingClass, ConditionId, MajorizationKind, OrderRelation, VerdictStatus

logger = logging.getLogger(__name__)

MC = ScenarioMethod.MONTE_CARLO
GRID = ScenarioMethod.ANALYTIC_GRID


class Side(NamedTuple):
    model: OrderedModel
    view: Tuple[int, ...]


class Comparison(NamedTuple):
    label: str
    x: Side
    y: Side


class Hypothesis(NamedTuple):
    name: str
    kind: HypothesisKind
    check: Callable[["ScenarioInstance"], Tuple[bool, Dict[str, Any]]]
    advisory: bool = False


# --- Config resolution ---
def distribution_from_ref(ref: DistributionRef) -> DistributionSpec:
    if ref.phr is not None:
        return make_phr(distribution_from_ref(ref.phr.baseline), ref.phr.alpha)
    return make_distribution(ref.name, ref.params)


def _deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    out = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = value
    return out


class ScenarioInstance:
    """A scenario bound to a resolved configuration; builds generators, laws, models and samples lazily."""

    def __init__(self, scenario: "TheoremScenario", config: ExperimentConfig):
        self.scenario = scenario
        self.config = config
        self.gr_n_used: Optional[int] = None
        self._samples: Dict[str, SampleMatrix] = {}
        self._models: Dict[str, OrderedModel] = {}

    # --- parameters ---
    @property
    def seed(self) -> int:
        return self.config.seed

    @cached_property
    def gen(self) -> GeneratorSpec:
        ref = self.config.generator
        return make_generator(ref.name, ref.params)

    @cached_property
    def n(self) -> int:
        model = self.config.model
        if model.preset:
            return self.dgos_n().n
        if model.gamma is not None:
            return len(model.gamma)
        if model.n is None:
            raise ParamOutOfDomainError("model.n is required")
        return model.n

    def f_list(self, count: int, which: str = "distributions") -> List[DistributionSpec]:
        refs = getattr(self.config, which)
        if not refs:
            raise ParamOutOfDomainError(f"scenario {self.scenario.id} needs '{which}'")
        dists = [distribution_from_ref(r) for r in refs]
        if len(dists) == 1:
            return dists * count
        if len(dists) < count:
            raise ParamOutOfDomainError(f"'{which}' needs {count} entries (or a single shared one), got {len(dists)}")
        return dists[:count]

    @cached_property
    def baseline(self) -> DistributionSpec:
        return self.f_list(1)[0]

    @cached_property
    def baseline_g(self) -> DistributionSpec:
        return self.f_list(1, "distributions_g")[0]

    @cached_property
    def params(self) -> DgosParams:
        model = self.config.model
        if model.preset:
            return self.dgos_n().params
        if model.gamma is not None:
            return dgos_params_from_gamma(model.gamma)
        m = model.m if model.m is not None else [0.0] * (self.n - 1)
        try:
            return dgos_params(self.n, model.k, m)
        except ValidationError as e:
            raise ParamOutOfDomainError(f"model: {e.errors()[0]['msg']}") from e

    @cached_property
    def m_next(self) -> float:
        if self.config.model.m_next is not None:
            return float(self.config.model.m_next)
        return float(min(self.params.m)) if self.params.m else 0.0

    @cached_property
    def params_next(self) -> DgosParams:
        return extend_dgos(self.params, self.m_next)

    def index(self, key: str, default):
        indices = self.config.indices
        value = getattr(indices, key) if indices is not None else None
        return default if value is None else value

    def gr_n(self, cross_dimension: bool) -> int:
        setting = self.config.gr_n
        if isinstance(setting, int):
            n = setting
        elif cross_dimension:
            n = self.n + 1 if setting == "larger" else self.n
        else:
            n = self.n
        self.gr_n_used = n
        return n

    @cached_property
    def generator_grid(self) -> np.ndarray:
        return generator_grid(points=self.config.grids.generator_points)

    # --- models ---
    def _register(self, tag: str, build: Callable[[], OrderedModel]) -> OrderedModel:
        if tag not in self._models:
            self._models[tag] = build()
            logger.debug(f"{self.scenario.id}: built {self._models[tag]!r}")
        return self._models[tag]

    def dsos(self, size: int, tag: str, which: str = "distributions") -> DsosModel:
        return self._register(tag, lambda: DsosModel(self.f_list(size, which), self.gen, tag=tag))

    def dgos(self, tag: str, params: Optional[DgosParams] = None, which: str = "distributions") -> DgosModel:
        def build() -> DgosModel:
            baseline = self.f_list(1, which)[0]
            model = self.config.model
            if params is None and model.preset:
                return dgos_from_preset(model.preset, baseline, self.gen, model.preset_params, tag=tag)
            return DgosModel(baseline, params or self.params, self.gen, tag=tag)

        return self._register(tag, build)

    def dgos_n(self, which: str = "distributions", tag: str = "X_n") -> DgosModel:
        return self.dgos(tag, None, which)

    def dgos_n1(self) -> DgosModel:
        return self.dgos("X_n1", self.params_next)

    def dgos_gamma(self, key: str, which: str = "distributions", tag: Optional[str] = None) -> DgosModel:
        gamma = getattr(self.config.model, key)
        if gamma is None:
            raise ParamOutOfDomainError(f"scenario {self.scenario.id} needs model.{key}")
        return self.dgos(tag or f"{which}_{key}", dgos_params_from_gamma(gamma), which)

    @property
    def models(self) -> List[OrderedModel]:
        return list(self._models.values())

    @property
    def max_dim(self) -> int:
        dims = [int(math.ceil(float(np.max(m.counts)))) for m in self._models.values()]
        return max([2] + dims)

    # --- samples and marginals ---
    def sample(self, model: OrderedModel) -> SampleMatrix:
        if model.tag not in self._samples:
            self._samples[model.tag] = SampleMatrix.from_model(
                model, self.config.N, self.seed, keys=(self.scenario.id, model.tag)
            )
        return self._samples[model.tag]

    def marginal(self, model: OrderedModel, i: int) -> DistributionSpec:
        if not isinstance(model, DgosModel):
            raise ParamOutOfDomainError(f"{model.tag}: closed-form marginals exist for DGOS models only")
        return dgos_marginal(model, i)


# --- Scenario definition ---
class TheoremScenario:
    def __init__(self, id: str, title: str, statement: str, relation: OrderRelation, method: ScenarioMethod,
                 defaults: Dict[str, Any], hypotheses: Sequence[Hypothesis],
                 comparisons: Callable[[ScenarioInstance], List[Comparison]]):
        self.id = id
        self.title = title
        self.statement = statement
        self.relation = relation
        self.method = method
        self.defaults = defaults
        self.hypotheses = list(hypotheses)
        self.comparisons = comparisons

    def info(self) -> ScenarioInfo:
        return ScenarioInfo(
            id=self.id,
            title=self.title,
            statement=self.statement,
            relation=self.relation,
            method=self.method,
            hypotheses=[h.name for h in self.hypotheses],
            defaults=self.defaults,
        )

    def resolve(self, config: Optional[ExperimentConfig] = None, seed: int = 0) -> ExperimentConfig:
        """Scenario defaults overlaid with the explicitly set fields of ``config``."""
        explicit = config.model_dump(mode="json", exclude_unset=True) if config is not None else {"seed": seed}
        merged = _deep_merge({**self.defaults, "scenario": self.id}, explicit)
        merged["scenario"] = self.id
        return parse_experiment(merged)

    def instance(self, config: Optional[ExperimentConfig] = None, seed: int = 0) -> ScenarioInstance:
        return ScenarioInstance(self, self.resolve(config, seed))


def run_hypothesis(hypothesis: Hypothesis, inst: ScenarioInstance) -> HypothesisResult:
    try:
        holds, detail = hypothesis.check(inst)
    except OsimError as e:
        logger.warning(f"{inst.scenario.id}: hypothesis '{hypothesis.name}' could not be checked: {e}")
        return HypothesisResult(name=hypothesis.name, kind=hypothesis.kind, holds=False, error=str(e),
                                advisory=hypothesis.advisory)
    if not holds:
        logger.warning(f"{inst.scenario.id}: hypothesis '{hypothesis.name}' fails"
                       + (" (advisory)" if hypothesis.advisory else ""))
    return HypothesisResult(name=hypothesis.name, kind=hypothesis.kind, holds=bool(holds), detail=detail,
                            advisory=hypothesis.advisory)


# --- Hypothesis builders ---
def condition(cond: ConditionId, cross_dimension: bool = False) -> Hypothesis:
    def check(inst: ScenarioInstance):
        n = inst.gr_n(cross_dimension) if cond == ConditionId.GR_DIFF_POS_INC else None
        verdict = check_condition(inst.gen, cond, grid=inst.generator_grid, n=n)
        return verdict.holds, verdict.model_dump(mode="json")

    return Hypothesis(cond.value, HypothesisKind.GENERATOR_CONDITION, check)


def validity() -> Hypothesis:
    """d-monotonicity in the largest model dimension.

    Advisory: kernels and samplers only evaluate phi(c psi(.)), which needs no d-monotonicity.
    """

    def check(inst: ScenarioInstance):
        report = validate_generator(inst.gen, inst.max_dim)
        return report.valid, report.model_dump(mode="json")

    return Hypothesis("generator valid in the largest model dimension", HypothesisKind.GENERATOR_VALIDITY, check,
                      advisory=True)


def orders(name: str, pairs: Callable[[ScenarioInstance], List[Tuple[OrderRelation, DistributionSpec,
                                                                     DistributionSpec]]]) -> Hypothesis:
    """Every listed univariate relation holds analytically."""

    def check(inst: ScenarioInstance):
        links = []
        for relation, x, y in pairs(inst):
            verdict = check_order_uni(x, y, relation)
            links.append({"relation": relation.value, "x": x.label, "y": y.label, "status": verdict.status.value,
                          "max_violation": verdict.max_violation, "tolerance": verdict.tolerance})
        return all(link["status"] == VerdictStatus.HOLDS.value for link in links), {"links": links}

    return Hypothesis(name, HypothesisKind.ORDER, check)


def chain(relations: Callable[[int], OrderRelation], dists: Callable[[ScenarioInstance], List[DistributionSpec]],
          start: int = 0):
    """Consecutive links dists[j] <= dists[j+1] from index ``start`` on; link j uses ``relations(j)``."""

    def pairs(inst: ScenarioInstance):
        d = dists(inst)
        return [(relations(j), d[j], d[j + 1]) for j in range(start, len(d) - 1)]

    return pairs


def aging(cls: AgingClass, which: str = "distributions") -> Hypothesis:
    def check(inst: ScenarioInstance):
        dist = inst.f_list(1, which)[0]
        verdict = check_aging_class(dist, cls)
        return verdict.holds, {"distribution": dist.label, "max_violation": verdict.max_violation,
                               "tolerance": verdict.tolerance}

    return Hypothesis(f"F is {cls.value}", HypothesisKind.AGING, check)


def parameter(name: str, test: Callable[[ScenarioInstance], Tuple[bool, Dict[str, Any]]]) -> Hypothesis:
    return Hypothesis(name, HypothesisKind.PARAMETER, test)


def _m_plus_one(inst: ScenarioInstance):
    params = inst.params_next
    return params.m_plus_one_nonneg, {"m": list(params.m)}


def _m_n_smallest(inst: ScenarioInstance):
    m = list(inst.params.m)
    return (not m) or inst.m_next <= min(m), {"m": m, "m_n": inst.m_next}


def _identical(which: str):
    def test(inst: ScenarioInstance):
        refs = getattr(inst.config, which) or []
        labels = [distribution_from_ref(r).label for r in refs]
        return len(set(labels)) <= 1, {which: labels}

    return test


M_PLUS_ONE = parameter("m_i + 1 >= 0", _m_plus_one)
M_N_SMALLEST = parameter("m_n <= min(m_1, ..., m_{n-1})", _m_n_smallest)
DFR = aging(AgingClass.DFR)


def majorization(kind: MajorizationKind) -> Hypothesis:
    """(gamma_1..gamma_i) precedes (gamma'_1..gamma'_i)."""

    def check(inst: ScenarioInstance):
        i = inst.index("i", inst.n)
        gamma = list(inst.config.model.gamma or [])[:i]
        gamma_prime = list(inst.config.model.gamma_prime or [])[:i]
        result = check_majorization(gamma_prime, gamma, kind)
        return result.holds, result.model_dump(mode="json")

    symbol = {"w_super": "w", "p_larger": "p", "rm": "rm"}[kind.value]
    return Hypothesis(f"(gamma_1..gamma_i) <={symbol} (gamma'_1..gamma'_i)", HypothesisKind.MAJORIZATION, check)


def _independence(inst: ScenarioInstance):
    return inst.gen.is_independence, {"generator": inst.gen.label}


INDEPENDENCE = parameter("independence generator (classical GOS)", _independence)


# --- Default configurations ---
def _exp(rate: float) -> Dict[str, Any]:
    return {"name": "exponential", "params": [rate]}


def _gen(name: str, *params: float) -> Dict[str, Any]:
    return {"name": name, "params": list(params)}


WEIBULL_DFR = {"name": "weibull", "params": [0.5]}
DGOS_MODEL = {"type": "dgos", "n": 3, "k": 1.0, "m": [0.0, 0.0], "m_next": -0.5}


def _dsos_defaults(gen: Dict, rates: Sequence[float]) -> Dict[str, Any]:
    return {"generator": gen, "model": {"type": "dsos", "n": 3}, "distributions": [_exp(r) for r in rates]}


def _two_sample_defaults(gen: Dict) -> Dict[str, Any]:
    return {"generator": gen, "model": {"type": "dsos", "n": 3}, "distributions": [_exp(2.0)],
            "distributions_g": [_exp(1.0)]}


def _dgos_defaults(gen: Dict, baseline: Dict) -> Dict[str, Any]:
    return {"generator": gen, "model": dict(DGOS_MODEL), "distributions": [baseline]}


# Gumbel steps over an exponential baseline are exponential: coordinates are sums of independent exponentials
RH_DGOS = {**_dgos_defaults(_gen("gumbel", 2.0), _exp(1.0)), "model": {**DGOS_MODEL, "m_next": 0.0}}


def _range(lo: int, hi: int) -> Tuple[int, ...]:
    return tuple(range(lo, hi + 1))


# --- DSOS comparisons ---
def _dsos_n_vs_n1_first(inst: ScenarioInstance) -> List[Comparison]:
    n = inst.n
    big, small = inst.dsos(n + 1, "X_n1"), inst.dsos(n, "X_n")
    return [Comparison("first n of n+1 vs n", Side(big, _range(1, n)), Side(small, _range(1, n)))]


def _dsos_shift(inst: ScenarioInstance) -> List[Comparison]:
    n = inst.n
    model = inst.dsos(n, "X_n")
    return [Comparison("1..n-1 vs 2..n", Side(model, _range(1, n - 1)), Side(model, _range(2, n)))]


def _dsos_n_vs_n1_last(inst: ScenarioInstance) -> List[Comparison]:
    n = inst.n
    small, big = inst.dsos(n, "X_n"), inst.dsos(n + 1, "X_n1")
    return [Comparison("n vs last n of n+1", Side(small, _range(1, n)), Side(big, _range(2, n + 1)))]


def _dsos_two_sample(inst: ScenarioInstance) -> List[Comparison]:
    n = inst.n
    x, z = inst.dsos(n, "X_n"), inst.dsos(n, "Z_n", "distributions_g")
    return [Comparison("F-model vs G-model", Side(x, _range(1, n)), Side(z, _range(1, n)))]


def _f(count_offset: int = 0):
    return lambda inst: inst.f_list(inst.n + count_offset)


def _fg_pairs(first: OrderRelation, rest: OrderRelation):
    def pairs(inst: ScenarioInstance):
        f, g = inst.f_list(inst.n), inst.f_list(inst.n, "distributions_g")
        return [(first if j == 0 else rest, f[j], g[j]) for j in range(inst.n)]

    return pairs


def _fg_first(relation: OrderRelation):
    def pairs(inst: ScenarioInstance):
        return [(relation, inst.f_list(1)[0], inst.f_list(1, "distributions_g")[0])]

    return pairs


HR = OrderRelation.HR
ST = OrderRelation.ST


# --- DGOS comparisons ---
def _p_q(inst: ScenarioInstance) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    return tuple(inst.index("p", [1, 2])), tuple(inst.index("q", [2, 3]))


def _index_condition(inst: ScenarioInstance):
    p, q = _p_q(inst)
    gaps = [b - a for a, b in zip(p, q)]
    ok = (
        len(p) == len(q) >= 1
        and all(b > a for a, b in zip(p, p[1:]))
        and all(b > a for a, b in zip(q, q[1:]))
        and p[0] >= 1
        and gaps[0] >= 0
        and all(b >= a for a, b in zip(gaps, gaps[1:]))
    )
    return ok, {"p": list(p), "q": list(q)}


def _disp_views(kind: str):
    def comparisons(inst: ScenarioInstance) -> List[Comparison]:
        n = inst.n
        if kind == "a":
            model = inst.dgos_n()
            return [Comparison("(0, X_1..X_{n-1}) vs (X_1..X_n)", Side(model, (0,) + _range(1, n - 1)),
                               Side(model, _range(1, n)))]
        if kind == "b":
            return [Comparison("first n of n+1 vs n", Side(inst.dgos_n1(), _range(1, n)),
                               Side(inst.dgos_n(), _range(1, n)))]
        return [Comparison("(0, X_1..X_n) vs n+1", Side(inst.dgos_n(), (0,) + _range(1, n)),
                           Side(inst.dgos_n1(), _range(1, n + 1)))]

    return comparisons


def _marginal_views(kind: str):
    def comparisons(inst: ScenarioInstance) -> List[Comparison]:
        p, q = _p_q(inst)
        if kind == "a":
            x, y = inst.dgos_n(), inst.dgos_n()
        elif kind == "b":
            x, y = inst.dgos_n1(), inst.dgos_n()
        else:
            x, y = inst.dgos_n(), inst.dgos_n1()
        return [Comparison(f"{list(p)} vs {list(q)}", Side(x, p), Side(y, q))]

    return comparisons


def _univariate(kind: str):
    """(a) X(i,n) vs X(i+1,n); (b) X(i,n+1) vs X(i,n); (c) X(i,n) vs X(i+1,n+1)."""

    def comparisons(inst: ScenarioInstance) -> List[Comparison]:
        n = inst.n
        top = n - 1 if kind == "a" else n
        chosen = inst.index("i", None)
        indices = [chosen] if chosen is not None else list(range(1, top + 1))
        out = []
        for i in indices:
            if not 1 <= i <= top:
                raise ParamOutOfDomainError(f"index i must be in 1..{top}, got {i}")
            if kind == "a":
                out.append(Comparison(f"X({i},n) vs X({i + 1},n)", Side(inst.dgos_n(), (i,)),
                                      Side(inst.dgos_n(), (i + 1,))))
            elif kind == "b":
                out.append(Comparison(f"X({i},n+1) vs X({i},n)", Side(inst.dgos_n1(), (i,)),
                                      Side(inst.dgos_n(), (i,))))
            else:
                out.append(Comparison(f"X({i},n) vs X({i + 1},n+1)", Side(inst.dgos_n(), (i,)),
                                      Side(inst.dgos_n1(), (i + 1,))))
        return out

    return comparisons


def _first_icx(inst_pair: Callable[[ScenarioInstance], Tuple[DgosModel, DgosModel]]):
    def pairs(inst: ScenarioInstance):
        x, y = inst_pair(inst)
        return [(OrderRelation.ICX, inst.marginal(x, 1), inst.marginal(y, 1))]

    return pairs


def _fg_models(inst: ScenarioInstance) -> Tuple[DgosModel, DgosModel]:
    return inst.dgos_n("distributions", "X_n"), inst.dgos_n("distributions_g", "Y_n")


def _icx_all_i(inst: ScenarioInstance) -> List[Comparison]:
    x, y = _fg_models(inst)
    chosen = inst.index("i", None)
    indices = [chosen] if chosen is not None else list(range(2, inst.n + 1))
    return [Comparison(f"X({i},n) vs Y({i},n)", Side(x, (i,)), Side(y, (i,))) for i in indices]


def _gamma_pair_models(inst: ScenarioInstance) -> Tuple[DgosModel, DgosModel]:
    return inst.dgos_gamma("gamma", tag="X_gamma"), inst.dgos_gamma("gamma", "distributions_g", tag="Y_gamma")


def _gamma_prime_comparison(inst: ScenarioInstance) -> List[Comparison]:
    x = inst.dgos_gamma("gamma_prime", tag="X_gamma_prime")
    y = inst.dgos_gamma("gamma_prime", "distributions_g", tag="Y_gamma_prime")
    return [Comparison("X(1,n') vs Y(1,n')", Side(x, (1,)), Side(y, (1,)))]


def _gamma_first(inst: ScenarioInstance):
    gamma, gamma_prime = inst.config.model.gamma or [], inst.config.model.gamma_prime or []
    ok = bool(gamma) and bool(gamma_prime) and gamma_prime[0] <= gamma[0]
    return ok, {"gamma_1": gamma[0] if gamma else None, "gamma_prime_1": gamma_prime[0] if gamma_prime else None}


def _gos_comparison(inst: ScenarioInstance) -> List[Comparison]:
    i = inst.index("i", inst.n)
    x = inst.dgos_gamma("gamma", tag="X_gamma")
    y = inst.dgos_gamma("gamma_prime", tag="X_gamma_prime")
    if not 1 <= i <= min(x.n, y.n):
        raise ParamOutOfDomainError(f"index i must be in 1..{min(x.n, y.n)}, got {i}")
    return [Comparison(f"X({i}; gamma) vs X({i}; gamma')", Side(x, (i,)), Side(y, (i,)))]


# --- Catalog ---
R_POS_INC = ConditionId.R_RATIO_POS_INC
R_INC = ConditionId.R_RATIO_INC
R_DEC = ConditionId.R_DEC
GR = ConditionId.GR_DIFF_POS_INC


def _catalog() -> List[TheoremScenario]:
    s: List[TheoremScenario] = []
    add = s.append

    # DSOS, one sample
    add(TheoremScenario(
        "T4.1a", "DSOS: adding a component", "(X*_{1:n+1}..X*_{n:n+1}) <=st (X*_{1:n}..X*_{n:n})",
        OrderRelation.ST_MULTI, MC, _dsos_defaults(_gen("clayton", 1.0), [1, 1, 1, 1]),
        [validity()], _dsos_n_vs_n1_first))
    add(TheoremScenario(
        "T4.1b", "DSOS: adding a component", "(X*_{1:n+1}..X*_{n:n+1}) <=dyn-hr (X*_{1:n}..X*_{n:n})",
        OrderRelation.DYN_HR, GRID, _dsos_defaults(_gen("gumbel", 2.0), [1, 1, 1, 1]),
        [condition(R_POS_INC), validity()], _dsos_n_vs_n1_first))
    add(TheoremScenario(
        "T4.2a", "DSOS: consecutive coordinates", "(X*_{1:n}..X*_{n-1:n}) <=st (X*_{2:n}..X*_{n:n})",
        OrderRelation.ST_MULTI, MC, _dsos_defaults(_gen("clayton", 1.0), [3, 2, 1]),
        [orders("F_2 <=hr ... <=hr F_n", chain(lambda j: HR, _f(), start=1)), validity()], _dsos_shift))
    add(TheoremScenario(
        "T4.2b", "DSOS: consecutive coordinates", "(X*_{1:n}..X*_{n-1:n}) <=dyn-hr (X*_{2:n}..X*_{n:n})",
        OrderRelation.DYN_HR, GRID, _dsos_defaults(_gen("ex61", 0.5), [3, 2, 1]),
        [condition(R_POS_INC), orders("F_1 <=hr ... <=hr F_n", chain(lambda j: HR, _f())), validity()],
        _dsos_shift))
    add(TheoremScenario(
        "T4.3a", "DSOS: n versus the last n of n+1", "(X*_{1:n}..X*_{n:n}) <=st (X*_{2:n+1}..X*_{n+1:n+1})",
        OrderRelation.ST_MULTI, MC, _dsos_defaults(_gen("clayton", 1.0), [4, 3, 2, 1]),
        [orders("F_1 <=st F_2 <=hr ... <=hr F_{n+1}", chain(lambda j: ST if j == 0 else HR, _f(1))), validity()],
        _dsos_n_vs_n1_last))
    add(TheoremScenario(
        "T4.3b", "DSOS: n versus the last n of n+1", "(X*_{1:n}..X*_{n:n}) <=dyn-hr (X*_{2:n+1}..X*_{n+1:n+1})",
        OrderRelation.DYN_HR, GRID, _dsos_defaults(_gen("gumbel", 2.0), [4, 3, 2, 1]),
        [condition(R_INC), orders("F_1 <=hr ... <=hr F_{n+1}", chain(lambda j: HR, _f(1))), validity()],
        _dsos_n_vs_n1_last))

    # DSOS, two samples
    add(TheoremScenario(
        "T4.4a", "DSOS: two samples", "(X*_{1:n}..X*_{n:n}) <=st (Z*_{1:n}..Z*_{n:n})",
        OrderRelation.ST_MULTI, MC, _two_sample_defaults(_gen("ex61", 0.5)),
        [condition(R_INC), orders("F_1 <=st G_1, F_i <=hr G_i", _fg_pairs(ST, HR)), validity()],
        _dsos_two_sample))
    add(TheoremScenario(
        "T4.4b", "DSOS: two samples", "(X*_{1:n}..X*_{n:n}) <=dyn-hr (Z*_{1:n}..Z*_{n:n})",
        OrderRelation.DYN_HR, GRID, _two_sample_defaults(_gen("gumbel", 2.0)),
        [condition(R_INC), orders("F_i <=hr G_i", _fg_pairs(HR, HR)), validity()], _dsos_two_sample))
    add(TheoremScenario(
        "T4.4c", "DSOS: two samples, identical steps", "(X*_{1:n}..X*_{n:n}) <=disp (Z*_{1:n}..Z*_{n:n})",
        OrderRelation.DISP_MULTI, GRID, _two_sample_defaults(_gen("clayton", 1.0)),
        [parameter("F_1 = ... = F_n", _identical("distributions")),
         parameter("G_1 = ... = G_n", _identical("distributions_g")),
         orders("F <=disp G", _fg_first(OrderRelation.DISP)), validity()],
        _dsos_two_sample))

    # DGOS, multivariate dispersive
    dfr_dgos = _dgos_defaults(_gen("gumbel", 2.0), WEIBULL_DFR)
    add(TheoremScenario(
        "T5.1a", "DGOS: zero-prepended vector", "(0, X(1,n)..X(n-1,n)) <=disp (X(1,n)..X(n,n))",
        OrderRelation.DISP_MULTI, GRID, dfr_dgos,
        [DFR, condition(R_DEC), M_PLUS_ONE, M_N_SMALLEST, validity()], _disp_views("a")))
    add(TheoremScenario(
        "T5.1b", "DGOS: adding a component", "(X(1,n+1)..X(n,n+1)) <=disp (X(1,n)..X(n,n))",
        OrderRelation.DISP_MULTI, GRID, dfr_dgos,
        [DFR, condition(R_DEC), M_PLUS_ONE, validity()], _disp_views("b")))
    add(TheoremScenario(
        "T5.1c", "DGOS: zero-prepended vector versus n+1", "(0, X(1,n)..X(n,n)) <=disp (X(1,n+1)..X(n+1,n+1))",
        OrderRelation.DISP_MULTI, GRID, dfr_dgos,
        [DFR, M_PLUS_ONE, M_N_SMALLEST, validity()], _disp_views("c")))

    marginal_defaults = {**dfr_dgos, "indices": {"p": [1, 2], "q": [2, 3]}}
    index_ok = parameter("q_i - p_i >= ... >= q_1 - p_1 >= 0", _index_condition)
    add(TheoremScenario(
        "T5.2a", "DGOS: multivariate marginals", "(X(p_1,n)..X(p_i,n)) <=disp (X(q_1,n)..X(q_i,n))",
        OrderRelation.DISP_MULTI, GRID, marginal_defaults,
        [DFR, condition(GR), condition(R_DEC), M_PLUS_ONE, M_N_SMALLEST, index_ok, validity()],
        _marginal_views("a")))
    add(TheoremScenario(
        "T5.2b", "DGOS: multivariate marginals, n+1 versus n",
        "(X(p_1,n+1)..X(p_i,n+1)) <=disp (X(q_1,n)..X(q_i,n))",
        OrderRelation.DISP_MULTI, GRID, marginal_defaults,
        [DFR, condition(GR, True), condition(R_DEC), M_PLUS_ONE, M_N_SMALLEST, index_ok, validity()],
        _marginal_views("b")))
    add(TheoremScenario(
        "T5.2c", "DGOS: multivariate marginals, n versus n+1",
        "(X(p_1,n)..X(p_i,n)) <=disp (X(q_1,n+1)..X(q_i,n+1))",
        OrderRelation.DISP_MULTI, GRID, marginal_defaults,
        [DFR, condition(GR, True), M_PLUS_ONE, M_N_SMALLEST, index_ok, validity()],
        _marginal_views("c")))

    # DGOS, univariate one-sample families
    families = [
        ("T5.3", OrderRelation.ST, MC, _dgos_defaults(_gen("clayton", 1.0), _exp(1.0)),
         ([], [], [M_N_SMALLEST])),
        ("T5.4", OrderRelation.HR, MC, _dgos_defaults(_gen("gumbel", 2.0), _exp(1.0)),
         ([condition(R_INC)], [condition(R_POS_INC)], [condition(R_INC), M_N_SMALLEST])),
        ("T5.5", OrderRelation.RH, GRID, RH_DGOS,
         ([condition(ConditionId.H_RATIO_DEC)], [condition(ConditionId.H_RATIO_NEG_DEC)],
          [condition(ConditionId.H_RATIO_DEC), M_N_SMALLEST])),
        ("T5.6", OrderRelation.LR, GRID, _dgos_defaults(_gen("gumbel", 2.0), _exp(1.0)),
         ([condition(GR)], [condition(GR, True)], [condition(GR, True), M_N_SMALLEST])),
        ("T5.7", OrderRelation.DISP, GRID, _dgos_defaults(_gen("gumbel", 2.0), WEIBULL_DFR),
         ([condition(GR), DFR], [condition(GR, True), DFR, condition(R_DEC)],
          [condition(GR, True), DFR, M_N_SMALLEST])),
    ]
    statements = {
        "a": "X(i,n) <={r} X(i+1,n), i = 1..n-1",
        "b": "X(i,n+1) <={r} X(i,n), i = 1..n",
        "c": "X(i,n) <={r} X(i+1,n+1), i = 1..n",
    }
    for prefix, relation, method, defaults, extra in families:
        for part, hyps in zip("abc", extra):
            add(TheoremScenario(
                f"{prefix}{part}", f"DGOS: univariate {relation.value} comparisons",
                statements[part].format(r=relation.value), relation, method, defaults,
                list(hyps) + [M_PLUS_ONE, validity()], _univariate(part)))

    # DGOS, two samples
    add(TheoremScenario(
        "L5.1", "DGOS: first coordinates under a smaller gamma_1", "X(1,n') <=icx Y(1,n')",
        OrderRelation.ICX, MC,
        {"generator": _gen("gumbel", 2.0), "model": {"type": "dgos", "gamma": [3.0, 2.0, 1.0],
                                                     "gamma_prime": [2.0, 2.0, 1.0]},
         "distributions": [_exp(2.0)], "distributions_g": [_exp(1.0)]},
        [condition(GR), parameter("gamma'_1 <= gamma_1", _gamma_first),
         orders("X(1,n) <=icx Y(1,n)", _first_icx(_gamma_pair_models)), validity()],
        _gamma_prime_comparison))
    add(TheoremScenario(
        "T5.8", "DGOS: two baselines, same gamma", "X(i,n) <=icx Y(i,n), i = 2..n",
        OrderRelation.ICX, MC,
        {**_dgos_defaults(_gen("gumbel", 2.0), _exp(2.0)), "distributions_g": [_exp(1.0)]},
        [condition(GR), M_PLUS_ONE, orders("X(1,n) <=icx Y(1,n)", _first_icx(_fg_models)), validity()],
        _icx_all_i))

    # GOS, two gamma vectors
    gos_defaults = {"generator": {"name": "independence", "params": []},
                    "model": {"type": "dgos", "gamma": [3.0, 2.0, 1.0], "gamma_prime": [2.5, 2.0, 1.0]},
                    "distributions": [WEIBULL_DFR], "indices": {"i": 3}}
    gos = [
        ("T5.9a", OrderRelation.HR, MC, [majorization(MajorizationKind.P_LARGER)]),
        ("T5.9b", OrderRelation.LR, GRID, [majorization(MajorizationKind.W_SUPER)]),
        ("T5.9c", OrderRelation.DISP, GRID, [DFR, majorization(MajorizationKind.P_LARGER)]),
        ("T5.9d", OrderRelation.MRL, MC, [DFR, majorization(MajorizationKind.RM)]),
        ("T5.9e", OrderRelation.ICX, MC, [DFR, majorization(MajorizationKind.RM)]),
    ]
    for sid, relation, method, hyps in gos:
        add(TheoremScenario(
            sid, "GOS: majorized gamma vectors", f"X(i; gamma) <={relation.value} X(i; gamma')",
            relation, method, gos_defaults, [INDEPENDENCE] + hyps + [validity()], _gos_comparison))
    return s


CATALOG: Dict[str, TheoremScenario] = {scenario.id: scenario for scenario in _catalog()}


def list_scenarios() -> List[ScenarioInfo]:
    return [scenario.info() for scenario in CATALOG.values()]


def get_scenario(scenario_id: str) -> TheoremScenario:
    key = scenario_id.strip()
    for sid, scenario in CATALOG.items():
        if sid.lower() == key.lower():
            return scenario
    raise UnknownScenarioError(f"unknown scenario '{scenario_id}'")


def model_from_config(config: ExperimentConfig, tag: str = "sample") -> OrderedModel:
    """Standalone model described by the generator, distributions and model blocks of a config."""
    missing = [f for f in ("generator", "distributions", "model") if getattr(config, f) is None]
    if missing:
        raise ConfigParseError(f"config needs '{missing[0]}' to build a model", field=missing[0])
    ref = config.model
    gen = make_generator(config.generator.name, config.generator.params)
    dists = [distribution_from_ref(r) for r in config.distributions]
    if ref.type == "dsos":
        n = ref.n or len(dists)
        if len(dists) == 1:
            dists = dists * n
        if len(dists) < n:
            raise ParamOutOfDomainError(f"a DSOS model of size {n} needs {n} distributions, got {len(dists)}")
        return DsosModel(dists[:n], gen, tag=tag)
    if ref.preset:
        return dgos_from_preset(ref.preset, dists[0], gen, ref.preset_params, tag=tag)
    if ref.gamma is not None:
        params = dgos_params_from_gamma(ref.gamma)
    else:
        if ref.n is None:
            raise ConfigParseError("a DGOS model needs model.n, model.gamma or model.preset", field="model.n")
        try:
            params = dgos_params(ref.n, ref.k, ref.m if ref.m is not None else [0.0] * (ref.n - 1))
        except ValidationError as e:
            raise ParamOutOfDomainError(f"model: {e.errors()[0]['msg']}") from e
    return DgosModel(dists[0], params, gen, tag=tag)
