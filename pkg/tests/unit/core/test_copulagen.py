# tests/unit/core/test_copulagen.py
import numpy as np
import pytest
from scipy import stats

from osim.core import copulagen
from osim.core.copulagen import (
    CustomGenerator,
    builtin_names,
    check_condition,
    condition_functional,
    g_functional,
    generator_diagnostics,
    kendall_tau,
    make_generator,
    r_functional,
    sample_copula_uniforms,
    sample_w,
    validate_generator,
    w_quantile,
    w_survival,
)
from osim.core.exceptions import GeneratorValidationError, ParamOutOfDomainError, UnknownGeneratorError
from osim.core.grids import generator_grid
from osim.core.orderings import dkw_bound
from osim.models.verdict_models import ConditionId

BUILTINS = [
    ("independence", []),
    ("clayton", [1.0]),
    ("gumbel", [2.0]),
    ("ex61", [0.5]),
    ("ex62", [2.0]),
    ("ex63", [0.5]),
]


# --- Construction ---
def test_builtin_names_cover_catalog_generators():
    names = builtin_names()
    for name, _ in BUILTINS:
        assert name in names
    print("\n[PASSED] test_builtin_names_cover_catalog_generators")


def test_make_generator_unknown_name():
    with pytest.raises(UnknownGeneratorError):
        make_generator("frank", [1.0])
    print("\n[PASSED] test_make_generator_unknown_name")


@pytest.mark.parametrize(
    "name, params",
    [("clayton", [0.0]), ("gumbel", [0.5]), ("ex61", [1.5]), ("independence", [1.0]), ("gumbel", [])],
)
def test_make_generator_rejects_bad_params(name, params):
    with pytest.raises(ParamOutOfDomainError):
        make_generator(name, params)
    print(f"\n[PASSED] test_make_generator_rejects_bad_params: {name} {params}")


def test_make_generator_accepts_named_theta():
    gen = make_generator("Gumbel", {"theta": 3.0})
    assert gen.params == {"theta": 3.0}
    assert gen.label == "gumbel(theta=3)"
    print("\n[PASSED] test_make_generator_accepts_named_theta")


@pytest.mark.parametrize("name, params", BUILTINS)
def test_phi_is_a_decreasing_map_onto_unit_interval(name, params):
    gen = make_generator(name, params)
    u = np.geomspace(1e-3, 5.0, 60)
    values = gen.phi(u)
    assert float(gen.phi(np.array([0.0]))[0]) == pytest.approx(1.0)
    assert np.all((values > 0) & (values <= 1))
    assert np.all(np.diff(values) <= 0)
    assert np.allclose(gen.psi(values), u, rtol=1e-7)
    print(f"\n[PASSED] test_phi_is_a_decreasing_map_onto_unit_interval: {name}")


@pytest.mark.parametrize("name, params", [("clayton", [1.5]), ("gumbel", [2.0]), ("ex61", [0.5])])
def test_analytic_first_derivative_matches_central_difference(name, params):
    gen = make_generator(name, params)
    u = np.array([0.1, 0.5, 1.0, 3.0])
    step = 1e-6
    numeric = (gen.phi(u + step) - gen.phi(u - step)) / (2 * step)
    assert np.allclose(gen.phi_d1(u), numeric, rtol=1e-5)
    print(f"\n[PASSED] test_analytic_first_derivative_matches_central_difference: {name}")


# --- Conditions ---
@pytest.mark.parametrize(
    "name, params, condition, n, expected",
    [
        ("gumbel", [2.0], ConditionId.R_RATIO_POS_INC, None, True),
        ("gumbel", [2.0], ConditionId.R_DEC, None, True),
        ("gumbel", [2.0], ConditionId.GR_DIFF_POS_INC, 3, True),
        ("clayton", [1.0], ConditionId.R_RATIO_INC, None, False),
        ("clayton", [2.0], ConditionId.R_RATIO_POS_INC, None, False),
        ("clayton", [1.0], ConditionId.R_DEC, None, True),
        ("independence", [], ConditionId.R_RATIO_POS_INC, None, True),
    ],
)
def test_check_condition(name, params, condition, n, expected):
    verdict = check_condition(make_generator(name, params), condition, n=n)
    assert verdict.holds is expected
    assert verdict.grid_points == generator_grid().size
    if expected:
        assert verdict.worst_margin >= 0
    else:
        assert verdict.worst_margin < 0
        assert verdict.worst_u is not None
    print(f"\n[PASSED] test_check_condition: {name} {condition.value} -> {expected}")


def test_gumbel_r_ratio_is_constant_one_over_theta():
    gen = make_generator("gumbel", [2.0])
    u = np.array([0.01, 0.1, 1.0, 10.0])
    values = condition_functional(gen, ConditionId.R_RATIO_INC, u)
    assert np.allclose(values, 0.5)
    print("\n[PASSED] test_gumbel_r_ratio_is_constant_one_over_theta")


def test_clayton_r_ratio_closed_form():
    gen = make_generator("clayton", [1.0])
    u = np.array([0.01, 0.1, 1.0, 10.0])
    values = condition_functional(gen, ConditionId.R_RATIO_INC, u)
    assert np.allclose(values, 1.0 / (1.0 + u))
    print("\n[PASSED] test_clayton_r_ratio_closed_form")


def test_gr_diff_requires_dimension():
    with pytest.raises(ParamOutOfDomainError):
        check_condition(make_generator("gumbel", [2.0]), ConditionId.GR_DIFF_POS_INC)
    print("\n[PASSED] test_gr_diff_requires_dimension")


# --- Closed-form identities on the full default grid ---
@pytest.mark.parametrize("theta", [0.5, 1.0])
def test_ex61_r_ratio_is_one_plus_u(theta):
    gen = make_generator("ex61", [theta])
    u = generator_grid()
    assert u.size == 200 and u[-1] == pytest.approx(20.0)
    values = condition_functional(gen, ConditionId.R_RATIO_POS_INC, u)
    assert np.all(np.abs(values - (1.0 + u)) <= 1e-9)
    verdict = check_condition(gen, ConditionId.R_RATIO_POS_INC)
    assert verdict.holds
    assert verdict.grid_hi == pytest.approx(20.0)
    print(f"\n[PASSED] test_ex61_r_ratio_is_one_plus_u: theta={theta}")


def test_ex61_functionals_survive_phi_underflow():
    gen = make_generator("ex61", [0.5])
    u = np.array([10.0, 20.0])
    assert np.all(gen.phi(u) == 0.0)
    diag = generator_diagnostics(gen, u)
    assert np.allclose(diag.R, -u * np.exp(u) / 0.5, rtol=1e-12)
    assert np.allclose(diag.G, u * (1.0 - np.exp(u) / 0.5), rtol=1e-12)
    assert np.all(np.isfinite(diag.H))
    print("\n[PASSED] test_ex61_functionals_survive_phi_underflow")


@pytest.mark.parametrize("theta", [1.0, 2.0])
def test_ex62_h_ratio_closed_form(theta):
    gen = make_generator("ex62", [theta])
    u = generator_grid()
    values = condition_functional(gen, ConditionId.H_RATIO_NEG_DEC, u)
    expected = -(u * np.exp(u) - np.expm1(u)) / np.expm1(u)
    assert np.all(np.abs(values - expected) <= 1e-9)
    assert check_condition(gen, ConditionId.H_RATIO_NEG_DEC).holds
    print(f"\n[PASSED] test_ex62_h_ratio_closed_form: theta={theta}")


@pytest.mark.parametrize("theta", [0.4, 0.5, 0.6])
def test_ex63_g_over_r_closed_form(theta):
    gen = make_generator("ex63", [theta])
    u = generator_grid()
    ratio = g_functional(gen, u) / r_functional(gen, u)
    expected = 1.0 - (1.0 - theta) * np.power(1.0 + u, -1.0 / theta)
    assert np.all(np.abs(ratio - expected) <= 1e-9)
    for n in (2, 3):
        assert check_condition(gen, ConditionId.GR_DIFF_POS_INC, n=n).holds
    print(f"\n[PASSED] test_ex63_g_over_r_closed_form: theta={theta}")


# --- Validity ---
@pytest.mark.parametrize("name, params, dim", [("clayton", [1.0], 5), ("gumbel", [2.0], 4), ("independence", [], 6)])
def test_validate_generator_accepts_completely_monotone_builtins(name, params, dim):
    report = validate_generator(make_generator(name, params), dim)
    assert report.valid
    assert report.failed_clause is None
    print(f"\n[PASSED] test_validate_generator_accepts_completely_monotone_builtins: {name} d={dim}")


def test_validate_generator_flags_non_convex_custom_generator():
    gen = CustomGenerator("gauss", lambda u: np.exp(-u**2))
    report = validate_generator(gen, 2)
    assert not report.valid
    assert "convex" in report.failed_clause
    print("\n[PASSED] test_validate_generator_flags_non_convex_custom_generator")


def test_validity_cache_is_bounded_and_keyed_by_parameters():
    cache = copulagen._cached_validity
    assert cache.cache_info().maxsize == 256
    cache.cache_clear()
    first = validate_generator(make_generator("clayton", [1.0]), 3)
    again = validate_generator(make_generator("clayton", {"theta": 1.0}), 3)
    assert again is first
    assert cache.cache_info().hits == 1
    for i in range(300):
        validate_generator(make_generator("clayton", [1.0 + i / 100.0]), 2)
    assert cache.cache_info().currsize == 256
    # custom generators are never cached
    validate_generator(CustomGenerator("gauss", lambda u: np.exp(-u**2)), 2)
    assert cache.cache_info().currsize == 256
    print("\n[PASSED] test_validity_cache_is_bounded_and_keyed_by_parameters")


def test_validate_generator_rejects_dimension_below_two():
    with pytest.raises(ParamOutOfDomainError):
        validate_generator(make_generator("clayton", [1.0]), 1)
    print("\n[PASSED] test_validate_generator_rejects_dimension_below_two")


def test_copula_sampling_refuses_invalid_generator():
    gen = CustomGenerator("gauss", lambda u: np.exp(-u**2))
    with pytest.raises(GeneratorValidationError):
        sample_copula_uniforms(gen, 2, np.random.default_rng(0), size=10)
    print("\n[PASSED] test_copula_sampling_refuses_invalid_generator")


@pytest.mark.parametrize("theta, dim, valid", [(0.5, 2, True), (0.5, 3, False), (0.1, 5, True)])
def test_double_exponential_validity_depends_on_theta(theta, dim, valid):
    report = validate_generator(make_generator("ex61", [theta]), dim)
    assert report.valid is valid
    print(f"\n[PASSED] test_double_exponential_validity_depends_on_theta: theta={theta} d={dim}")


# --- Copula sampling ---
@pytest.mark.parametrize("name, dim", [("clayton", 2), ("clayton", 3), ("gumbel", 2), ("gumbel", 3)])
def test_conditional_sampling_of_frailty_families(name, dim):
    gen = make_generator(name, [2.0])
    size = 10_000
    u = sample_copula_uniforms(gen, dim, np.random.default_rng(5), size=size, method="conditional")
    assert u.shape == (size, dim)
    assert np.all((u > 0) & (u <= 1))
    for j in range(dim):
        assert stats.kstest(u[:, j], "uniform").statistic < dkw_bound(size, alpha=1e-3)
    # both families have tau = 1/2 at theta = 2
    for j in range(dim - 1):
        tau = stats.kendalltau(u[:, j], u[:, j + 1]).statistic
        assert tau == pytest.approx(0.5, abs=0.03)
    print(f"\n[PASSED] test_conditional_sampling_of_frailty_families: {name} d={dim}")


def test_conditional_sampling_reaches_far_into_the_tail():
    gen = make_generator("clayton", [2.0])
    rng = np.random.default_rng(9)
    u = sample_copula_uniforms(gen, 2, rng, size=2_000, method="conditional")
    frailty = sample_copula_uniforms(gen, 2, rng, size=2_000, method="frailty")
    # small first coordinates push psi(u1) into the thousands
    assert u[:, 0].min() < 0.01
    assert stats.ks_2samp(u.max(axis=1), frailty.max(axis=1)).statistic < 1.95 * np.sqrt(2.0 / 2_000)
    print("\n[PASSED] test_conditional_sampling_reaches_far_into_the_tail")


# --- Diagnostics ---
@pytest.mark.parametrize("theta", [0.5, 1.0, 4.0])
def test_kendall_tau_clayton(theta):
    assert kendall_tau(make_generator("clayton", [theta])) == pytest.approx(theta / (theta + 2.0), abs=1e-6)
    print(f"\n[PASSED] test_kendall_tau_clayton: theta={theta}")


@pytest.mark.parametrize("theta", [1.0, 2.0, 5.0])
def test_kendall_tau_gumbel(theta):
    assert kendall_tau(make_generator("gumbel", [theta])) == pytest.approx(1.0 - 1.0 / theta, abs=1e-6)
    print(f"\n[PASSED] test_kendall_tau_gumbel: theta={theta}")


def test_generator_diagnostics_tabulates_functionals():
    diag = generator_diagnostics(make_generator("gumbel", [2.0]), generator_grid(points=20))
    assert len(diag.grid) == len(diag.H) == len(diag.R) == len(diag.G) == 20
    # R(u) = -u^(1/theta)/theta for Gumbel
    u = np.asarray(diag.grid)
    assert np.allclose(diag.R, -np.sqrt(u) / 2.0)
    print("\n[PASSED] test_generator_diagnostics_tabulates_functionals")


@pytest.mark.parametrize(
    "name, params, expected",
    [
        ("independence", [], {"H": -0.5819767068693265, "R": -1.0, "G": -1.0}),
        ("ex61", [1.0], {"R": -np.e}),
        ("clayton", [1.0], {"R": -0.5}),
    ],
)
def test_generator_diagnostics_at_a_point(name, params, expected):
    diag = generator_diagnostics(make_generator(name, params), 1.0)
    assert diag.grid == [1.0]
    for key, value in expected.items():
        assert getattr(diag, key)[0] == pytest.approx(value, rel=1e-9)
    print(f"\n[PASSED] test_generator_diagnostics_at_a_point: {name}")


# --- W laws ---
def test_gumbel_w_is_exponential():
    gen = make_generator("gumbel", [2.0])
    t = np.array([0.0, 0.3, 1.0, 2.5])
    assert np.allclose(w_survival(gen, 4.0, t), np.exp(-2.0 * t))
    assert np.allclose(w_quantile(gen, 4.0, np.array([0.25, 0.5])), -np.log1p(-np.array([0.25, 0.5])) / 2.0)
    print("\n[PASSED] test_gumbel_w_is_exponential")


@pytest.mark.parametrize("route", ["inversion", "copula_min"])
def test_sample_w_routes_agree_with_closed_form_mean(route):
    gen = make_generator("gumbel", [2.0])
    draws = sample_w(gen, 4, np.random.default_rng(11), size=40_000, route=route)
    # W ~ Exp(2): mean 0.5, sd 0.5
    assert abs(draws.mean() - 0.5) < 5 * 0.5 / np.sqrt(draws.size)
    print(f"\n[PASSED] test_sample_w_routes_agree_with_closed_form_mean: {route}")


ROUTE_GENERATORS = [
    ("independence", []),
    ("clayton", [2.0]),
    ("gumbel", [2.0]),
    ("ex61", [0.1]),
    ("ex62", [2.0]),
    ("ex63", [2.0]),
]


@pytest.mark.parametrize("count", [2, 5])
@pytest.mark.parametrize("name, params", ROUTE_GENERATORS)
def test_sample_w_routes_are_equivalent(name, params, count):
    gen = make_generator(name, params)
    size = 10_000
    inverted = sample_w(gen, count, np.random.default_rng([count, 1]), size=size, route="inversion")
    minimum = sample_w(gen, count, np.random.default_rng([count, 2]), size=size, route="copula_min")
    # 1.63 is the 99% two-sample constant; 1.97 keeps that level across the twelve cases
    assert stats.ks_2samp(inverted, minimum).statistic < 1.97 * np.sqrt(2.0 / size)
    print(f"\n[PASSED] test_sample_w_routes_are_equivalent: {name} count={count}")


def test_sample_w_copula_min_needs_integer_count():
    with pytest.raises(ParamOutOfDomainError):
        sample_w(make_generator("clayton", [1.0]), 2.5, np.random.default_rng(0), size=5, route="copula_min")
    print("\n[PASSED] test_sample_w_copula_min_needs_integer_count")
