# tests/unit/core/test_ordered_models.py
import math

import numpy as np
import pytest
from pydantic import ValidationError

from osim.core.copulagen import make_generator
from osim.core.distributions import Exponential, make_distribution
from osim.core.exceptions import (
    InvalidGammaError,
    NotIncreasingError,
    ParamOutOfDomainError,
    PresetNeedsIndependenceError,
    UnknownPresetError,
)
from osim.core.ordered_models import (
    DgosModel,
    DsosModel,
    dgos_from_preset,
    dgos_joint_density,
    dgos_marginal,
    dgos_params,
    dgos_params_from_gamma,
    dsos_conditional_quantile,
    dsos_joint_density,
    dsos_min_survival,
    dsos_transition_survival,
    extend_dgos,
    sample_many,
)

INDEPENDENCE = make_generator("independence", [])
GUMBEL = make_generator("gumbel", [2.0])


@pytest.fixture
def os_model():
    """Ordinary order statistics of three unit exponentials."""
    return DgosModel(Exponential(1.0), dgos_params(3, 1.0, [0.0, 0.0]), INDEPENDENCE, tag="os3")


# --- Parameter algebra ---
def test_dgos_params_gamma_and_alpha():
    params = dgos_params(3, 1.0, [0.0, 0.0])
    assert params.gamma == [3.0, 2.0, 1.0]
    assert params.alpha == [1.0, 1.0, 1.0]
    assert params.M == [0.0, 0.0]
    assert params.m_plus_one_nonneg
    print("\n[PASSED] test_dgos_params_gamma_and_alpha")


def test_dgos_params_with_unequal_m():
    params = dgos_params(3, 2.0, [1.0, -0.5])
    # gamma_i = k + n - i + M_i
    assert params.gamma == pytest.approx([2.0 + 2.0 + 0.5, 2.0 + 1.0 - 0.5, 2.0])
    print("\n[PASSED] test_dgos_params_with_unequal_m")


def test_dgos_params_from_gamma_inverts_the_algebra():
    original = dgos_params(4, 1.5, [0.5, -0.25, 2.0])
    rebuilt = dgos_params_from_gamma(original.gamma)
    assert rebuilt.n == 4
    assert rebuilt.k == pytest.approx(1.5)
    assert rebuilt.m == pytest.approx(original.m)
    print("\n[PASSED] test_dgos_params_from_gamma_inverts_the_algebra")


def test_dgos_params_rejects_non_positive_gamma():
    with pytest.raises(InvalidGammaError) as exc_info:
        dgos_params(2, 1.0, [-3.0])
    assert exc_info.value.index == 1
    with pytest.raises(InvalidGammaError):
        dgos_params_from_gamma([2.0, 0.0])
    print("\n[PASSED] test_dgos_params_rejects_non_positive_gamma")


def test_dgos_params_rejects_wrong_m_length():
    with pytest.raises(ValidationError):
        dgos_params(3, 1.0, [0.0])
    with pytest.raises(ParamOutOfDomainError):
        dgos_params_from_gamma([])
    print("\n[PASSED] test_dgos_params_rejects_wrong_m_length")


def test_extend_dgos_appends_m_and_shifts_gamma():
    base = dgos_params(2, 1.0, [0.0])
    extended = extend_dgos(base, 0.0)
    assert extended.n == 3
    assert extended.m == (0.0, 0.0)
    assert extended.gamma == [3.0, 2.0, 1.0]
    print("\n[PASSED] test_extend_dgos_appends_m_and_shifts_gamma")


# --- Presets ---
def test_progressive_preset_gamma():
    model = dgos_from_preset("progressive_typeII", Exponential(1.0), GUMBEL, {"R": [1, 0, 2]})
    assert model.gamma.tolist() == [6.0, 4.0, 3.0]
    assert model.counts.tolist() == [6.0, 4.0, 3.0]
    assert model.preset == "progressive_typeII"
    print("\n[PASSED] test_progressive_preset_gamma")


def test_progressive_preset_rejects_mismatched_nu():
    with pytest.raises(ParamOutOfDomainError):
        dgos_from_preset("progressive_typeII", Exponential(1.0), GUMBEL, {"R": [1, 0, 2], "nu": 5})
    print("\n[PASSED] test_progressive_preset_rejects_mismatched_nu")


def test_os_preset_matches_plain_parameters():
    model = dgos_from_preset("OS", Exponential(1.0), GUMBEL, {"n": 4})
    assert model.gamma.tolist() == [4.0, 3.0, 2.0, 1.0]
    assert model.alpha.tolist() == [1.0, 1.0, 1.0, 1.0]
    print("\n[PASSED] test_os_preset_matches_plain_parameters")


@pytest.mark.parametrize("preset, params", [("GOS", {"gamma": [3.0, 2.0, 1.0]}), ("record", {"n": 3})])
def test_independence_only_presets(preset, params):
    with pytest.raises(PresetNeedsIndependenceError):
        dgos_from_preset(preset, Exponential(1.0), GUMBEL, params)
    model = dgos_from_preset(preset, Exponential(1.0), INDEPENDENCE, params)
    assert model.n == 3
    print(f"\n[PASSED] test_independence_only_presets: {preset}")


def test_unknown_preset():
    with pytest.raises(UnknownPresetError):
        dgos_from_preset("censored", Exponential(1.0), INDEPENDENCE, {})
    print("\n[PASSED] test_unknown_preset")


# --- Kernels and densities ---
def test_independence_first_failure_is_minimum(os_model):
    t = np.array([0.1, 0.5, 2.0])
    assert np.allclose(dsos_min_survival(os_model, t), np.exp(-3.0 * t))
    assert np.allclose(dsos_transition_survival(os_model, 2, 0.4, 0.4 + t), np.exp(-2.0 * t))
    print("\n[PASSED] test_independence_first_failure_is_minimum")


def test_conditional_quantile_inverts_transition_survival():
    model = DsosModel([Exponential(1.0), make_distribution("weibull", [1.5, 1.0])], GUMBEL)
    q = dsos_conditional_quantile(model, 2, 0.3, np.array([0.25, 0.5, 0.9]))
    assert np.all(q >= 0.3)
    assert np.allclose(dsos_transition_survival(model, 2, 0.3, q), [0.75, 0.5, 0.1])
    print("\n[PASSED] test_conditional_quantile_inverts_transition_survival")


def test_joint_density_of_independent_order_statistics():
    model = DgosModel(Exponential(1.0), dgos_params(2, 1.0, [0.0]), INDEPENDENCE)
    expected = 2.0 * math.exp(-0.5) * math.exp(-1.2)
    assert dgos_joint_density(model, [0.5, 1.2]) == pytest.approx(expected, rel=1e-9)
    assert dsos_joint_density(model, [0.5, 1.2]) == pytest.approx(expected, rel=1e-9)
    print("\n[PASSED] test_joint_density_of_independent_order_statistics")


def test_joint_density_needs_increasing_point(os_model):
    with pytest.raises(NotIncreasingError):
        dgos_joint_density(os_model, [0.5, 0.4, 1.0])
    print("\n[PASSED] test_joint_density_needs_increasing_point")


def test_first_marginal_of_independent_order_statistics(os_model):
    law = dgos_marginal(os_model, 1)
    x = np.array([0.1, 0.4, 1.5])
    assert np.allclose(law.sf(x), np.exp(-3.0 * x))
    print("\n[PASSED] test_first_marginal_of_independent_order_statistics")


# --- Sampling ---
def test_sample_many_is_deterministic_across_worker_counts():
    model = DgosModel(Exponential(1.0), dgos_params(3, 1.0, [0.0, 0.0]), GUMBEL)
    serial = sample_many(model, 1000, 42, keys=("unit",), chunk=100, workers=1)
    threaded = sample_many(model, 1000, 42, keys=("unit",), chunk=100, workers=4)
    assert serial.shape == (1000, 3)
    assert np.array_equal(serial, threaded)
    assert not np.array_equal(serial, sample_many(model, 1000, 43, keys=("unit",), chunk=100, workers=1))
    print("\n[PASSED] test_sample_many_is_deterministic_across_worker_counts")


@pytest.mark.parametrize("gen", [INDEPENDENCE, GUMBEL, make_generator("clayton", [1.0])])
def test_sampled_rows_are_ordered(gen):
    model = DsosModel([Exponential(1.0), Exponential(2.0), make_distribution("lomax", [3.0, 1.0])], gen)
    draws = sample_many(model, 500, 7, keys=("rows",), workers=1)
    assert np.all(draws > 0)
    assert np.all(np.diff(draws, axis=1) >= 0)
    print(f"\n[PASSED] test_sampled_rows_are_ordered: {gen.label}")


def test_sampled_minimum_matches_its_law(os_model):
    draws = sample_many(os_model, 20_000, 3, keys=("minimum",), workers=1)
    # X_1 ~ Exp(3): mean 1/3, sd 1/3
    assert abs(draws[:, 0].mean() - 1.0 / 3.0) < 5 * (1.0 / 3.0) / math.sqrt(draws.shape[0])
    print("\n[PASSED] test_sampled_minimum_matches_its_law")
