import math

import numpy as np
import pytest
from pydantic import ValidationError

from core.exceptions import ContractViolation
from models.process import PROCESS_ALIASES, ProcessFamily, ProcessSpec
from services.generators import derive_seed, generate, make_rng, open_unit, quantile_standard_normal


@pytest.mark.parametrize('alias', list(PROCESS_ALIASES))
def test_same_spec_gives_same_series(alias):
    spec = ProcessFamily(**PROCESS_ALIASES[alias], p=0.2, q=0.1).with_length(500, 42)
    assert generate(spec).values == generate(spec).values
    assert generate(spec).values != generate(spec.model_copy(update={'seed': 43})).values


def test_uniform_values_in_unit_interval():
    values = generate(ProcessSpec(kind='uniform_iid', length=10_000, seed=1)).array
    assert values.min() >= 0.0
    assert values.max() <= 1.0


def test_simple_walk_uses_unit_lattice_steps():
    values = generate(ProcessSpec(kind='simple_walk', length=1000, seed=5)).array
    assert values[0] == 0.0
    assert set(np.abs(np.diff(values)).tolist()) == {1.0}


def test_simple_walk_step_scale():
    base = generate(ProcessSpec(kind='simple_walk', length=100, seed=5)).array
    scaled = generate(ProcessSpec(kind='simple_walk', length=100, seed=5, step=0.5)).array
    assert np.array_equal(scaled, base * 0.5)


def test_simple_walk_steps_are_unbiased():
    values = generate(ProcessSpec(kind='simple_walk', length=1_000_001, seed=11)).array
    assert abs(np.diff(values).mean()) < 4e-3


def test_general_walk_starts_at_zero():
    values = generate(ProcessSpec(kind='general_walk', length=50, seed=2)).array
    assert values[0] == 0.0
    assert np.all(np.diff(values) != 0)


def test_records_with_only_new_maxima_increase():
    values = generate(ProcessSpec(kind='record_renewal', p=1.0, q=0.0, length=200, seed=3)).array
    assert values[0] == 0.0
    assert np.all(np.diff(values) > 0)


def test_records_new_extreme_frequencies():
    p, q, length = 0.1, 0.2, 40_000
    values = generate(ProcessSpec(kind='record_renewal', p=p, q=q, length=length, seed=9)).array
    running_max = np.maximum.accumulate(values)
    running_min = np.minimum.accumulate(values)
    new_max = values[2:] > running_max[1:-1]
    new_min = values[2:] < running_min[1:-1]
    inside = ~(new_max | new_min)
    for frequency, expected in ((new_max.mean(), p), (new_min.mean(), q)):
        assert abs(frequency - expected) < 4 * math.sqrt(expected * (1 - expected) / (length - 2))
    # Внутренние значения лежат строго между текущими минимумом и максимумом.
    assert np.all(values[2:][inside] < running_max[1:-1][inside])
    assert np.all(values[2:][inside] > running_min[1:-1][inside])


def test_custom_quantile_function():
    spec = ProcessSpec(kind='iid_with_cdf', length=1000, seed=4)
    values = generate(spec, quantile=lambda u: 2.0 * u).array
    assert 0.0 < values.min() and values.max() < 2.0


def test_exponential_draws_are_positive():
    values = generate(ProcessSpec(kind='iid_with_cdf', distribution='exponential', length=5000, seed=8)).array
    assert values.min() > 0.0
    assert values.mean() == pytest.approx(1.0, abs=0.1)


@pytest.mark.parametrize('u, expected, tolerance', [
    (0.5, 0.0, 1e-12),
    (0.8413447, 1.0, 1e-4),
    (0.9772499, 2.0, 1e-4),
    (0.0227501, -2.0, 1e-4),
])
def test_quantile_standard_normal(u, expected, tolerance):
    assert quantile_standard_normal(u) == pytest.approx(expected, abs=tolerance)


@pytest.mark.parametrize('u', [0.0, 1.0, -0.1, 1.5, math.nan])
def test_quantile_rejects_values_outside_unit_interval(u):
    with pytest.raises(ContractViolation):
        quantile_standard_normal(u)


def test_open_unit_never_hits_the_bounds():
    draws = open_unit(make_rng(0), 100_000)
    assert draws.min() > 0.0
    assert draws.max() < 1.0


def test_derive_seed_is_deterministic():
    assert derive_seed(1, 1024, 0) == derive_seed(1, 1024, 0)
    assert derive_seed(1, 1024, 0) != derive_seed(1, 1024, 1)
    assert 0 <= derive_seed(7, 2) < 2 ** 64


def test_probabilities_must_sum_to_at_most_one():
    with pytest.raises(ValidationError):
        ProcessFamily(kind='record_renewal', p=0.7, q=0.5)


@pytest.mark.parametrize('update', [{'length': 0}, {'seed': -1}, {'step': 0.0}])
def test_invalid_spec_parameters(update):
    fields = {'kind': 'simple_walk', 'length': 10, 'seed': 0} | update
    with pytest.raises(ValidationError):
        ProcessSpec(**fields)


def test_spec_family_drops_length_and_seed():
    spec = ProcessFamily(kind='record_renewal', p=0.3, q=0.2).with_length(64, 5)
    assert spec.family == ProcessFamily(kind='record_renewal', p=0.3, q=0.2)
    assert spec.family.params() == {'p': 0.3, 'q': 0.2}
