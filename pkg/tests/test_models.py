import math

import numpy as np
import pytest
from pydantic import ValidationError

from models.bench import AgeSurvival, ForkTree
from models.series import LabelSequence, SampleSeries
from models.split import BackPointerTable, EnvelopePair, SplitResult


@pytest.mark.parametrize('fields', [
    {'values': ()},
    {'values': (1.0, math.nan)},
    {'values': (1.0, math.inf)},
    {'values': (1.0, 2.0), 'timestamps': (1.0,)},
    {'values': (1.0, 2.0, 3.0), 'timestamps': (1.0, 3.0, 3.0)},
])
def test_invalid_series(fields):
    with pytest.raises(ValidationError):
        SampleSeries(**fields)


def test_subseries_keeps_timestamps():
    series = SampleSeries.from_values([4, 5, 6, 7])
    part = series.subseries(np.array([False, True, False, True]))
    assert part.values == (5.0, 7.0)
    assert part.timestamps == (2.0, 4.0)


def test_transform():
    series = SampleSeries.from_values([1, 2], timestamps=[10, 20])
    moved = series.transform(-2.0, 1.0)
    assert moved.values == (-1.0, -3.0)
    assert moved.timestamps == (10.0, 20.0)


def test_label_canonical_form():
    labels = LabelSequence(labels=(0, 1, 1))
    assert labels.complement().labels == (1, 0, 0)
    assert labels.canonical().labels == (1, 0, 0)
    assert labels.same_split(LabelSequence(labels=(1, 0, 0)))
    assert not labels.same_split(LabelSequence(labels=(1, 1, 0)))


@pytest.mark.parametrize('labels', [(), (0, 2), (1, -1)])
def test_invalid_labels(labels):
    with pytest.raises(ValidationError):
        LabelSequence(labels=labels)


def test_pointer_must_precede_its_step():
    assert len(BackPointerTable(pointers=(0, 1, 0))) == 3
    with pytest.raises(ValidationError):
        BackPointerTable(pointers=(0, 2))


def test_split_result_checks_counts():
    fields = {
        'labels': LabelSequence(labels=(1, 0, 1)),
        'total_drift': 1.0,
        'final_tau': 2,
        'final_m': -2.0,
        'pointer_trace': (2, 1, 0),
        'survivors': (1, 2),
        'pointers': BackPointerTable(pointers=(0, 1)),
    }
    assert SplitResult(survivor_counts=(1, 2), **fields).final_survivors == 2
    with pytest.raises(ValidationError):
        SplitResult(survivor_counts=(1,), **fields)
    with pytest.raises(ValidationError):
        SplitResult(survivor_counts=(2, 2), **fields)


def test_envelope_pair_lengths():
    with pytest.raises(ValidationError):
        EnvelopePair(timestamps=(1.0, 2.0), upper=(1.0,), lower=None, defined_upper=(True,), defined_lower=None,
                     interp_mode='linear', upper_label=1)
    with pytest.raises(ValidationError):
        EnvelopePair(timestamps=(1.0,), upper=(1.0,), lower=(0.0,), defined_upper=(True,), defined_lower=None,
                     interp_mode='linear', upper_label=1)


def test_age_survival_statistics():
    item = AgeSurvival(age=3, survived=50, trials=100)
    assert item.frequency == 0.5
    assert item.std_error == pytest.approx(0.05)


def test_fork_paths():
    assert ForkTree.child_path('', 'upper') == 'upper'
    assert ForkTree.child_path('lower', 'upper') == 'lower/upper'
