import numpy as np
import pytest

from models.series import SampleSeries
from services.generators import make_rng


@pytest.fixture
def rng() -> np.random.Generator:
    return make_rng(20231117)


@pytest.fixture
def worked_series() -> SampleSeries:
    return SampleSeries.from_values([0, 2, 1])


@pytest.fixture
def uniform_series(rng):
    def build(size: int) -> SampleSeries:
        return SampleSeries.from_values(rng.random(size))

    return build


@pytest.fixture
def lattice_walk(rng):
    """Блуждание с шагами +-1 от нуля: много равных значений"""
    def build(size: int) -> SampleSeries:
        steps = rng.integers(0, 2, size=size - 1) * 2 - 1
        return SampleSeries.from_values(np.concatenate(([0], np.cumsum(steps))))

    return build


@pytest.fixture
def random_series(rng, uniform_series, lattice_walk):
    """Короткие ряды вперемешку: равномерные и решетчатые блуждания"""
    def build(count: int, low: int = 2, high: int = 16) -> list[SampleSeries]:
        sizes = rng.integers(low, high + 1, size=count).tolist()
        return [
            uniform_series(size) if index % 2 == 0 else lattice_walk(size)
            for index, size in enumerate(sizes)
        ]

    return build
