from typing import Annotated

from typing_extensions import Self

import numpy as np
from annotated_types import Ge, Le, MinLen
from pydantic import BaseModel, ConfigDict, FiniteFloat, model_validator

Label = Annotated[int, Ge(0), Le(1)]


class SampleSeries(BaseModel):
    """Входной временной ряд x_1..x_T"""
    model_config = ConfigDict(frozen=True)

    values: Annotated[tuple[FiniteFloat, ...], MinLen(1)]
    """Значения ряда, только конечные числа"""
    timestamps: tuple[FiniteFloat, ...] | None = None
    """Строго возрастающие отметки времени; по умолчанию 1..T"""

    @model_validator(mode='after')
    def check_timestamps(self) -> Self:
        if self.timestamps is None:
            return self
        if len(self.timestamps) != len(self.values):
            raise ValueError(
                f'timestamps length {len(self.timestamps)} does not match values length {len(self.values)}'
            )
        grid = np.asarray(self.timestamps, dtype=np.float64)
        if grid.size > 1 and not np.all(np.diff(grid) > 0):
            bad = int(np.argmin(np.diff(grid) > 0)) + 1
            raise ValueError(f'timestamps must be strictly increasing (index {bad})')
        return self

    @classmethod
    def from_values(cls, values, timestamps=None) -> 'SampleSeries':
        """Сборка из любых последовательностей чисел, включая массивы numpy"""
        return cls(
            values=np.asarray(values, dtype=np.float64).tolist(),
            timestamps=None if timestamps is None else np.asarray(timestamps, dtype=np.float64).tolist(),
        )

    def __len__(self) -> int:
        return len(self.values)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)

    @property
    def grid(self) -> np.ndarray:
        """Сетка времени: явные отметки или 1..T"""
        if self.timestamps is None:
            return np.arange(1, len(self.values) + 1, dtype=np.float64)
        return np.asarray(self.timestamps, dtype=np.float64)

    def subseries(self, mask: np.ndarray) -> 'SampleSeries':
        """Подпоследовательность с исходными отметками времени"""
        mask = np.asarray(mask, dtype=bool)
        return SampleSeries(values=self.array[mask].tolist(), timestamps=self.grid[mask].tolist())

    def transform(self, scale: float, shift: float = 0.0) -> 'SampleSeries':
        """Ряд scale * x + shift на той же сетке"""
        return SampleSeries(values=(self.array * scale + shift).tolist(), timestamps=self.timestamps)


class LabelSequence(BaseModel):
    """Бинарное решение s_t для каждого отсчета"""
    model_config = ConfigDict(frozen=True)

    labels: Annotated[tuple[Label, ...], MinLen(1)]
    """Метки 0/1, по одной на отсчет"""

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.labels, dtype=np.int8)

    def complement(self) -> 'LabelSequence':
        return LabelSequence(labels=(1 - self.array).tolist())

    def canonical(self) -> 'LabelSequence':
        """Каноническая форма: первый отсчет помечен единицей"""
        return self if self.labels[0] == 1 else self.complement()

    def same_split(self, other: 'LabelSequence') -> bool:
        """Описывают ли две последовательности одно и то же разбиение"""
        return self.canonical().labels == other.canonical().labels

    @classmethod
    def from_array(cls, labels) -> 'LabelSequence':
        return cls(labels=np.asarray(labels, dtype=np.int8).tolist())
