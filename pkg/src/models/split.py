from typing import Annotated, Literal

from typing_extensions import Self

import numpy as np
from annotated_types import Ge, MinLen
from pydantic import BaseModel, ConfigDict, model_validator

from models.series import LabelSequence

InterpMode = Literal['hold', 'linear']


class ClassState(BaseModel):
    """Выжившая группа эквивалентности: последнее переключение в момент tau"""
    model_config = ConfigDict(frozen=True)

    tau: Annotated[int, Ge(1)]
    """Индекс переключения (1..T-1)"""
    m_value: float
    """Нормированная потеря M_tau (может быть отрицательной)"""
    anchor: float
    """Значение x_tau"""


class BackPointerTable(BaseModel):
    """Указатели tau_t для t = 1..T-1 (элемент i соответствует t = i + 1)"""
    model_config = ConfigDict(frozen=True)

    pointers: tuple[Annotated[int, Ge(0)], ...]

    @model_validator(mode='after')
    def check_pointers(self) -> Self:
        if self.pointers:
            pointers = np.asarray(self.pointers, dtype=np.int64)
            bad = np.flatnonzero(pointers >= np.arange(1, pointers.size + 1))
            if bad.size:
                t = int(bad[0]) + 1
                raise ValueError(f'pointer at t={t} is {int(pointers[bad[0]])}, must be < {t}')
        return self

    def __len__(self) -> int:
        return len(self.pointers)


class SplitResult(BaseModel):
    """Результат оптимального разделения ряда"""
    model_config = ConfigDict(frozen=True)

    labels: LabelSequence
    """Метки отсчетов, последний блок помечен единицей"""
    total_drift: Annotated[float, Ge(0)]
    """Суммарный L1-дрейф обеих подпоследовательностей, пересчитанный по меткам"""
    final_tau: Annotated[int, Ge(0)]
    """Выбранный tau*"""
    final_m: float
    """M_{tau*} (0 для базового класса)"""
    survivor_counts: tuple[Annotated[int, Ge(1)], ...]
    """Размер активного множества после каждого шага t = 1..T-1"""
    pointer_trace: Annotated[tuple[Annotated[int, Ge(0)], ...], MinLen(1)]
    """Цепочка переключений tau*, tau_{tau*}, ..., 0"""
    survivors: tuple[Annotated[int, Ge(1)], ...]
    """Индексы классов, активных после последнего отсчета"""
    pointers: BackPointerTable

    @model_validator(mode='after')
    def check_counts(self) -> Self:
        expected = max(len(self.labels) - 1, 0)
        if len(self.survivor_counts) != expected:
            raise ValueError(f'survivor_counts must have {expected} entries, got {len(self.survivor_counts)}')
        counts = np.asarray(self.survivor_counts, dtype=np.int64)
        if counts.size and np.any(counts > np.arange(1, counts.size + 1)):
            raise ValueError('survivor count at step t exceeds t')
        return self

    @property
    def final_survivors(self) -> int:
        return len(self.survivors)


class EnvelopePair(BaseModel):
    """Верхняя и нижняя огибающие на сетке исходного ряда"""
    model_config = ConfigDict(frozen=True)

    timestamps: tuple[float, ...]
    upper: tuple[float, ...]
    lower: tuple[float, ...] | None
    """None, если вторая подпоследовательность пуста"""
    defined_upper: tuple[bool, ...]
    """Где верхняя огибающая совпадает с исходным отсчетом"""
    defined_lower: tuple[bool, ...] | None
    interp_mode: InterpMode
    upper_label: Annotated[int, Ge(0)]
    """Какая метка (0 или 1) стала верхней огибающей"""

    @model_validator(mode='after')
    def check_lengths(self) -> Self:
        size = len(self.timestamps)
        if len(self.upper) != size or len(self.defined_upper) != size:
            raise ValueError('upper envelope does not match the timestamp grid')
        if (self.lower is None) != (self.defined_lower is None):
            raise ValueError('lower envelope and its mask must be both present or both absent')
        if self.lower is not None and (len(self.lower) != size or len(self.defined_lower) != size):
            raise ValueError('lower envelope does not match the timestamp grid')
        return self

    @property
    def lower_absent(self) -> bool:
        return self.lower is None


class OracleResult(BaseModel):
    """Ответ эталонного решателя"""
    model_config = ConfigDict(frozen=True)

    best_loss: Annotated[float, Ge(0)]
    optimal_labelings: Annotated[list[LabelSequence], MinLen(1)]
    table_snapshot: list[list[float]] | None = None
    """Строки L_{t,tau}, t = 1..T (только квадратичный решатель)"""


class StepTrace(BaseModel):
    """Один шаг потокового разделителя (наблюдение x_{t+1})"""
    t: Annotated[int, Ge(1)]
    removed: list[ClassState]
    """Классы, отсеченные интервальным правилом на этом шаге"""
    m_value: float
    tau: Annotated[int, Ge(0)]
    survivors: Annotated[int, Ge(1)]
