from typing import Annotated, Literal

from typing_extensions import Self

from annotated_types import Ge, Gt, Le, Lt
from pydantic import BaseModel, ConfigDict, Field, model_validator

ProcessKind = Literal['uniform_iid', 'iid_with_cdf', 'simple_walk', 'general_walk', 'record_renewal']
Distribution = Literal['normal', 'exponential', 'uniform']

# Имена процессов в CLI
PROCESS_ALIASES: dict[str, dict] = {
    'uniform': {'kind': 'uniform_iid'},
    'normal': {'kind': 'iid_with_cdf', 'distribution': 'normal'},
    'expo': {'kind': 'iid_with_cdf', 'distribution': 'exponential'},
    'walk': {'kind': 'simple_walk'},
    'gwalk': {'kind': 'general_walk'},
    'records': {'kind': 'record_renewal'},
}


class ProcessFamily(BaseModel):
    """Семейство синтетических процессов без длины и зерна"""
    model_config = ConfigDict(frozen=True)

    kind: ProcessKind
    """Тип процесса"""
    distribution: Distribution = 'normal'
    """Распределение для iid_with_cdf (через обратную функцию распределения)"""
    step: Annotated[float, Gt(0)] = 1.0
    """Шаг решетки simple_walk или масштаб нормального шага general_walk"""
    p: Annotated[float, Ge(0), Le(1)] = 0.0
    """Вероятность нового абсолютного максимума (record_renewal)"""
    q: Annotated[float, Ge(0), Le(1)] = 0.0
    """Вероятность нового абсолютного минимума (record_renewal)"""

    @model_validator(mode='after')
    def check_probabilities(self) -> Self:
        if self.p + self.q > 1:
            raise ValueError(f'p + q must not exceed 1, got {self.p} + {self.q}')
        return self

    @property
    def label(self) -> str:
        if self.kind == 'iid_with_cdf':
            return f'iid_{self.distribution}'
        return self.kind

    def params(self) -> dict:
        """Параметры, существенные для данного типа процесса"""
        match self.kind:
            case 'iid_with_cdf':
                return {'distribution': self.distribution}
            case 'simple_walk' | 'general_walk':
                return {'step': self.step}
            case 'record_renewal':
                return {'p': self.p, 'q': self.q}
            case _:
                return {}

    def with_length(self, length: int, seed: int) -> 'ProcessSpec':
        return ProcessSpec(**self.model_dump(), length=length, seed=seed)


class ProcessSpec(ProcessFamily):
    """Полное описание синтетического ряда: одинаковая спецификация дает одинаковый ряд"""

    length: Annotated[int, Ge(1)] = Field(..., description='T')
    seed: Annotated[int, Ge(0), Lt(2 ** 64)] = 0

    @property
    def family(self) -> ProcessFamily:
        return ProcessFamily(**self.model_dump(exclude={'length', 'seed'}))
