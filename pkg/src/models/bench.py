import math
from typing import Annotated, Literal

from annotated_types import Ge, Gt
from pydantic import BaseModel, ConfigDict, computed_field

from models.process import ProcessFamily
from models.series import SampleSeries
from models.split import EnvelopePair, SplitResult

GrowthLaw = Literal['log', 'sqrt', 'constant']


class TrialRecord(BaseModel):
    """Строка JSONL бенчмарка; набор и порядок полей стабильны"""
    process: str
    params: dict[str, float | str]
    T: Annotated[int, Ge(1)]
    trial: Annotated[int, Ge(0)]
    seed: Annotated[int, Ge(0)]
    final_survivors: Annotated[int, Ge(0)]
    runtime_ns: int | None = None
    """Время разделения; None, если замер выключен"""


class TrialOutcome(BaseModel):
    """Результат одного прогона: запись и возрасты выживших классов"""
    record: TrialRecord
    ages: list[Annotated[int, Ge(1)]]


class SizeSummary(BaseModel):
    """Статистика числа выживших при фиксированном T"""
    length: Annotated[int, Ge(1)]
    trials: Annotated[int, Ge(1)]
    mean: float
    std_error: float
    variance: float


class AgeSurvival(BaseModel):
    """Эмпирическая частота выживания класса возраста T - t"""
    age: Annotated[int, Ge(1)]
    survived: Annotated[int, Ge(0)]
    trials: Annotated[int, Ge(1)]

    @computed_field
    @property
    def frequency(self) -> float:
        return self.survived / self.trials

    @computed_field
    @property
    def std_error(self) -> float:
        return math.sqrt(self.frequency * (1 - self.frequency) / self.trials)


class SurvivorStats(BaseModel):
    """Сводка переписи выживших классов по семейству процессов"""
    family: ProcessFamily
    seed: int
    trials: Annotated[int, Ge(1)]
    summaries: dict[int, SizeSummary]
    """Среднее и стандартная ошибка по каждому T"""
    survived_by_age: dict[int, list[int]]
    """Для каждого T: число прогонов, где выжил класс возраста i + 1"""

    @property
    def sizes(self) -> list[int]:
        return sorted(self.summaries)

    def mean_final_survivors(self) -> dict[int, tuple[float, float]]:
        return {length: (summary.mean, summary.std_error) for length, summary in sorted(self.summaries.items())}

    def per_age_survival(self, length: int, ages: list[int] | None = None) -> list[AgeSurvival]:
        counts = self.survived_by_age[length]
        ages = ages or list(range(1, length))
        return [AgeSurvival(age=age, survived=counts[age - 1], trials=self.trials) for age in ages]


class GrowthRow(BaseModel):
    length: int
    mean: float
    reference: float
    """Форма закона при этом T: 2(H_T - 1), sqrt(T) или 1"""
    ratio: float


class GrowthFit(BaseModel):
    """Проверка закона роста среднего числа выживших"""
    law: GrowthLaw
    coefficient: float
    """Коэффициент наименьших квадратов mean ~ coefficient * reference"""
    rows: list[GrowthRow]
    passed: bool
    detail: str
    bound: float | None = None
    """Оценка p^-1 + q^-1 для процесса рекордов"""
    within_bound: bool | None = None


class BallotBin(BaseModel):
    age: Annotated[int, Ge(1)]
    distance: Annotated[int, Ge(0)]
    """|x_T - x_t| в шагах решетки"""
    trials: Annotated[int, Ge(1)]
    survived: Annotated[int, Ge(0)]
    expected: float
    lower: float
    upper: float
    passed: bool | None
    """None, если прогонов в корзине слишком мало для проверки"""

    @computed_field
    @property
    def frequency(self) -> float:
        return self.survived / self.trials


class BallotReport(BaseModel):
    length: Annotated[int, Gt(0)]
    trials: Annotated[int, Gt(0)]
    seed: int
    bins: list[BallotBin]
    passed: bool


class ForkNode(BaseModel):
    """Узел иерархического разделения; путь - цепочка выборов upper/lower от корня"""
    model_config = ConfigDict(frozen=True)

    path: str
    level: Annotated[int, Ge(0)]
    series: SampleSeries
    split: SplitResult | None = None
    envelopes: EnvelopePair | None = None

    @property
    def is_leaf(self) -> bool:
        return self.split is None


class ForkTree(BaseModel):
    """Вложенные огибающие: каждый узел с разделением порождает детей upper и lower"""
    root: SampleSeries
    depth: Annotated[int, Ge(1)]
    nodes: dict[str, ForkNode]

    @staticmethod
    def child_path(path: str, side: str) -> str:
        return f'{path}/{side}' if path else side

    def children(self, path: str) -> list[ForkNode]:
        return [
            self.nodes[child]
            for side in ('upper', 'lower')
            if (child := self.child_path(path, side)) in self.nodes
        ]

    def split_nodes(self) -> list[ForkNode]:
        return [node for node in self.nodes.values() if node.split is not None]

    def leaves(self) -> list[ForkNode]:
        return [node for node in self.nodes.values() if node.is_leaf]
