"""
Оптимальное разделение ряда на две огибающие с минимальным суммарным L1-дрейфом.

Динамика ведется в нормированной форме: M_t = min(M_tau + d_{t,tau}) по базовому классу
(tau = 0, M = 0) и по выжившим классам, где
    d_{t,0} = -|x_{t+1} - x_t|,
    d_{t,tau} = -|x_{t+1} - x_t| + |x_{t+1} - x_tau|.
M_t фиксируется в момент прихода x_{t+1} и считается по активному множеству до отсечения.
Затем из множества удаляются все классы, чей якорь x_tau лежит в замкнутом интервале между
x_t и x_{t+1} (их доминирует новый класс t), и добавляется класс t с якорем x_t.

При равенстве внутри M_t побеждает меньший tau, при выборе tau* в конце - больший.
"""
import logging
import math
from array import array
from collections.abc import Iterable

import numpy as np

from core.exceptions import ContractViolation, InvariantError
from models.series import LabelSequence, SampleSeries
from models.split import BackPointerTable, ClassState, SplitResult, StepTrace

logger = logging.getLogger(__name__)

BASE_TAU = 0
BASE_M = 0.0


class ActiveClassSet:
    """
    Выжившие классы, упорядоченные по якорю.

    Хранится в виде двух монотонных стеков относительно текущего отсчета x_t:
    нижний (якоря <= x_t, возрастают к вершине) и верхний (якоря > x_t, убывают к вершине).
    Обход "нижний снизу вверх, затем верхний сверху вниз" дает строго возрастающие якоря,
    а интервал [min(x_t, x_{t+1}), max(x_t, x_{t+1})] всегда снимается с вершин стеков.
    На вершинах лежат самые свежие классы.
    """
    __slots__ = ('_below_tau', '_below_m', '_below_anchor', '_above_tau', '_above_m', '_above_anchor')

    def __init__(self):
        self._below_tau: list[int] = []
        self._below_m: list[float] = []
        self._below_anchor: list[float] = []
        self._above_tau: list[int] = []
        self._above_m: list[float] = []
        self._above_anchor: list[float] = []

    def __len__(self) -> int:
        return len(self._below_tau) + len(self._above_tau)

    def classes(self) -> list[ClassState]:
        """Классы в порядке возрастания якоря"""
        below = [
            ClassState(tau=tau, m_value=m, anchor=anchor)
            for tau, m, anchor in zip(self._below_tau, self._below_m, self._below_anchor)
        ]
        above = [
            ClassState(tau=tau, m_value=m, anchor=anchor)
            for tau, m, anchor in zip(reversed(self._above_tau), reversed(self._above_m), reversed(self._above_anchor))
        ]
        return below + above

    def taus(self) -> list[int]:
        return sorted(self._below_tau + self._above_tau)

    def anchors(self) -> list[float]:
        return self._below_anchor + self._above_anchor[::-1]

    def insert(self, tau: int, m_value: float, anchor: float, x_next: float) -> None:
        """Добавление класса tau с якорем x_tau после наблюдения x_next = x_{tau+1}"""
        if anchor <= x_next:
            if self._below_anchor and self._below_anchor[-1] >= anchor:
                raise InvariantError(f'class {tau}: anchor {anchor} breaks the lower stack order')
            self._below_tau.append(tau)
            self._below_m.append(m_value)
            self._below_anchor.append(anchor)
        else:
            if self._above_anchor and self._above_anchor[-1] <= anchor:
                raise InvariantError(f'class {tau}: anchor {anchor} breaks the upper stack order')
            self._above_tau.append(tau)
            self._above_m.append(m_value)
            self._above_anchor.append(anchor)

    def eliminate(self, x_t: float, x_next: float, removed: list[ClassState] | None = None) -> int:
        """
        Удаление всех классов с якорем в [min(x_t, x_next), max(x_t, x_next)].
        :param removed: если передан, в него складываются удаленные классы
        :return: число удаленных классов
        """
        low, high = (x_t, x_next) if x_t <= x_next else (x_next, x_t)
        count = 0
        anchors = self._below_anchor
        while anchors and low <= anchors[-1] <= high:
            if removed is not None:
                removed.append(ClassState(tau=self._below_tau[-1], m_value=self._below_m[-1], anchor=anchors[-1]))
            anchors.pop()
            self._below_tau.pop()
            self._below_m.pop()
            count += 1
        anchors = self._above_anchor
        while anchors and low <= anchors[-1] <= high:
            if removed is not None:
                removed.append(ClassState(tau=self._above_tau[-1], m_value=self._above_m[-1], anchor=anchors[-1]))
            anchors.pop()
            self._above_tau.pop()
            self._above_m.pop()
            count += 1
        return count

    def best_candidate(self, x_t: float, x_next: float) -> tuple[float, int]:
        """
        Минимум M_tau + d_{t,tau} по базовому и активным классам; вызывается до eliminate.
        Линейный просмотр обоих стеков, при равенстве побеждает меньший tau.
        """
        step = abs(x_next - x_t)
        best_m, best_tau = BASE_M - step, BASE_TAU
        for taus, ms, anchors in ((self._below_tau, self._below_m, self._below_anchor),
                                  (self._above_tau, self._above_m, self._above_anchor)):
            if not taus:
                continue
            candidates = [m_value + abs(x_next - anchor) - step for m_value, anchor in zip(ms, anchors)]
            candidate = min(candidates)
            # Внутри стека tau растет к вершине: первое вхождение минимума - самый ранний класс.
            tau = taus[candidates.index(candidate)]
            if candidate < best_m or (candidate == best_m and tau < best_tau):
                best_m, best_tau = candidate, tau
        return best_m, best_tau

    def final_choice(self) -> tuple[float, int]:
        """tau* = argmin по базовому классу и активным классам, при равенстве больший tau"""
        best_m, best_tau = BASE_M, BASE_TAU
        for taus, ms in ((self._below_tau, self._below_m), (self._above_tau, self._above_m)):
            for tau, m_value in zip(taus, ms):
                if m_value < best_m or (m_value == best_m and tau > best_tau):
                    best_m, best_tau = m_value, tau
        return best_m, best_tau


class EnvelopeSplitter:
    """
    Потоковый оптимальный разделитель: отсчеты подаются по одному через push/step,
    finish выбирает tau* и восстанавливает метки по обратным указателям.
    Экземпляр не разделяет изменяемого состояния с другими экземплярами.
    """

    def __init__(self):
        self.active = ActiveClassSet()
        self._values = array('d')
        self._pointers = array('q')
        self._counts = array('q')
        self._drift = 0.0
        self._last: float | None = None

    def __len__(self) -> int:
        return len(self._values)

    @property
    def running_drift(self) -> float:
        """C_t: дрейф ряда без разделения, общий для всех классов"""
        return self._drift

    def push(self, x: float) -> None:
        self._advance(x, None)

    def step(self, x: float) -> StepTrace | None:
        """Как push, но возвращает подробности шага (для аудита); для первого отсчета None"""
        removed: list[ClassState] = []
        outcome = self._advance(x, removed)
        if outcome is None:
            return None
        m_value, tau = outcome
        return StepTrace(t=len(self._values) - 1, removed=removed, m_value=m_value, tau=tau,
                         survivors=len(self.active))

    def extend(self, values: Iterable[float]) -> None:
        for x in values:
            self._advance(x, None)

    def _advance(self, x: float, removed: list[ClassState] | None) -> tuple[float, int] | None:
        if not math.isfinite(x):
            raise ContractViolation(f'sample {len(self._values) + 1} is not finite: {x!r}')
        t = len(self._values)
        self._values.append(x)
        x_t = self._last
        self._last = x
        if x_t is None:
            return None

        active = self.active
        m_value, tau = active.best_candidate(x_t, x)
        active.eliminate(x_t, x, removed)
        active.insert(t, m_value, x_t, x)

        self._pointers.append(tau)
        self._counts.append(len(active))
        self._drift += abs(x - x_t)
        return m_value, tau

    def finish(self) -> SplitResult:
        size = len(self._values)
        if size == 0:
            raise ContractViolation('cannot split an empty series')

        final_m, tau_star = self.active.final_choice()
        pointers = np.frombuffer(self._pointers, dtype=np.int64) if self._pointers else np.zeros(0, np.int64)
        labels, chain = _backtrack(pointers, tau_star, size)
        values = np.frombuffer(self._values, dtype=np.float64)
        drift = _drift(values, labels)

        logger.debug('Split of %d samples: tau*=%d, drift=%.6g, survivors=%d',
                     size, tau_star, drift, len(self.active))
        return SplitResult(
            labels=LabelSequence(labels=labels.tolist()),
            total_drift=drift,
            final_tau=tau_star,
            final_m=final_m,
            survivor_counts=self._counts.tolist(),
            pointer_trace=chain,
            survivors=self.active.taus(),
            pointers=BackPointerTable(pointers=self._pointers.tolist()),
        )


def _drift(values: np.ndarray, labels: np.ndarray) -> float:
    total = 0.0
    for label in (0, 1):
        part = values[labels == label]
        if part.size > 1:
            total += float(np.abs(np.diff(part)).sum())
    return total


def _pointer_chain(pointers: np.ndarray, tau_star: int) -> list[int]:
    chain = [tau_star]
    tau = tau_star
    while tau != BASE_TAU:
        if tau > pointers.size:
            raise InvariantError(f'pointer index {tau} is outside the table of {pointers.size} entries')
        following = int(pointers[tau - 1])
        if not 0 <= following < tau:
            raise InvariantError(f'pointer at t={tau} is {following}, expected 0 <= pointer < {tau}')
        chain.append(following)
        tau = following
    return chain


def _backtrack(pointers: np.ndarray, tau_star: int, size: int) -> tuple[np.ndarray, list[int]]:
    if not 0 <= tau_star <= size - 1:
        raise ContractViolation(f'tau* must lie in [0, {size - 1}], got {tau_star}')
    chain = _pointer_chain(pointers, tau_star)
    labels = np.empty(size, dtype=np.int8)
    # Отсчеты (tau*, T] получают 1, далее метка чередуется на каждом переходе по указателю.
    end, label = size, 1
    for tau in chain:
        labels[tau:end] = label
        end, label = tau, 1 - label
    return labels, chain


def total_drift(series: SampleSeries, labels: LabelSequence) -> float:
    """Сумма L1-дрейфов подпоследовательностей с метками 1 и 0"""
    if len(labels) != len(series):
        raise ContractViolation(f'labels length {len(labels)} does not match series length {len(series)}')
    return _drift(series.array, labels.array)


def backtrack_labels(pointers: BackPointerTable, tau_star: int, size: int) -> LabelSequence:
    """
    Восстановление меток по обратным указателям.
    Последний блок (tau*, T] получает метку 1, далее метки чередуются до индекса 0.
    """
    if len(pointers) != max(size - 1, 0):
        raise ContractViolation(f'pointer table has {len(pointers)} entries, expected {max(size - 1, 0)}')
    labels, _ = _backtrack(np.asarray(pointers.pointers, dtype=np.int64), tau_star, size)
    return LabelSequence(labels=labels.tolist())


def eliminate_by_step(active: ActiveClassSet, x_t: float, x_next: float) -> ActiveClassSet:
    """Интервальное отсечение одного шага; множество меняется на месте и возвращается"""
    active.eliminate(x_t, x_next)
    return active


def trimmed_split(series: SampleSeries) -> SplitResult:
    """Оптимальное разделение ряда с отсечением классов"""
    splitter = EnvelopeSplitter()
    splitter.extend(series.values)
    return splitter.finish()


def survivor_set(series: SampleSeries) -> set[int]:
    """Индексы классов, активных после обработки всего ряда"""
    if len(series) < 2:
        raise ContractViolation('survivor set needs at least two samples')
    splitter = EnvelopeSplitter()
    splitter.extend(series.values)
    return set(splitter.active.taus())
