"""
Точные, но медленные решатели, используемые как эталон:
полный перебор разметок и квадратичная динамика по таблице L_{t,tau} без отсечения.
"""
import logging
import math
from itertools import product

import numpy as np

from core.config import oracle_settings, splitter_settings
from core.exceptions import ContractViolation, InvariantError, OracleRefusal
from models.series import LabelSequence, SampleSeries
from models.split import OracleResult
from services.splitter import EnvelopeSplitter, _backtrack, _drift

logger = logging.getLogger(__name__)


def brute_force_split(series: SampleSeries, max_length: int | None = None) -> OracleResult:
    """Перебор всех 2^(T-1) канонических разметок (первый отсчет помечен единицей)"""
    max_length = max_length or oracle_settings.brute_force_max_length
    size = len(series)
    if size > max_length:
        raise OracleRefusal(f'brute force refuses T={size} (limit {max_length})')

    values = series.array
    best_loss, best = math.inf, []
    for tail in product((1, 0), repeat=size - 1):
        labels = np.array((1, *tail), dtype=np.int8)
        loss = _drift(values, labels)
        if loss < best_loss:
            best_loss, best = loss, [labels]
        elif loss == best_loss:
            best.append(labels)
    return OracleResult(
        best_loss=best_loss,
        optimal_labelings=[LabelSequence(labels=labels.tolist()) for labels in best],
    )


class QuadraticSplitter:
    """
    Полная таблица L_{t,tau}, tau = 0..t-1, без отсечения классов.
        L_{t+1,tau} = L_{t,tau} + |x_{t+1} - x_t|,                       tau < t
        L_{t+1,t} = min(L_{t,0}, min_{1<=tau<t}(L_{t,tau} + |x_{t+1} - x_tau|))
    Строка хранится в массиве numpy, argmin на каждом шаге запоминается.
    """

    def __init__(self, capacity: int, keep_table: bool = False):
        self._row = np.zeros(capacity, dtype=np.float64)
        self._values = np.zeros(capacity, dtype=np.float64)
        self._pointers = np.zeros(max(capacity - 1, 0), dtype=np.int64)
        self._size = 0
        self._drift = 0.0
        self.table: list[list[float]] | None = [] if keep_table else None

    def __len__(self) -> int:
        return self._size

    @property
    def running_drift(self) -> float:
        return self._drift

    @property
    def row(self) -> np.ndarray:
        """L_{t,tau} для tau = 0..t-1"""
        return self._row[:self._size]

    def push(self, x: float) -> tuple[float, int] | None:
        """
        Наблюдение x_{t+1}.
        :return: нормированное значение M_t = L_{t+1,t} - C_{t+1} и argmin tau_t; None для первого отсчета
        """
        if self._size == self._row.size:
            raise ContractViolation(f'quadratic splitter capacity {self._row.size} exceeded')
        t = self._size
        self._values[t] = x
        self._size = t + 1
        if t == 0:
            self._record()
            return None

        row, values = self._row, self._values
        # Кандидаты: базовый класс без штрафа и классы 1..t-1 со стоимостью перехода к x_tau.
        candidates = np.empty(t, dtype=np.float64)
        candidates[0] = row[0]
        candidates[1:] = row[1:t] + np.abs(x - values[:t - 1])
        # Первое вхождение минимума: при равенстве побеждает меньший tau, как в отсекающем решателе.
        tau = int(np.argmin(candidates))
        best = float(candidates[tau])

        step = abs(x - values[t - 1])
        row[:t] += step
        row[t] = best
        self._pointers[t - 1] = tau
        self._drift += step
        self._record()
        return best - self._drift, tau

    def _record(self) -> None:
        if self.table is not None:
            self.table.append(self.row.tolist())

    def finish(self) -> OracleResult:
        if self._size == 0:
            raise ContractViolation('cannot split an empty series')
        row = self.row
        tau_star = self._size - 1 - int(np.argmin(row[::-1]))
        labels, _ = _backtrack(self._pointers[:self._size - 1], tau_star, self._size)
        loss = _drift(self._values[:self._size], labels)
        return OracleResult(
            best_loss=loss,
            optimal_labelings=[LabelSequence(labels=labels.tolist())],
            table_snapshot=self.table,
        )


def quadratic_split(series: SampleSeries, keep_table: bool | None = None,
                    max_length: int | None = None) -> OracleResult:
    """Квадратичная динамика без отсечения"""
    max_length = max_length or oracle_settings.quadratic_max_length
    size = len(series)
    if size > max_length:
        raise OracleRefusal(f'quadratic solver refuses T={size} (limit {max_length})')
    if keep_table is None:
        keep_table = size <= oracle_settings.table_snapshot_max_length

    solver = QuadraticSplitter(size, keep_table=keep_table)
    for x in series.values:
        solver.push(x)
    return solver.finish()


def _close(first: float, second: float, scale: float, rel_tolerance: float) -> bool:
    return math.isclose(first, second, rel_tol=rel_tolerance, abs_tol=rel_tolerance * max(1.0, scale))


def elimination_safety_audit(series: SampleSeries, max_length: int | None = None,
                             rel_tolerance: float | None = None) -> bool:
    """
    Прогон квадратичного и отсекающего решателей в ногу.
    На каждом шаге проверяется, что
      (a) каждый класс tau1, удаленный интервальным правилом, доминируется выжившим tau2:
          M_{tau1} >= M_{tau2} + |x_{tau2} - x_{tau1}|;
      (b) значения M_t обоих решателей совпадают.
    :raises InvariantError: с описанием первого проблемного шага
    """
    max_length = max_length or oracle_settings.audit_max_length
    rel_tolerance = rel_tolerance or splitter_settings.rel_tolerance
    size = len(series)
    if size > max_length:
        raise OracleRefusal(f'audit refuses T={size} (limit {max_length})')

    trimmed = EnvelopeSplitter()
    full = QuadraticSplitter(size)
    for x in series.values:
        trace = trimmed.step(x)
        reference = full.push(x)
        if trace is None:
            continue

        scale = full.running_drift
        m_full, _ = reference
        if not _close(trace.m_value, m_full, scale, rel_tolerance):
            raise InvariantError(
                f'step t={trace.t}: trimmed M_t={trace.m_value!r} differs from quadratic M_t={m_full!r}'
            )

        # Выжившие после шага: новый класс t и оставшиеся активные классы.
        dominators = trimmed.active.classes()
        for victim in trace.removed:
            dominated = any(
                victim.m_value + rel_tolerance * max(1.0, scale)
                >= other.m_value + abs(other.anchor - victim.anchor)
                for other in dominators
            )
            if not dominated:
                raise InvariantError(
                    f'step t={trace.t}: eliminated class tau={victim.tau} (M={victim.m_value!r}, '
                    f'anchor={victim.anchor!r}) is not dominated by any surviving class'
                )

    logger.debug('Elimination audit passed for %d samples', size)
    return True


def record_survivors(series: SampleSeries) -> set[int]:
    """
    Прямая характеристика выживших классов: строгие рекорды справа налево среди t <= T-2
    (x_t строго больше или строго меньше всех последующих отсчетов) и класс T-1.
    """
    values = series.array
    size = values.size
    if size < 2:
        raise ContractViolation('survivor set needs at least two samples')
    # Максимум и минимум суффикса x_{t+1..T} для каждого t.
    suffix_max = np.maximum.accumulate(values[::-1])[::-1]
    suffix_min = np.minimum.accumulate(values[::-1])[::-1]
    head = values[:-1]
    records = (head > suffix_max[1:]) | (head < suffix_min[1:])
    survivors = {int(i) + 1 for i in np.flatnonzero(records[:-1])}
    survivors.add(size - 1)
    return survivors
