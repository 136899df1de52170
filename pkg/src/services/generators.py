"""
Синтетические процессы для проверки законов роста числа выживших классов.

Генератор случайных чисел зафиксирован: numpy.random.Generator поверх PCG64
(перестановочный конгруэнтный генератор со 128-битным состоянием). Зерно каждого
прогона выводится из SeedSequence, поэтому одинаковая ProcessSpec дает побитово
одинаковый ряд на любой платформе при одной версии numpy.
"""
import logging
import math
from collections.abc import Callable

import numpy as np
from scipy.special import ndtri

from core.exceptions import ContractViolation
from models.process import ProcessSpec
from models.series import SampleSeries

logger = logging.getLogger(__name__)

Quantile = Callable[[np.ndarray], np.ndarray]

_MANTISSA = 2 ** 53

QUANTILES: dict[str, Quantile] = {
    'normal': ndtri,
    'exponential': lambda u: -np.log1p(-u),
    'uniform': lambda u: u,
}


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def derive_seed(seed: int, *keys: int) -> int:
    """Детерминированное 64-битное зерно для пары (размер, номер прогона) и т.п."""
    state = np.random.SeedSequence([seed, *keys]).generate_state(1, dtype=np.uint64)
    return int(state[0])


def open_unit(rng: np.random.Generator, size: int) -> np.ndarray:
    """Равномерные числа строго внутри (0, 1)"""
    return (rng.integers(0, _MANTISSA, size=size, dtype=np.int64) + 0.5) / _MANTISSA


def quantile_standard_normal(u: float) -> float:
    """Обратная функция стандартного нормального распределения"""
    if not (math.isfinite(u) and 0.0 < u < 1.0):
        raise ContractViolation(f'quantile argument must lie in (0, 1), got {u!r}')
    return float(ndtri(u))


def _record_renewal(rng: np.random.Generator, length: int, p: float, q: float) -> np.ndarray:
    values = np.zeros(length, dtype=np.float64)
    if length == 1:
        return values
    choice = rng.random(length).tolist()
    gaps = rng.exponential(1.0, length).tolist()
    inside = open_unit(rng, length).tolist()

    high = low = 0.0
    # Второй отсчет: новый максимум с вероятностью p / (p + q), иначе новый минимум.
    if choice[1] < (p / (p + q) if p + q > 0 else 0.5):
        high = values[1] = high + gaps[1]
    else:
        low = values[1] = low - gaps[1]

    for t in range(2, length):
        if choice[t] < p:
            high = high + gaps[t]
            values[t] = high
        elif choice[t] < p + q:
            low = low - gaps[t]
            values[t] = low
        else:
            values[t] = low + (high - low) * inside[t]
    return values


def generate(spec: ProcessSpec, quantile: Quantile | None = None) -> SampleSeries:
    """
    Ряд по спецификации процесса.
    :param quantile: своя обратная функция распределения для iid_with_cdf (векторизованная)
    """
    rng = make_rng(spec.seed)
    length = spec.length

    match spec.kind:
        case 'uniform_iid':
            values = rng.random(length)
        case 'iid_with_cdf':
            values = (quantile or QUANTILES[spec.distribution])(open_unit(rng, length))
        case 'simple_walk':
            steps = (rng.integers(0, 2, size=length - 1) * 2 - 1) * spec.step
            values = np.concatenate(([0.0], np.cumsum(steps)))
        case 'general_walk':
            steps = rng.normal(0.0, spec.step, size=length - 1)
            values = np.concatenate(([0.0], np.cumsum(steps)))
        case 'record_renewal':
            values = _record_renewal(rng, length, spec.p, spec.q)
        case _:
            raise ContractViolation(f'unknown process kind {spec.kind!r}')

    values = np.asarray(values, dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise ContractViolation(f'{spec.kind} produced non-finite samples')
    return SampleSeries.from_values(values)
