"""
Перепись выживших классов методом Монте-Карло и проверка законов роста.

Прогоны независимы, зерно каждого выводится из (seed, T, trial). Результаты проходят
через конвейер сопрограмм (накопление статистики -> запись JSONL) строго в порядке прогонов,
поэтому вывод не зависит от числа воркеров.
"""
import logging
import math
import time
from collections.abc import Generator, Iterator
from concurrent.futures import ProcessPoolExecutor
from functools import wraps
from typing import BinaryIO

import numpy as np
import orjson

from core.config import bench_settings
from core.exceptions import ContractViolation, InvariantError
from models.bench import (BallotBin, BallotReport, GrowthFit, GrowthLaw, GrowthRow, SizeSummary, SurvivorStats,
                          TrialOutcome, TrialRecord)
from models.process import ProcessFamily
from services.generators import derive_seed, generate
from services.oracles import record_survivors
from services.splitter import trimmed_split

logger = logging.getLogger(__name__)


def coroutine(func):
    @wraps(func)
    def inner(*args, **kwargs):
        fn = func(*args, **kwargs)
        next(fn)
        return fn

    return inner


def expected_iid_survivors(length: int) -> float:
    """Сумма 2 / (tau + 1) по возрастам 1..T-1, то есть 2(H_T - 1), прямым суммированием"""
    ages = np.arange(1, length, dtype=np.float64)
    return float(np.sum(2.0 / (ages + 1.0)))


def _run_trial(family: ProcessFamily, length: int, trial: int, seed: int,
               timing: bool, audit: bool) -> TrialOutcome:
    trial_seed = derive_seed(seed, length, trial)
    series = generate(family.with_length(length, trial_seed))

    started = time.perf_counter_ns()
    result = trimmed_split(series)
    runtime = time.perf_counter_ns() - started if timing else None

    if audit and set(result.survivors) != record_survivors(series):
        raise InvariantError(f'{family.label} T={length} trial={trial}: survivors differ from the record scan')

    record = TrialRecord(
        process=family.label,
        params=family.params(),
        T=length,
        trial=trial,
        seed=trial_seed,
        final_survivors=result.final_survivors,
        runtime_ns=runtime,
    )
    return TrialOutcome(record=record, ages=[length - tau for tau in result.survivors])


def _run_trial_packed(task: tuple) -> TrialOutcome:
    return _run_trial(*task)


def _iter_outcomes(family: ProcessFamily, sizes: list[int], trials: int, seed: int,
                   timing: bool, audit: bool, workers: int) -> Iterator[TrialOutcome]:
    tasks = ((family, length, trial, seed, timing, audit) for length in sizes for trial in range(trials))
    if workers <= 1:
        yield from map(_run_trial_packed, tasks)
        return
    # map сохраняет порядок задач, так что свертка ниже идет в порядке прогонов.
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(_run_trial_packed, tasks, chunksize=max(1, trials // (4 * workers)))


class CensusAccumulator:
    """Последовательная свертка результатов прогонов"""

    def __init__(self, sizes: list[int]):
        self.counts: dict[int, list[int]] = {length: [] for length in sizes}
        self.by_age: dict[int, np.ndarray] = {length: np.zeros(max(length - 1, 0), dtype=np.int64)
                                              for length in sizes}

    def add(self, outcome: TrialOutcome) -> None:
        length = outcome.record.T
        self.counts[length].append(outcome.record.final_survivors)
        if outcome.ages:
            self.by_age[length][np.asarray(outcome.ages) - 1] += 1

    def summaries(self) -> dict[int, SizeSummary]:
        summaries = {}
        for length, counts in self.counts.items():
            values = np.asarray(counts, dtype=np.float64)
            variance = float(values.var(ddof=1)) if values.size > 1 else 0.0
            summaries[length] = SizeSummary(
                length=length,
                trials=values.size,
                mean=float(values.mean()),
                std_error=math.sqrt(variance / values.size),
                variance=variance,
            )
        return summaries


@coroutine
def aggregate(accumulator: CensusAccumulator, next_step: Generator) -> Generator[None, TrialOutcome, None]:
    """
    Накопление статистики по прогонам
    :param accumulator: объект свертки
    :param next_step: Генератор, используемый на следующем шагу обработки
    :return: Генератор, принимающий на вход результаты прогонов
    """
    while outcome := (yield):
        accumulator.add(outcome)
        next_step.send(outcome)


@coroutine
def save_records(sink: BinaryIO | None) -> Generator[None, TrialOutcome, None]:
    """
    Запись строк JSONL
    :param sink: Бинарный поток для записи; None - записи отбрасываются
    :return: Генератор, принимающий на вход результаты прогонов
    """
    while outcome := (yield):
        if sink is not None:
            sink.write(orjson.dumps(outcome.record.model_dump()) + b'\n')


def survivor_census(family: ProcessFamily, sizes: list[int], trials: int, seed: int, *,
                    sink: BinaryIO | None = None, timing: bool | None = None,
                    audit: bool = False, workers: int | None = None) -> SurvivorStats:
    """
    Перепись числа выживших классов и частот выживания по возрастам.
    :param family: семейство процессов (длина и зерно задаются прогоном)
    :param sink: поток для записей JSONL
    :param audit: сверять выживших с прямой характеристикой рекордов на каждом прогоне
    """
    if trials < 1:
        raise ContractViolation(f'trials must be positive, got {trials}')
    if not sizes or min(sizes) < 2:
        raise ContractViolation(f'sizes must be at least 2, got {sizes}')
    sizes = sorted(set(sizes))
    timing = bench_settings.record_timing if timing is None else timing
    workers = workers or bench_settings.workers

    accumulator = CensusAccumulator(sizes)
    pipeline = aggregate(accumulator, save_records(sink))
    current = None
    for outcome in _iter_outcomes(family, sizes, trials, seed, timing, audit, workers):
        if outcome.record.T != current:
            current = outcome.record.T
            logger.info('Census %s: T=%d, %d trials', family.label, current, trials)
        pipeline.send(outcome)
    pipeline.close()

    return SurvivorStats(
        family=family,
        seed=seed,
        trials=trials,
        summaries=accumulator.summaries(),
        survived_by_age={length: counts.tolist() for length, counts in accumulator.by_age.items()},
    )


def growth_fit(stats: SurvivorStats, law: GrowthLaw, *, iid_tolerance: float | None = None,
               sqrt_ratio_window: tuple[float, float] | None = None,
               constant_tolerance: float | None = None) -> GrowthFit:
    """
    Проверка закона роста среднего числа выживших:
      log      - среднее при каждом T в пределах допуска от 2(H_T - 1);
      sqrt     - mean(T_max) / mean(T_min) в окне, отнесенном к sqrt(T_max / T_min) / 2;
      constant - mean(T_max) в пределах допуска от mean(T_min).
    """
    sizes = stats.sizes
    if len(sizes) < 3 or sizes[-1] < 4 * sizes[0]:
        raise ContractViolation(f'growth fit needs >= 3 sizes spanning a factor of 4, got {sizes}')
    iid_tolerance = iid_tolerance or bench_settings.iid_tolerance
    low, high = sqrt_ratio_window or bench_settings.sqrt_ratio_window
    constant_tolerance = constant_tolerance or bench_settings.constant_tolerance

    means = np.array([stats.summaries[length].mean for length in sizes])
    match law:
        case 'log':
            shape = np.array([expected_iid_survivors(length) for length in sizes])
        case 'sqrt':
            shape = np.sqrt(np.asarray(sizes, dtype=np.float64))
        case 'constant':
            shape = np.ones(len(sizes))
        case _:
            raise ContractViolation(f'unknown growth law {law!r}')

    rows = [GrowthRow(length=length, mean=mean, reference=ref, ratio=mean / ref)
            for length, mean, ref in zip(sizes, means.tolist(), shape.tolist())]
    coefficient = float(np.dot(means, shape) / np.dot(shape, shape))
    bound = within_bound = None

    match law:
        case 'log':
            worst = max(abs(row.ratio - 1.0) for row in rows)
            passed = worst <= iid_tolerance
            detail = f'max relative deviation from 2(H_T - 1) is {worst:.3f} (tolerance {iid_tolerance})'
        case 'sqrt':
            ratio = means[-1] / means[0]
            expected = math.sqrt(sizes[-1] / sizes[0])
            passed = low / 2 <= ratio / expected <= high / 2
            detail = (f'mean({sizes[-1]}) / mean({sizes[0]}) = {ratio:.3f}, '
                      f'window [{low * expected / 2:.3f}, {high * expected / 2:.3f}]')
        case _:
            drift = means[-1] / means[0] - 1.0
            passed = abs(drift) <= constant_tolerance
            detail = f'mean({sizes[-1]}) differs from mean({sizes[0]}) by {drift:+.3f} (tolerance {constant_tolerance})'
            family = stats.family
            if family.kind == 'record_renewal' and family.p > 0 and family.q > 0:
                bound = 1.0 / family.p + 1.0 / family.q
                within_bound = bool(means[-1] <= bound)

    if not passed:
        logger.warning('Growth law %s failed for %s: %s', law, stats.family.label, detail)
    return GrowthFit(law=law, coefficient=coefficient, rows=rows, passed=bool(passed), detail=detail,
                     bound=bound, within_bound=within_bound)


def wilson_interval(successes: int, trials: int, z: float) -> tuple[float, float]:
    """Доверительный интервал Уилсона для биномиальной доли"""
    frequency = successes / trials
    denominator = 1 + z * z / trials
    centre = (frequency + z * z / (2 * trials)) / denominator
    spread = z * math.sqrt(frequency * (1 - frequency) / trials + z * z / (4 * trials * trials)) / denominator
    return centre - spread, centre + spread


def ballot_check(trials: int, length: int, seed: int, *, ages: list[int] | None = None,
                 sigma: float | None = None, min_bin_trials: int | None = None) -> BallotReport:
    """
    Сравнение частоты выживания класса возраста a = T - t в простом блуждании
    с долей |x_T - x_t| / a из теоремы о баллотировке, по корзинам (a, |x_T - x_t|).
    """
    if length < 8:
        raise ContractViolation(f'ballot check needs T >= 8, got {length}')
    if trials < 1:
        raise ContractViolation(f'trials must be positive, got {trials}')
    sigma = sigma or bench_settings.sigma
    min_bin_trials = min_bin_trials or bench_settings.min_bin_trials
    ages = sorted(set(ages or [2 ** k for k in range(int(math.log2(length - 1)) + 1)]))
    if ages[0] < 1 or ages[-1] > length - 1:
        raise ContractViolation(f'ages must lie in [1, {length - 1}], got {ages}')

    family = ProcessFamily(kind='simple_walk')
    totals: dict[tuple[int, int], list[int]] = {}
    for trial in range(trials):
        series = generate(family.with_length(length, derive_seed(seed, length, trial)))
        survivors = set(trimmed_split(series).survivors)
        values = series.values
        for age in ages:
            t = length - age
            distance = int(round(abs(values[-1] - values[t - 1])))
            counter = totals.setdefault((age, distance), [0, 0])
            counter[0] += 1
            counter[1] += t in survivors

    bins = []
    for (age, distance), (count, survived) in sorted(totals.items()):
        expected = distance / age
        if expected in (0.0, 1.0):
            # Крайние случаи детерминированы: строгий монотонный участок или возврат в x_t.
            lower = upper = expected
            passed = survived == count * expected
        elif count < min_bin_trials:
            lower, upper = wilson_interval(survived, count, sigma)
            passed = None
        else:
            lower, upper = wilson_interval(survived, count, sigma)
            passed = lower <= expected <= upper
        bins.append(BallotBin(age=age, distance=distance, trials=count, survived=survived,
                              expected=expected, lower=lower, upper=upper, passed=passed))

    passed = all(item.passed is not False for item in bins)
    if not passed:
        logger.warning('Ballot check failed for T=%d: %d bins outside the interval',
                       length, sum(item.passed is False for item in bins))
    return BallotReport(length=length, trials=trials, seed=seed, bins=bins, passed=passed)
