import contextlib
import logging

from models.bench import GrowthLaw
from models.run import RunConfig
from services.bench import ballot_check, growth_fit, survivor_census
from storage.series import format_float

logger = logging.getLogger(__name__)

# Ожидаемый закон роста числа выживших для каждого процесса
GROWTH_LAWS: dict[str, GrowthLaw] = {
    'uniform': 'log',
    'normal': 'log',
    'expo': 'log',
    'walk': 'sqrt',
    'gwalk': 'sqrt',
    'records': 'constant',
}


def _status(passed: bool | None) -> str:
    return 'PASS' if passed else 'FAIL'


def run(config: RunConfig) -> None:
    """
    Перепись выживших классов, проверка закона роста и, для простого блуждания, теоремы о баллотировке.
    Записи прогонов пишутся в --output как JSONL.
    """
    family = config.family
    sizes = sorted(set(config.sizes))
    with contextlib.ExitStack() as stack:
        sink = stack.enter_context(open(config.output, 'wb')) if config.output else None
        stats = survivor_census(family, sizes, config.trials, config.seed, sink=sink, timing=config.timing,
                                audit=config.audit, workers=config.workers)

    for length, (mean, std_error) in stats.mean_final_survivors().items():
        print(f'{family.label} T={length} mean={format_float(mean)} se={format_float(std_error)}')

    law = GROWTH_LAWS[config.process]
    if len(sizes) >= 3 and sizes[-1] >= 4 * sizes[0]:
        fit = growth_fit(stats, law)
        print(f'{law} law {_status(fit.passed)}: {fit.detail}')
        if fit.bound is not None:
            print(f'record bound {format_float(fit.bound)} {_status(fit.within_bound)}')
    else:
        logger.warning('Growth law check skipped: needs >= 3 sizes spanning a factor of 4, got %s', sizes)

    if config.process == 'walk' and sizes[0] >= 8:
        report = ballot_check(config.trials, sizes[0], config.seed)
        print(f'ballot T={report.length} {_status(report.passed)}: {len(report.bins)} bins')
