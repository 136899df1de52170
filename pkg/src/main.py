import argparse
import logging
import sys
from collections.abc import Callable

from pydantic import ValidationError

from cli import bands, bench, generate, plot, split
from core.config import project_settings
from core.exceptions import ContractViolation, DataParseError, InvariantError
from models.run import RunConfig

logger = logging.getLogger(project_settings.name)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INVARIANT = 3

# Обработчики подкоманд
HANDLERS: dict[str, Callable[[RunConfig], None]] = {
    'split': split.run,
    'bands': bands.run,
    'gen': generate.run,
    'bench': bench.run,
    'plot': plot.run,
}


class UsageParser(argparse.ArgumentParser):
    """argparse завершает работу с кодом 2, а он занят ошибками данных"""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f'{self.prog}: error: {message}\n')


def build_parser() -> argparse.ArgumentParser:
    parser = UsageParser(
        prog=project_settings.name,
        description='Оптимальное разделение временного ряда на верхнюю и нижнюю огибающие',
    )
    parser.add_argument('subcommand', choices=list(HANDLERS))
    parser.add_argument('--input', help='входной ряд: csv (t,value или один столбец) или json')
    parser.add_argument('--output', help='файл результата (csv, svg или jsonl для bench)')
    parser.add_argument('--format', choices=['csv', 'json'], help='формат ряда; по умолчанию по расширению')
    parser.add_argument('--interp', choices=['hold', 'linear'], help='интерполяция огибающих')
    parser.add_argument('--depth', type=int, help='глубина иерархических полос (bands, plot)')
    parser.add_argument('--process', choices=['uniform', 'normal', 'expo', 'walk', 'gwalk', 'records'])
    parser.add_argument('--T', type=int, dest='T', help='длина синтетического ряда')
    parser.add_argument('--seed', type=int)
    parser.add_argument('--p', type=float, help='вероятность нового максимума (records)')
    parser.add_argument('--q', type=float, help='вероятность нового минимума (records)')
    parser.add_argument('--trials', type=int, help='число прогонов на размер (bench)')
    parser.add_argument('--sizes', help='размеры через запятую, например 1024,2048,4096 (bench)')
    parser.add_argument('--timing', action='store_true', default=None, help='записывать runtime_ns (bench)')
    parser.add_argument('--audit', action='store_true', default=None,
                        help='сверять выживших с прямым подсчетом рекордов (bench)')
    parser.add_argument('--workers', type=int, help='число процессов для прогонов (bench)')
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.getLogger().setLevel(project_settings.log_level.upper())
    arguments = vars(build_parser().parse_args(argv))
    try:
        config = RunConfig(**{name: value for name, value in arguments.items() if value is not None})
    except ValidationError as error:
        print(f'{project_settings.name}: usage error: {error}', file=sys.stderr)
        return EXIT_USAGE

    try:
        HANDLERS[config.subcommand](config)
    except InvariantError:
        logger.exception('Internal invariant failed')
        return EXIT_INVARIANT
    except (DataParseError, ValidationError, ContractViolation, OSError) as error:
        logger.error('%s failed: %s', config.subcommand, error)
        return EXIT_DATA
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
