import csv
import io
import logging
import sys
from pathlib import Path
from typing import TextIO

from core.exceptions import ContractViolation, DataParseError
from models.bench import ForkTree
from models.series import LabelSequence, SampleSeries
from models.split import EnvelopePair, SplitResult
from storage.series import format_float, read_text

logger = logging.getLogger(__name__)

SPLIT_HEADER = ['t', 'x', 'label', 'upper', 'lower', 'upper_defined', 'lower_defined']
BANDS_HEADER = ['path', 't', 'upper', 'lower', 'upper_defined', 'lower_defined']
ROOT_PATH = 'root'


def _envelope_cells(pair: EnvelopePair, index: int) -> list[str | int]:
    if pair.lower is None:
        lower, lower_defined = '', ''
    else:
        lower, lower_defined = format_float(pair.lower[index]), int(pair.defined_lower[index])
    return [format_float(pair.upper[index]), lower, int(pair.defined_upper[index]), lower_defined]


def _samples(pair: EnvelopePair) -> list[float]:
    if pair.lower is None:
        return list(pair.upper)
    return [upper if defined else lower for upper, lower, defined in zip(pair.upper, pair.lower, pair.defined_upper)]


def split_summary(result: SplitResult) -> str:
    return f'total_drift={format_float(result.total_drift)} final_survivors={result.final_survivors}'


def emit_split(result: SplitResult, pair: EnvelopePair, path: Path | str, stream: TextIO | None = None) -> None:
    """
    Запись разделения в CSV и итоговой строки в stdout.
    Столбцы *_defined равны 1 там, где огибающая проходит через исходный отсчет, 0 там, где она интерполирована.
    Значение x берется из той огибающей, которая определена в данной точке.
    """
    if len(pair.timestamps) != len(result.labels):
        raise ContractViolation(
            f'envelopes cover {len(pair.timestamps)} samples, labels cover {len(result.labels)}'
        )
    if pair.lower is None:
        logger.warning('Lower envelope is absent, lower columns are left empty')

    with open(path, 'w', encoding='utf-8', newline='') as csv_file:
        writer = csv.writer(csv_file, lineterminator='\n')
        writer.writerow(SPLIT_HEADER)
        for index, (t, x, label) in enumerate(zip(pair.timestamps, _samples(pair), result.labels.labels)):
            writer.writerow([format_float(t), format_float(x), label, *_envelope_cells(pair, index)])

    logger.info('Wrote split of %d samples to %s', len(pair.timestamps), path)
    print(split_summary(result), file=stream or sys.stdout)


def read_split(path: Path | str) -> tuple[SampleSeries, LabelSequence]:
    """Чтение CSV, записанного emit_split: ряд на исходной сетке и метки"""
    values, timestamps, labels = [], [], []
    reader = csv.DictReader(io.StringIO(read_text(Path(path)), newline=''))
    if reader.fieldnames is None or not {'t', 'x', 'label'} <= set(reader.fieldnames):
        raise DataParseError(f'expected columns t, x, label, got {reader.fieldnames}', path=str(path), line=1)
    for row in reader:
        try:
            timestamps.append(float(row['t']))
            values.append(float(row['x']))
            labels.append(int(row['label']))
        except (TypeError, ValueError) as error:
            raise DataParseError(str(error), path=str(path), line=reader.line_num) from None

    if not values:
        raise DataParseError('no samples found', path=str(path), line=1)
    return SampleSeries(values=values, timestamps=timestamps), LabelSequence(labels=labels)


def emit_bands(tree: ForkTree, path: Path | str) -> None:
    """CSV со всеми огибающими иерархического разделения, по узлам в порядке уровней"""
    nodes = tree.split_nodes()
    with open(path, 'w', encoding='utf-8', newline='') as csv_file:
        writer = csv.writer(csv_file, lineterminator='\n')
        writer.writerow(BANDS_HEADER)
        for node in nodes:
            pair = node.envelopes
            for index, t in enumerate(pair.timestamps):
                writer.writerow([node.path or ROOT_PATH, format_float(t), *_envelope_cells(pair, index)])
    logger.info('Wrote %d band pairs to %s', len(nodes), path)
