import abc
import csv
import io
import logging
import math
from collections.abc import Iterator
from pathlib import Path
from typing import Literal

import orjson
from pydantic import ValidationError

from core.config import output_settings
from core.exceptions import DataParseError
from models.series import SampleSeries

logger = logging.getLogger(__name__)

SeriesFormat = Literal['csv', 'json']

TIME_COLUMNS = ('t', 'time', 'timestamp')
VALUE_COLUMNS = ('value', 'x')


def format_float(value: float) -> str:
    return format(value, output_settings.float_format)


def detect_format(path: Path, series_format: SeriesFormat | None = None) -> SeriesFormat:
    """Явно заданный формат или формат по расширению файла (.json, иначе csv)"""
    if series_format is not None:
        return series_format
    return 'json' if Path(path).suffix.lower() == '.json' else 'csv'


def _parse_number(cell: str, path: Path, line: int) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise DataParseError(f'non-numeric cell {cell!r}', path=str(path), line=line) from None
    if not math.isfinite(value):
        raise DataParseError(f'non-finite cell {cell!r}', path=str(path), line=line)
    return value


def read_text(path: Path) -> str:
    """Содержимое файла в UTF-8; недекодируемый байт сообщается с номером строки"""
    with open(path, 'rb') as text_file:
        content = text_file.read()
    try:
        return content.decode('utf-8')
    except UnicodeDecodeError as error:
        line = content.count(b'\n', 0, error.start) + 1
        raise DataParseError(f'invalid UTF-8 byte 0x{content[error.start]:02x}', path=str(path), line=line) from None


def read_rows(path: Path) -> Iterator[tuple[int, list[str]]]:
    """Строки CSV вместе с номерами строк файла"""
    reader = csv.reader(io.StringIO(read_text(path), newline=''))
    try:
        for row in reader:
            yield reader.line_num, row
    except csv.Error as error:
        raise DataParseError(f'malformed CSV: {error}', path=str(path), line=reader.line_num) from None


def _build_series(values: list[float], timestamps: list[float] | None, lines: list[int], path: Path) -> SampleSeries:
    if not values:
        raise DataParseError('no samples found', path=str(path), line=lines[0] if lines else 1)
    if timestamps is not None:
        for index in range(1, len(timestamps)):
            if timestamps[index] <= timestamps[index - 1]:
                raise DataParseError(
                    f'timestamp {timestamps[index]!r} does not increase after {timestamps[index - 1]!r}',
                    path=str(path), line=lines[index],
                )
    try:
        return SampleSeries(values=values, timestamps=timestamps)
    except ValidationError as error:
        raise DataParseError(str(error), path=str(path)) from error


class BaseSeriesStorage:
    @abc.abstractmethod
    def load(self, path: Path) -> SampleSeries:
        ...

    @abc.abstractmethod
    def save(self, series: SampleSeries, path: Path) -> None:
        ...


class CsvSeriesStorage(BaseSeriesStorage):
    """
    Ряд в CSV: один столбец значений или пара t,value.
    Заголовок определяется автоматически: строка с нечисловой ячейкой в начале файла.
    С заголовком допускаются лишние столбцы, значения берутся из value (или x), время из t.
    """

    @staticmethod
    def _columns(header: list[str] | None, width: int, path: Path, line: int) -> tuple[int | None, int]:
        if header is None:
            match width:
                case 1:
                    return None, 0
                case 2:
                    return 0, 1
                case _:
                    raise DataParseError(f'{width} columns without a header', path=str(path), line=line)

        names = [name.strip().lower() for name in header]
        time_index = next((names.index(name) for name in TIME_COLUMNS if name in names), None)
        value_index = next((names.index(name) for name in VALUE_COLUMNS if name in names), None)
        if value_index is not None:
            return time_index, value_index
        match len(names):
            case 1:
                return None, 0
            case 2:
                return 0, 1
            case _:
                raise DataParseError(f'no value column among {header}', path=str(path), line=line)

    def load(self, path: Path) -> SampleSeries:
        values, timestamps, lines = [], [], []
        columns = None
        header = None
        for line, row in read_rows(path):
            if not row or all(not cell.strip() for cell in row):
                continue
            if columns is None:
                if header is None and not values and not _is_numeric_row(row):
                    header = row
                    columns = self._columns(header, len(row), path, line)
                    continue
                columns = self._columns(header, len(row), path, line)

            time_index, value_index = columns
            if max(value_index, time_index or 0) >= len(row):
                raise DataParseError(f'expected at least {max(value_index, time_index or 0) + 1} columns',
                                     path=str(path), line=line)
            values.append(_parse_number(row[value_index].strip(), path, line))
            if time_index is not None:
                timestamps.append(_parse_number(row[time_index].strip(), path, line))
            lines.append(line)

        if columns is not None and columns[0] is None:
            timestamps = None
        return _build_series(values, timestamps or None, lines, path)

    def save(self, series: SampleSeries, path: Path) -> None:
        with open(path, 'w', encoding='utf-8', newline='') as csv_file:
            writer = csv.writer(csv_file, lineterminator='\n')
            writer.writerow(['t', 'value'])
            for t, value in zip(series.grid.tolist(), series.values):
                writer.writerow([format_float(t), format_float(value)])


def _is_numeric_row(row: list[str]) -> bool:
    try:
        for cell in row:
            float(cell)
    except ValueError:
        return False
    return True


class JsonSeriesStorage(BaseSeriesStorage):
    """Ряд в JSON: массив чисел или массив объектов {t, value}"""

    @staticmethod
    def _number(item, path: Path, where: str) -> float:
        if isinstance(item, bool) or not isinstance(item, int | float) or not math.isfinite(item):
            raise DataParseError(f'{where}: expected a finite number, got {item!r}', path=str(path))
        return float(item)

    def load(self, path: Path) -> SampleSeries:
        with open(path, 'rb') as json_file:
            content = json_file.read()
        if not content.strip():
            raise DataParseError('empty file', path=str(path), line=1)
        try:
            document = orjson.loads(content)
        except orjson.JSONDecodeError as error:
            raise DataParseError(error.msg, path=str(path), line=error.lineno) from None
        if not isinstance(document, list):
            raise DataParseError('expected a JSON array', path=str(path), line=1)

        values, timestamps = [], []
        for index, item in enumerate(document):
            where = f'item {index}'
            if isinstance(item, dict):
                value = item.get('value', item.get('x'))
                values.append(self._number(value, path, where))
                if 't' in item:
                    timestamps.append(self._number(item['t'], path, where))
            else:
                values.append(self._number(item, path, where))

        if timestamps and len(timestamps) != len(values):
            raise DataParseError('either every item or none must carry t', path=str(path))
        if timestamps:
            for index in range(1, len(timestamps)):
                if timestamps[index] <= timestamps[index - 1]:
                    raise DataParseError(f'item {index}: timestamps must be strictly increasing', path=str(path))
        return _build_series(values, timestamps or None, list(range(1, len(values) + 1)), path)

    def save(self, series: SampleSeries, path: Path) -> None:
        document = [{'t': t, 'value': value} for t, value in zip(series.grid.tolist(), series.values)]
        with open(path, 'wb') as json_file:
            json_file.write(orjson.dumps(document))


STORAGES: dict[str, BaseSeriesStorage] = {
    'csv': CsvSeriesStorage(),
    'json': JsonSeriesStorage(),
}


def ingest(path: Path | str, series_format: SeriesFormat | None = None) -> SampleSeries:
    """
    Чтение ряда из файла.
    :param series_format: csv или json; по умолчанию определяется по расширению
    """
    path = Path(path)
    series_format = detect_format(path, series_format)
    series = STORAGES[series_format].load(path)
    logger.info('Read %d samples from %s', len(series), path)
    return series


def emit_series(series: SampleSeries, path: Path | str, series_format: SeriesFormat | None = None) -> None:
    path = Path(path)
    STORAGES[detect_format(path, series_format)].save(series, path)
    logger.info('Wrote %d samples to %s', len(series), path)
