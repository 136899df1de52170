"""
SVG-график ряда и его огибающих.

Каждая линия - отдельный элемент polyline, классы задают цвет: series, upper, lower и level-k
для уровня иерархии. Документ собирается через ElementTree, порядок атрибутов фиксирован,
так что одинаковые данные дают побитово одинаковый файл.
"""
import logging
import xml.etree.ElementTree as ElementTree
from pathlib import Path

import numpy as np

from core.config import output_settings
from models.bench import ForkTree
from models.series import SampleSeries
from models.split import EnvelopePair

logger = logging.getLogger(__name__)

SVG_NAMESPACE = 'http://www.w3.org/2000/svg'

STYLE = (
    '.frame { fill: none; stroke: #999999; stroke-width: 1; }\n'
    'polyline { fill: none; stroke-width: 1.5; }\n'
    '.series { stroke: #222222; stroke-width: 1; }\n'
    '.upper { stroke: #c0392b; }\n'
    '.lower { stroke: #2471a3; }\n'
    '.level-2 { stroke-dasharray: 6 3; }\n'
    '.level-3 { stroke-dasharray: 2 2; }\n'
)


class Canvas:
    """Перевод координат данных в пиксели с полями по краям"""

    def __init__(self, grid: np.ndarray, values: np.ndarray, width: int, height: int, margin: float, precision: int):
        self.width, self.height = width, height
        self.precision = precision
        self.x_low, self.x_span = float(grid.min()), float(np.ptp(grid)) or 1.0
        self.y_low, self.y_span = float(values.min()), float(np.ptp(values)) or 1.0
        self.x_margin, self.y_margin = width * margin, height * margin

    def points(self, grid, values) -> str:
        grid = np.asarray(grid, dtype=np.float64)
        values = np.asarray(values, dtype=np.float64)
        x = self.x_margin + (grid - self.x_low) / self.x_span * (self.width - 2 * self.x_margin)
        # Ось y в SVG направлена вниз.
        y = self.height - self.y_margin - (values - self.y_low) / self.y_span * (self.height - 2 * self.y_margin)
        return ' '.join(f'{px:.{self.precision}f},{py:.{self.precision}f}' for px, py in zip(x.tolist(), y.tolist()))


def _envelope_lines(pair: EnvelopePair, level: int) -> list[tuple[str, tuple, tuple]]:
    lines = [(f'upper level-{level}', pair.timestamps, pair.upper)]
    if pair.lower is not None:
        lines.append((f'lower level-{level}', pair.timestamps, pair.lower))
    return lines


def emit_plot(series: SampleSeries, bands: EnvelopePair | ForkTree, path: Path | str) -> None:
    """
    Запись SVG: ряд одной линией и по линии на каждую огибающую.
    :param bands: пара огибающих или дерево иерархического разделения
    """
    if isinstance(bands, ForkTree):
        lines = [line for node in bands.split_nodes() for line in _envelope_lines(node.envelopes, node.level + 1)]
    else:
        lines = _envelope_lines(bands, 1)

    width, height = output_settings.svg_width, output_settings.svg_height
    canvas = Canvas(series.grid, series.array, width, height, output_settings.svg_margin, output_settings.svg_precision)

    root = ElementTree.Element('svg', {
        'xmlns': SVG_NAMESPACE,
        'width': str(width),
        'height': str(height),
        'viewBox': f'0 0 {width} {height}',
    })
    ElementTree.SubElement(root, 'style').text = STYLE
    ElementTree.SubElement(root, 'rect', {
        'class': 'frame',
        'x': f'{canvas.x_margin:.{canvas.precision}f}',
        'y': f'{canvas.y_margin:.{canvas.precision}f}',
        'width': f'{width - 2 * canvas.x_margin:.{canvas.precision}f}',
        'height': f'{height - 2 * canvas.y_margin:.{canvas.precision}f}',
    })
    ElementTree.SubElement(root, 'polyline', {'class': 'series', 'points': canvas.points(series.grid, series.array)})
    for css_class, grid, values in lines:
        ElementTree.SubElement(root, 'polyline', {'class': css_class, 'points': canvas.points(grid, values)})

    ElementTree.indent(root)
    with open(path, 'w', encoding='utf-8', newline='\n') as svg_file:
        svg_file.write(ElementTree.tostring(root, encoding='unicode'))
        svg_file.write('\n')
    logger.info('Wrote plot with %d polylines to %s', len(lines) + 1, path)
