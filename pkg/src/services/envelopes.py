import logging

import numpy as np

from core.config import splitter_settings
from core.exceptions import ContractViolation
from models.series import LabelSequence, SampleSeries
from models.split import EnvelopePair, InterpMode

logger = logging.getLogger(__name__)


def _interpolate(grid: np.ndarray, values: np.ndarray, mask: np.ndarray, mode: InterpMode) -> np.ndarray:
    """Подпоследовательность values[mask] на всей сетке, за пределами крайних отсчетов значение продлевается"""
    knots, knot_values = grid[mask], values[mask]
    if mode == 'linear':
        return np.interp(grid, knots, knot_values)
    # Ступенька: последнее известное значение, до первого отсчета - первое значение.
    index = np.searchsorted(knots, grid, side='right') - 1
    return knot_values[np.clip(index, 0, knots.size - 1)]


def build_envelopes(series: SampleSeries, labels: LabelSequence, mode: InterpMode | None = None) -> EnvelopePair:
    """
    Огибающие по разметке: каждая подпоследовательность интерполируется на сетку ряда.
    Верхней считается та, что больше в первой точке сетки, где огибающие различаются.
    """
    mode = mode or splitter_settings.interp_mode
    if len(labels) != len(series):
        raise ContractViolation(f'labels length {len(labels)} does not match series length {len(series)}')

    grid, values, marks = series.grid, series.array, labels.array
    masks = {label: marks == label for label in (1, 0)}
    present = [label for label, mask in masks.items() if mask.any()]

    if len(present) == 1:
        # Вторая подпоследовательность пуста (tau* = 0): огибающая только одна.
        label = present[0]
        logger.debug('Split has a single subsequence, lower envelope is absent')
        return EnvelopePair(
            timestamps=grid.tolist(),
            upper=_interpolate(grid, values, masks[label], mode).tolist(),
            lower=None,
            defined_upper=masks[label].tolist(),
            defined_lower=None,
            interp_mode=mode,
            upper_label=label,
        )

    first, second = (_interpolate(grid, values, masks[label], mode) for label in (1, 0))
    difference = first - second
    differs = np.flatnonzero(difference != 0)
    upper_label = 1 if differs.size == 0 or difference[differs[0]] > 0 else 0
    upper, lower = (first, second) if upper_label == 1 else (second, first)
    return EnvelopePair(
        timestamps=grid.tolist(),
        upper=upper.tolist(),
        lower=lower.tolist(),
        defined_upper=masks[upper_label].tolist(),
        defined_lower=masks[1 - upper_label].tolist(),
        interp_mode=mode,
        upper_label=upper_label,
    )


def check_non_crossing(pair: EnvelopePair, rel_tolerance: float | None = None) -> bool:
    """
    Огибающие не пересекаются: upper >= lower во всех точках сетки.
    Обе огибающие кусочно-линейны с изломами только в точках сетки, поэтому смена знака
    upper - lower внутри общего отрезка видна по его концам. Касание пересечением не считается.
    """
    if pair.lower is None:
        raise ContractViolation('non-crossing check needs both envelopes')
    rel_tolerance = splitter_settings.rel_tolerance if rel_tolerance is None else rel_tolerance
    upper = np.asarray(pair.upper, dtype=np.float64)
    lower = np.asarray(pair.lower, dtype=np.float64)
    scale = max(1.0, float(np.abs(upper).max()), float(np.abs(lower).max()))
    gap = upper - lower
    crossing = np.flatnonzero(gap < -rel_tolerance * scale)
    if crossing.size:
        logger.debug('Envelopes cross at grid index %d (gap %.6g)', crossing[0], gap[crossing[0]])
        return False
    return True


def envelope_drift(envelope) -> float:
    """L1-дрейф огибающей по всей сетке"""
    values = np.asarray(envelope, dtype=np.float64)
    return float(np.abs(np.diff(values)).sum()) if values.size > 1 else 0.0
