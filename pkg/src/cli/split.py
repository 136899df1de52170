import logging

from models.run import RunConfig
from services.envelopes import build_envelopes
from services.splitter import trimmed_split
from storage.results import emit_split
from storage.series import ingest

logger = logging.getLogger(__name__)


def run(config: RunConfig) -> None:
    """Оптимальное разделение ряда на две огибающие"""
    series = ingest(config.input, config.format)
    result = trimmed_split(series)
    pair = build_envelopes(series, result.labels, config.interp)
    logger.info('Split T=%d: tau*=%d, %d survivors', len(series), result.final_tau, result.final_survivors)
    emit_split(result, pair, config.output)
