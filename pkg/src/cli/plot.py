from models.run import RunConfig
from services.envelopes import build_envelopes
from services.forks import hierarchical_fork
from services.splitter import trimmed_split
from storage.plot import emit_plot
from storage.series import ingest


def run(config: RunConfig) -> None:
    """SVG с рядом и огибающими; при depth > 1 рисуются вложенные полосы"""
    series = ingest(config.input, config.format)
    if config.depth > 1:
        emit_plot(series, hierarchical_fork(series, config.depth, config.interp), config.output)
        return
    result = trimmed_split(series)
    emit_plot(series, build_envelopes(series, result.labels, config.interp), config.output)
