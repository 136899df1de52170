from models.run import RunConfig
from services.forks import hierarchical_fork
from storage.results import emit_bands
from storage.series import ingest


def run(config: RunConfig) -> None:
    """Иерархические полосы: разделитель, примененный к каждой огибающей до глубины depth"""
    series = ingest(config.input, config.format)
    tree = hierarchical_fork(series, config.depth, config.interp)
    emit_bands(tree, config.output)
    print(f'depth={tree.depth} splits={len(tree.split_nodes())} leaves={len(tree.leaves())}')
