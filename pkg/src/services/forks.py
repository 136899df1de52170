import logging

from core.exceptions import ContractViolation
from models.bench import ForkNode, ForkTree
from models.series import SampleSeries
from models.split import InterpMode
from services.envelopes import build_envelopes
from services.splitter import trimmed_split

logger = logging.getLogger(__name__)


def hierarchical_fork(series: SampleSeries, depth: int, mode: InterpMode | None = None) -> ForkTree:
    """
    Последовательное применение разделителя к полученным огибающим.
    Дети сохраняют исходные отметки времени, чтобы полосы всех уровней ложились на ось корня.
    Узел с менее чем двумя отсчетами или на исчерпанной глубине остается листом.
    """
    if depth < 1:
        raise ContractViolation(f'depth must be at least 1, got {depth}')

    nodes: dict[str, ForkNode] = {}
    frontier = [('', series)]
    for level in range(depth + 1):
        following = []
        for path, current in frontier:
            if level == depth or len(current) < 2:
                nodes[path] = ForkNode(path=path, level=level, series=current)
                continue

            split = trimmed_split(current)
            envelopes = build_envelopes(current, split.labels, mode)
            nodes[path] = ForkNode(path=path, level=level, series=current, split=split, envelopes=envelopes)
            if envelopes.lower_absent:
                continue

            upper_mask = split.labels.array == envelopes.upper_label
            following.append((ForkTree.child_path(path, 'upper'), current.subseries(upper_mask)))
            following.append((ForkTree.child_path(path, 'lower'), current.subseries(~upper_mask)))
        logger.debug('Fork level %d: %d nodes, %d children', level, len(frontier), len(following))
        frontier = following
        if not frontier:
            break

    return ForkTree(root=series, depth=depth, nodes=nodes)
