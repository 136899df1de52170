from models.run import RunConfig
from services.generators import generate
from storage.series import emit_series


def run(config: RunConfig) -> None:
    """Синтетический ряд по имени процесса, длине и зерну"""
    spec = config.family.with_length(config.T, config.seed)
    emit_series(generate(spec), config.output, config.format)
