from pathlib import Path
from typing import Annotated, Literal

from typing_extensions import Self

from annotated_types import Ge, Gt, Le, Lt
from pydantic import BaseModel, ConfigDict, Field, FilePath, field_validator, model_validator

from core.config import bench_settings
from models.process import PROCESS_ALIASES, ProcessFamily
from models.split import InterpMode

Subcommand = Literal['split', 'bands', 'gen', 'bench', 'plot']
ProcessName = Literal['uniform', 'normal', 'expo', 'walk', 'gwalk', 'records']

# Какие пути обязательны для подкоманды
REQUIRED_PATHS: dict[str, tuple[str, ...]] = {
    'split': ('input', 'output'),
    'bands': ('input', 'output'),
    'gen': ('output',),
    'bench': (),
    'plot': ('input', 'output'),
}


class RunConfig(BaseModel):
    """Параметры одного запуска CLI, проверяются до начала работы"""
    model_config = ConfigDict(frozen=True)

    subcommand: Subcommand
    input: FilePath | None = None
    """Входной ряд (csv или json)"""
    output: Path | None = None
    """Файл результата; для bench - записи JSONL"""
    format: Literal['csv', 'json'] | None = None
    """Формат ряда; по умолчанию по расширению"""
    interp: InterpMode | None = None
    depth: Annotated[int, Ge(1)] = 1
    process: ProcessName = 'uniform'
    T: Annotated[int, Ge(1)] = 1000
    seed: Annotated[int, Ge(0), Lt(2 ** 64)] = 0
    p: Annotated[float, Ge(0), Le(1)] = 0.1
    q: Annotated[float, Ge(0), Le(1)] = 0.1
    trials: Annotated[int, Gt(0)] = Field(default_factory=lambda: bench_settings.trials)
    sizes: list[Annotated[int, Gt(1)]] = Field(default_factory=lambda: list(bench_settings.sizes))
    timing: bool = False
    audit: bool = False
    workers: Annotated[int, Gt(0)] | None = None

    @field_validator('sizes', mode='before')
    @classmethod
    def parse_sizes(cls, value):
        if isinstance(value, str):
            return [int(item) for item in value.split(',') if item.strip()]
        return value

    @field_validator('output')
    @classmethod
    def check_output(cls, value: Path | None) -> Path | None:
        if value is not None and not value.resolve().parent.is_dir():
            raise ValueError(f'output directory {value.parent} does not exist')
        return value

    @model_validator(mode='after')
    def check_paths(self) -> Self:
        missing = [name for name in REQUIRED_PATHS[self.subcommand] if getattr(self, name) is None]
        if missing:
            raise ValueError(f'{self.subcommand} needs --{" --".join(missing)}')
        if self.process == 'records' and self.p + self.q > 1:
            raise ValueError(f'p + q must not exceed 1, got {self.p} + {self.q}')
        return self

    @property
    def family(self) -> ProcessFamily:
        params = dict(PROCESS_ALIASES[self.process])
        if self.process == 'records':
            params.update(p=self.p, q=self.q)
        return ProcessFamily(**params)
