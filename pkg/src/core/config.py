from logging import config as logging_config
from typing import Annotated, Literal

from annotated_types import Ge, Gt, Lt
from pydantic import Field, field_validator
from pydantic_settings import SettingsConfigDict, BaseSettings

from core.logger import LOGGING

# Применяем настройки логирования
logging_config.dictConfig(LOGGING)


# Название проекта и уровень логирования
class ProjectSettings(BaseSettings):
    name: str = Field('envelopes')
    log_level: str = Field('INFO')

    model_config = SettingsConfigDict(env_prefix='project_', env_file='.env')


# Класс настройки оптимального разделителя
class SplitterSettings(BaseSettings):
    interp_mode: Literal['hold', 'linear'] = Field('linear')
    rel_tolerance: Annotated[float, Gt(0), Lt(1)] = Field(1e-9)

    model_config = SettingsConfigDict(env_prefix='splitter_', env_file='.env')


# Класс настройки эталонных решателей
class OracleSettings(BaseSettings):
    brute_force_max_length: Annotated[int, Gt(0)] = Field(24)
    quadratic_max_length: Annotated[int, Gt(0)] = Field(10_000)
    audit_max_length: Annotated[int, Gt(0)] = Field(1_000)
    table_snapshot_max_length: Annotated[int, Gt(0)] = Field(512)

    model_config = SettingsConfigDict(env_prefix='oracle_', env_file='.env')


# Класс настройки бенчмарка
class BenchSettings(BaseSettings):
    sizes: list[Annotated[int, Gt(1)]] = Field([1024, 2048, 4096])
    trials: Annotated[int, Gt(0)] = Field(1000)
    iid_tolerance: Annotated[float, Gt(0)] = Field(0.15)
    sqrt_ratio_window: tuple[float, float] = Field((1.7, 2.3))
    constant_tolerance: Annotated[float, Gt(0)] = Field(0.25)
    sigma: Annotated[float, Gt(0)] = Field(3.0)
    min_bin_trials: Annotated[int, Gt(0)] = Field(20)
    workers: Annotated[int, Gt(0)] = Field(1)
    record_timing: bool = Field(False)

    model_config = SettingsConfigDict(env_prefix='bench_', env_file='.env')

    @field_validator('sqrt_ratio_window')
    @classmethod
    def check_window(cls, value: tuple[float, float]) -> tuple[float, float]:
        if not 0 < value[0] < value[1]:
            raise ValueError('sqrt_ratio_window must be an increasing pair of positive numbers')
        return value


# Класс настройки форматов вывода
class OutputSettings(BaseSettings):
    float_format: str = Field('.17g')
    svg_width: Annotated[int, Gt(0)] = Field(960)
    svg_height: Annotated[int, Gt(0)] = Field(540)
    svg_margin: Annotated[float, Ge(0), Lt(0.5)] = Field(0.05)
    svg_precision: Annotated[int, Ge(0)] = Field(3)

    model_config = SettingsConfigDict(env_prefix='output_', env_file='.env')


project_settings = ProjectSettings()
splitter_settings = SplitterSettings()
oracle_settings = OracleSettings()
bench_settings = BenchSettings()
output_settings = OutputSettings()
