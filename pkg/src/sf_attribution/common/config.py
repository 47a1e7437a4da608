"""平台配置管理。

``Settings`` 为分节的 Pydantic 模型，``ConfigManager`` 负责按以下优先级（由低到高）合并来源：

1. 模型默认值；
2. 环境变量 ``SF_ATTR_<SECTION>__<KEY>``（同时读取工作目录下的 ``.env``）；
3. 扁平键值配置文件，每行 ``section.key = value``，``#`` 开头为注释；
4. 显式覆盖项（通常来自 CLI 参数）。

示例::

    ConfigManager.load("run.conf", overrides={"simulation.t": 32})
    settings = ConfigManager.current().settings
    settings.models.sigma_floor  # 1e-06
"""
from __future__ import annotations

import os
from pathlib import Path
from threading import Lock
from typing import Any, ClassVar, Literal, Mapping

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from sf_attribution.common.exceptions import ConfigValidationError, StorageError
from sf_attribution.common.logging import LoggerFactory
from sf_attribution.simulator.config import SimConfig

ENV_PREFIX = "SF_ATTR_"

StrategyName = Literal["linear", "logarithmic", "pairing", "holder", "monolithic"]


class LoggingSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "INFO"
    json_format: bool = False

    @field_validator("level", mode="before")
    @classmethod
    def _upper(cls, value: Any) -> Any:
        return value.upper() if isinstance(value, str) else value


class PMFSettings(BaseModel):
    """PMF 相关容差。"""

    model_config = ConfigDict(extra="forbid")

    sum_tolerance: float = Field(default=1e-9, gt=0.0, lt=1e-3)
    endpoint_tolerance: float = Field(default=1e-12, gt=0.0)
    holder_alpha: float = 0.5


class ModelSettings(BaseModel):
    """高斯归因模型的数值下限。"""

    model_config = ConfigDict(extra="forbid")

    sigma_floor: float = Field(default=1e-6, gt=0.0)
    pmf_floor: float = Field(default=1e-12, gt=0.0, lt=1e-3)


class EvaluationSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    threshold_grid_size: int = Field(default=1001, ge=2)
    summary_k: int = Field(default=10, ge=1)
    workers: int = Field(default=1, ge=1)
    strategies: list[StrategyName] = Field(
        default_factory=lambda: ["linear", "logarithmic", "pairing", "monolithic"], min_length=1
    )

    @field_validator("strategies", mode="before")
    @classmethod
    def _split(cls, value: Any) -> Any:
        if isinstance(value, str):
            return [item.strip() for item in value.split(",") if item.strip()]
        return value


class Settings(BaseModel):
    """全局配置快照。"""

    model_config = ConfigDict(extra="forbid")

    logging: LoggingSettings = Field(default_factory=LoggingSettings)
    pmf: PMFSettings = Field(default_factory=PMFSettings)
    models: ModelSettings = Field(default_factory=ModelSettings)
    simulation: SimConfig = Field(default_factory=SimConfig)
    evaluation: EvaluationSettings = Field(default_factory=EvaluationSettings)


def _nest(flat: Mapping[str, Any], *, source: str) -> dict[str, dict[str, Any]]:
    """将 ``{"section.key": v}`` 转为 ``{"section": {"key": v}}``。"""

    nested: dict[str, dict[str, Any]] = {}
    for raw_key, value in flat.items():
        section, sep, key = raw_key.strip().lower().partition(".")
        if not sep or not key:
            raise ConfigValidationError(
                "配置键必须形如 section.key",
                details={"key": raw_key, "source": source},
            )
        nested.setdefault(section, {})[key] = value
    return nested


def _merge(base: dict[str, dict[str, Any]], layer: dict[str, dict[str, Any]]) -> None:
    for section, values in layer.items():
        base.setdefault(section, {}).update(values)


def _environment_layer(environ: Mapping[str, str | None]) -> dict[str, Any]:
    flat: dict[str, Any] = {}
    for name, value in environ.items():
        if value is None or not name.startswith(ENV_PREFIX):
            continue
        section, sep, key = name[len(ENV_PREFIX):].partition("__")
        if sep:
            flat[f"{section}.{key}"] = value
    return flat


class ConfigManager:
    """配置加载器与当前快照持有者（进程级单例）。"""

    _current: ClassVar["ConfigManager | None"] = None
    _lock: ClassVar[Lock] = Lock()

    def __init__(self, settings: Settings, *, sources: list[str] | None = None) -> None:
        self.settings = settings
        self.sources = sources or ["defaults"]

    @classmethod
    def load(
        cls,
        config_file: str | Path | None = None,
        *,
        overrides: Mapping[str, Any] | None = None,
        environ: Mapping[str, str | None] | None = None,
        dotenv_path: str | Path | None = ".env",
    ) -> "ConfigManager":
        """加载配置并设为当前快照。

        参数：
            config_file：扁平键值配置文件路径，例如 ``"desk.conf"``；``None`` 表示不使用。
            overrides：最高优先级的覆盖项，例如 ``{"simulation.seed": 7}``；值为 ``None`` 的键被忽略。
            environ：环境变量映射，缺省读取 ``os.environ``。
            dotenv_path：``.env`` 文件路径，不存在时忽略。

        返回：新的 :class:`ConfigManager`。

        异常：
            ConfigValidationError：键名或取值非法。
            StorageError：配置文件不存在或不可读。
        """

        merged: dict[str, dict[str, Any]] = {}
        sources = ["defaults"]

        env_layer: dict[str, Any] = {}
        if dotenv_path is not None and Path(dotenv_path).is_file():
            env_layer.update(_environment_layer(dotenv_values(dotenv_path)))
        env_layer.update(_environment_layer(os.environ if environ is None else environ))
        if env_layer:
            _merge(merged, _nest(env_layer, source="environment"))
            sources.append("environment")

        if config_file is not None:
            path = Path(config_file)
            if not path.is_file():
                raise StorageError("配置文件不存在", details={"path": str(path)})
            try:
                file_values = dotenv_values(path)
            except OSError as exc:
                raise StorageError("配置文件读取失败", details={"path": str(path), "error": str(exc)}) from exc
            _merge(merged, _nest(file_values, source=str(path)))
            sources.append(str(path))

        if overrides:
            active = {key: value for key, value in overrides.items() if value is not None}
            if active:
                _merge(merged, _nest(active, source="overrides"))
                sources.append("overrides")

        try:
            settings = Settings.model_validate(merged)
        except ValidationError as exc:
            raise ConfigValidationError(
                "配置校验失败",
                details={"errors": exc.errors(include_url=False), "sources": sources},
            ) from exc

        return cls._install(cls(settings, sources=sources))

    @classmethod
    def current(cls) -> "ConfigManager":
        """返回当前配置；尚未加载时使用默认值（不读取环境变量）。"""

        manager = cls._current
        if manager is None:
            manager = cls._install(cls(Settings()))
        return manager

    @classmethod
    def use(cls, settings: Settings) -> "ConfigManager":
        """直接指定配置快照，主要用于测试。"""

        return cls._install(cls(settings, sources=["explicit"]))

    @classmethod
    def reset(cls) -> None:
        with cls._lock:
            cls._current = None

    @classmethod
    def _install(cls, manager: "ConfigManager") -> "ConfigManager":
        with cls._lock:
            cls._current = manager
        log_settings = manager.settings.logging
        LoggerFactory.configure(level=log_settings.level, json_format=log_settings.json_format)
        return manager


__all__ = [
    "ConfigManager",
    "Settings",
    "LoggingSettings",
    "PMFSettings",
    "ModelSettings",
    "EvaluationSettings",
    "StrategyName",
    "ENV_PREFIX",
]
