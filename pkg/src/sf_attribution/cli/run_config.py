"""命令行运行参数模型。

``RunConfig`` 汇总一次命令调用的全部参数：子命令、路径、模拟参数覆盖、策略列表、种子列表等。
模拟与评估参数并不直接生效，而是经 :meth:`RunConfig.config_overrides` 作为最高优先级的覆盖项
交给 :meth:`ConfigManager.load`，保证“命令行 > 配置文件 > 环境变量 > 默认值”。
"""
from __future__ import annotations

from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from sf_attribution.common.config import StrategyName
from sf_attribution.common.exceptions import ConfigValidationError

Command = Literal["simulate", "evaluate", "explain", "bench"]

# 命令行参数名 → 配置键
_SIMULATION_KEYS = (
    "s",
    "t",
    "m",
    "false_flag_prob",
    "drift_sigma",
    "activity_low",
    "activity_high",
    "drift_enabled",
)


class SimulationOverrides(BaseModel):
    """命令行给出的模拟参数；``None`` 表示沿用配置。"""

    model_config = ConfigDict(extra="forbid")

    s: int | None = None
    t: int | None = None
    m: int | None = None
    false_flag_prob: float | None = None
    drift_sigma: float | None = None
    activity_low: float | None = None
    activity_high: float | None = None
    drift_enabled: bool | None = None


class RunConfig(BaseModel):
    """一次命令调用的参数。

    参数：
        command：子命令。
        seed：单次运行的种子；``None`` 表示沿用配置中的 ``simulation.seed``。
        seeds：多种子评估的种子列表，非空。
        config_file：扁平键值配置文件。
        out_dir：输出目录，例如 ``"runs/desk"``。
        out：单文件输出路径（``simulate`` 的数据集、``explain`` 的轨迹）。
        dataset：输入数据集路径。
        models：``explain`` 使用的已训练模型文件；缺省时现场训练。
    """

    model_config = ConfigDict(extra="forbid")

    command: Command
    seed: int | None = Field(default=None, ge=0)
    seeds: list[int] | None = None
    config_file: Path | None = None
    out_dir: Path = Path("out")
    out: Path | None = None
    dataset: Path | None = None
    models: Path | None = None
    simulation: SimulationOverrides = Field(default_factory=SimulationOverrides)
    strategies: list[StrategyName] | None = None
    grid_size: int | None = Field(default=None, ge=2)
    workers: int | None = Field(default=None, ge=1)
    incident_id: int | None = None
    fixture: bool = False
    fixture_steps: int = Field(default=2000, ge=2)
    format: Literal["json", "text"] = "json"
    repeat: int = Field(default=1, ge=1)

    @field_validator("seeds")
    @classmethod
    def _check_seeds(cls, value: list[int] | None) -> list[int] | None:
        if value is None:
            return value
        if not value:
            raise ValueError("seed list must not be empty")
        if any(seed < 0 for seed in value):
            raise ValueError("seeds must be non-negative")
        return list(dict.fromkeys(value))

    @model_validator(mode="after")
    def _check_inputs(self) -> "RunConfig":
        if self.command == "evaluate" and self.dataset is None and self.seeds is None:
            raise ValueError("evaluate requires --dataset or --seeds")
        if self.command == "evaluate" and self.dataset is not None and self.seeds is not None:
            raise ValueError("--dataset and --seeds are mutually exclusive")
        if self.command == "explain" and self.dataset is None and not self.fixture:
            raise ValueError("explain requires --dataset or --fixture")
        if self.command == "bench" and self.dataset is None:
            raise ValueError("bench requires --dataset")
        return self

    @classmethod
    def build(cls, **values: Any) -> "RunConfig":
        """构造并把 pydantic 校验错误转换为 :class:`ConfigValidationError`。"""

        try:
            return cls.model_validate(values)
        except ValidationError as exc:
            raise ConfigValidationError(
                "命令行参数非法", details={"errors": exc.errors(include_url=False)}
            ) from exc

    def config_overrides(self) -> dict[str, Any]:
        """转换为 ``ConfigManager.load(overrides=...)`` 的扁平键值。"""

        overrides: dict[str, Any] = {f"simulation.{key}": getattr(self.simulation, key) for key in _SIMULATION_KEYS}
        overrides["simulation.seed"] = self.seed
        overrides["evaluation.strategies"] = self.strategies
        overrides["evaluation.threshold_grid_size"] = self.grid_size
        overrides["evaluation.workers"] = self.workers
        return {key: value for key, value in overrides.items() if value is not None}


__all__ = ["RunConfig", "SimulationOverrides", "Command"]
