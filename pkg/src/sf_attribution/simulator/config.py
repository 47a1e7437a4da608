"""模拟器参数模型。"""
from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field, model_validator


class SimConfig(BaseModel):
    """事件数据集生成参数。

    默认值对应完整规模实验：``s=100000`` 个时间步、``t=128`` 个威胁行为者、``m=8`` 个特征。
    桌面规模常用 ``SimConfig(s=20000, t=32)``。

    参数：
        s：总时间步数，``>= 2``；前 ``s/2`` 步为训练集。
        t：威胁行为者数量，``>= 2``。
        m：每个事件的数值特征数量，``>= 1``。
        false_flag_prob：测试集中单个特征被替换为虚假旗帜的概率，范围 ``[0, 1]``。
        drift_sigma：每步漂移的高斯标准差，作用于均值、标准差与活跃度。
        activity_low / activity_high：初始活跃度的均匀分布区间；``activity_high`` 同时是漂移后的上限。
        seed：伪随机数种子。
        drift_enabled：关闭后画像保持不变，便于解析地校验事件数期望。
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    s: int = Field(default=100_000, ge=2)
    t: int = Field(default=128, ge=2)
    m: int = Field(default=8, ge=1)
    false_flag_prob: float = Field(default=0.4, ge=0.0, le=1.0)
    drift_sigma: float = Field(default=0.01, ge=0.0)
    activity_low: float = Field(default=0.0001, ge=0.0, le=1.0)
    activity_high: float = Field(default=0.1, ge=0.0, le=1.0)
    seed: int = Field(default=0, ge=0)
    drift_enabled: bool = True

    @model_validator(mode="after")
    def _check_activity_range(self) -> "SimConfig":
        if not self.activity_low < self.activity_high:
            raise ValueError("activity_low must be strictly below activity_high")
        return self

    @property
    def train_cutoff(self) -> float:
        """训练/测试分界：``time_step < s / 2`` 属于训练集。"""

        return self.s / 2


__all__ = ["SimConfig"]
