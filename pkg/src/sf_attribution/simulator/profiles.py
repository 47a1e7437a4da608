"""威胁行为者画像与逐步漂移。

画像以数组形式成组保存（:class:`ProfileSet`），第 ``i`` 行对应行为者 ``i``：

* ``activity``：每个时间步造成事件的概率 ``a_i``；
* ``start`` / ``end``：活动窗口（闭区间，整数时间步）；
* ``means`` / ``stddevs``：``(t, m)``，各特征的高斯参数。
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from sf_attribution.simulator.config import SimConfig

# 采样时的标准差下限，画像本身允许 σ = 0
SAMPLING_SIGMA_FLOOR = 1e-9


@dataclass(frozen=True, slots=True)
class ThreatActorProfile:
    """单个行为者画像的只读快照。"""

    actor: int
    activity: float
    start: int
    end: int
    means: tuple[float, ...]
    stddevs: tuple[float, ...]

    def is_active(self, step: int) -> bool:
        return self.start <= step <= self.end


@dataclass(frozen=True, slots=True, eq=False)
class ProfileSet:
    """全部行为者的画像。数组在外部不应被修改，漂移通过 :func:`step_drift` 产生新实例。"""

    activity: np.ndarray
    start: np.ndarray
    end: np.ndarray
    means: np.ndarray
    stddevs: np.ndarray

    def __len__(self) -> int:
        return int(self.activity.shape[0])

    def __getitem__(self, actor: int) -> ThreatActorProfile:
        return ThreatActorProfile(
            actor=actor,
            activity=float(self.activity[actor]),
            start=int(self.start[actor]),
            end=int(self.end[actor]),
            means=tuple(float(v) for v in self.means[actor]),
            stddevs=tuple(float(v) for v in self.stddevs[actor]),
        )

    def __iter__(self) -> Iterator[ThreatActorProfile]:
        return (self[i] for i in range(len(self)))

    @property
    def m(self) -> int:
        return int(self.means.shape[1])

    def active_mask(self, step: int) -> np.ndarray:
        return (self.start <= step) & (step <= self.end)

    def copy(self) -> "ProfileSet":
        return ProfileSet(
            activity=self.activity.copy(),
            start=self.start.copy(),
            end=self.end.copy(),
            means=self.means.copy(),
            stddevs=self.stddevs.copy(),
        )


def generate_profiles(config: SimConfig, rng: np.random.Generator) -> ProfileSet:
    """按配置为 ``t`` 个行为者采样初始画像。

    采样顺序固定为：活跃度 ``U(activity_low, activity_high)``、开始 ``⌊U(0, 0.4s)⌋``、
    结束 ``⌊U(0.6s, s)⌋``、均值 ``U(-1, 1)``、标准差 ``U(0, 1/t)``。极小的 ``s`` 下若取整使
    ``end == start``，则取 ``end = start + 1``。
    """

    t, m, s = config.t, config.m, config.s
    activity = rng.uniform(config.activity_low, config.activity_high, size=t)
    start = np.floor(rng.uniform(0.0, 0.4 * s, size=t)).astype(np.int64)
    end = np.floor(rng.uniform(0.6 * s, s, size=t)).astype(np.int64)
    end = np.minimum(np.maximum(end, start + 1), s - 1)
    means = rng.uniform(-1.0, 1.0, size=(t, m))
    stddevs = rng.uniform(0.0, 1.0 / t, size=(t, m))
    return ProfileSet(activity=activity, start=start, end=end, means=means, stddevs=stddevs)


def drift_in_place(profiles: ProfileSet, config: SimConfig, rng: np.random.Generator) -> None:
    """对画像数组原地施加一步漂移；生成器内部使用，避免每步复制。"""

    if not config.drift_enabled:
        return
    t, m = profiles.means.shape
    sigma = config.drift_sigma
    np.add(profiles.means, rng.normal(0.0, sigma, size=(t, m)), out=profiles.means)
    np.add(profiles.stddevs, rng.normal(0.0, sigma, size=(t, m)), out=profiles.stddevs)
    np.maximum(profiles.stddevs, 0.0, out=profiles.stddevs)
    np.add(profiles.activity, rng.normal(0.0, sigma, size=t), out=profiles.activity)
    np.clip(profiles.activity, 0.0, config.activity_high, out=profiles.activity)


def step_drift(profiles: ProfileSet, config: SimConfig, rng: np.random.Generator) -> ProfileSet:
    """返回漂移一步后的新画像，原画像不变。

    均值、标准差与活跃度各自叠加独立的 ``N(0, drift_sigma)``；标准差截断到 ``[0, ∞)``，
    活跃度截断到 ``[0, activity_high]``。``drift_enabled=False`` 时原样返回。
    """

    if not config.drift_enabled:
        return profiles
    drifted = profiles.copy()
    drift_in_place(drifted, config, rng)
    return drifted


def expected_incident_count(profiles: ProfileSet, s: int) -> float:
    """无漂移时的期望事件数：``Σ a_i · (min(end_i, s-1) - start_i + 1)``。"""

    window = np.minimum(profiles.end, s - 1) - profiles.start + 1
    return float(np.sum(profiles.activity * np.maximum(window, 0)))


def incident_count_stddev(profiles: ProfileSet, s: int) -> float:
    """无漂移时事件数（二项分布之和）的标准差。"""

    window = np.maximum(np.minimum(profiles.end, s - 1) - profiles.start + 1, 0)
    a = profiles.activity
    return float(np.sqrt(np.sum(a * (1.0 - a) * window)))


__all__ = [
    "ThreatActorProfile",
    "ProfileSet",
    "SAMPLING_SIGMA_FLOOR",
    "generate_profiles",
    "step_drift",
    "drift_in_place",
    "expected_incident_count",
    "incident_count_stddev",
]
