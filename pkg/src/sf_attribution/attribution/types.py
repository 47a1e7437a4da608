"""归因领域类型：事件、归因器绑定与解释轨迹。

类结构对应模块化归因架构：

* :class:`Attributor`：任何能把事件映射为 PMF 的组件；
* :class:`AttributorBinding`：具体归因器，只读取特征向量的一个子集 ``I' ⊆ I``；
* 聚合器（见 :mod:`sf_attribution.attribution.aggregator`）本身也是 ``Attributor``，
  由若干归因器组合而成。
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol, runtime_checkable

import numpy as np

from sf_attribution.common.exceptions import ErrorCode, InputValidationError, InvalidIncident, InvariantViolation
from sf_attribution.pmf.pmf import PMF


@dataclass(frozen=True, slots=True, eq=False)
class Incident:
    """一次可归因事件。

    参数：
        id：唯一编号，例如 ``42``。
        time_step：发生的时间步，``>= 0``。
        features：长度为 ``m`` 的有限实数特征向量。
        label：真实的威胁行为者编号；未知时为 ``None``。
        false_flag_mask：长度为 ``m`` 的布尔向量，``True`` 表示该特征被替换为虚假旗帜。
    """

    id: int
    time_step: int
    features: np.ndarray
    label: int | None = None
    false_flag_mask: tuple[bool, ...] | None = None

    def __post_init__(self) -> None:
        values = np.array(self.features, dtype=np.float64)
        if values.ndim != 1 or values.size == 0:
            raise InvalidIncident("特征必须是非空一维向量", details={"id": self.id, "shape": list(values.shape)})
        if not np.all(np.isfinite(values)):
            raise InvalidIncident("特征含有非有限值", details={"id": self.id})
        if self.time_step < 0:
            raise InvalidIncident("时间步不能为负", details={"id": self.id, "time_step": self.time_step})
        if self.label is not None and self.label < 0:
            raise InvalidIncident("行为者编号不能为负", details={"id": self.id, "label": self.label})
        if self.false_flag_mask is not None:
            mask = tuple(bool(flag) for flag in self.false_flag_mask)
            if len(mask) != values.size:
                raise InvalidIncident(
                    "虚假旗帜掩码长度必须等于特征数",
                    details={"id": self.id, "mask": len(mask), "m": int(values.size)},
                )
            object.__setattr__(self, "false_flag_mask", mask)
        values.setflags(write=False)
        object.__setattr__(self, "features", values)

    @property
    def m(self) -> int:
        return int(self.features.size)

    @property
    def has_false_flag(self) -> bool:
        return bool(self.false_flag_mask) and any(self.false_flag_mask)


@runtime_checkable
class AttributionModel(Protocol):
    """已训练模型的最小协议（见 :class:`sf_attribution.models.gaussian.TrainedAttributor`）。"""

    @property
    def t(self) -> int: ...

    @property
    def feature_indices(self) -> tuple[int, ...]: ...

    def predict(self, incident: Incident) -> PMF: ...


@runtime_checkable
class Attributor(Protocol):
    """归因器协议：根据事件输出行为者上的 PMF。"""

    @property
    def name(self) -> str: ...

    def attribute(self, incident: Incident) -> PMF: ...


@dataclass(frozen=True, slots=True)
class AttributorBinding:
    """具体归因器：名称 + 特征下标子集 + 已训练模型。

    ``feature_indices`` 非空、无重复、均为非负整数；与特征数 ``m`` 的上界在归因时校验。
    """

    name: str
    feature_indices: tuple[int, ...]
    model: AttributionModel | None = None

    def __post_init__(self) -> None:
        indices = tuple(int(i) for i in self.feature_indices)
        if not indices:
            raise InputValidationError(ErrorCode.BAD_REQUEST, "特征下标集合不能为空", details={"name": self.name})
        if len(set(indices)) != len(indices) or min(indices) < 0:
            raise InputValidationError(
                ErrorCode.BAD_REQUEST,
                "特征下标必须非负且不重复",
                details={"name": self.name, "feature_indices": list(indices)},
            )
        if self.model is not None and tuple(self.model.feature_indices) != indices:
            raise InputValidationError(
                ErrorCode.BAD_REQUEST,
                "绑定的特征下标与模型训练时的特征下标不一致",
                details={"binding": list(indices), "model": list(self.model.feature_indices)},
            )
        object.__setattr__(self, "feature_indices", indices)

    def attribute(self, incident: Incident) -> PMF:
        from sf_attribution.attribution.aggregator import attribute

        return attribute(self, incident)


PairKey = tuple[str, str]


@dataclass(frozen=True, slots=True)
class AttributionTrace:
    """可解释性轨迹：模块层、配对层与最终 PMF。

    属性：
        module_outputs：归因器名称 → PMF，顺序即归因器顺序。
        pair_outputs：``(a, b)`` → 对数池中间 PMF，按名称字典序排列。
        final：最终 PMF。
        contradictory_pairs：对数池质量全为 0 而未参与线性池的配对。
    """

    module_outputs: dict[str, PMF]
    pair_outputs: dict[PairKey, PMF]
    final: PMF
    contradictory_pairs: tuple[PairKey, ...] = field(default=())

    def __post_init__(self) -> None:
        k = len(self.module_outputs)
        expected = k * (k - 1) // 2
        produced = len(self.pair_outputs) + len(self.contradictory_pairs)
        if k >= 2 and produced != expected:
            raise InvariantViolation(
                "配对数量不等于 C(K, 2)",
                details={"k": k, "pairs": len(self.pair_outputs), "contradictory": len(self.contradictory_pairs)},
            )


__all__ = [
    "Incident",
    "Attributor",
    "AttributionModel",
    "AttributorBinding",
    "AttributionTrace",
    "PairKey",
]
