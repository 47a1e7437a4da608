"""PMF 值类型与权重类型。

``PMF`` 是所有归因器的统一输出：长度为 ``t`` 的概率向量，下标即威胁行为者编号（ActorId）。
数组在构造时复制并设为只读，因此实例可以在线程间自由共享。
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from sf_attribution.common.exceptions import AllZeroMass, InvalidPMF, InvalidWeights


def sum_tolerance() -> float:
    """当前配置的 PMF 求和容差（默认 ``1e-9``）。"""

    from sf_attribution.common.config import ConfigManager

    return ConfigManager.current().settings.pmf.sum_tolerance


def endpoint_tolerance() -> float:
    """Hölder 池在 ``alpha`` 距 0 或 1 不超过该值时改用对数池或线性池（默认 ``1e-12``）。"""

    from sf_attribution.common.config import ConfigManager

    return ConfigManager.current().settings.pmf.endpoint_tolerance


@dataclass(frozen=True, slots=True, eq=False)
class PMF:
    """威胁行为者上的概率质量函数。

    不变量：每个分量位于 ``[0, 1]``；总和与 1 的差不超过 ``sum_tolerance``；
    长度即行为者全集大小 ``t``（允许显式的 0）。
    """

    probabilities: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.probabilities, dtype=np.float64)
        if values.ndim != 1 or values.size == 0:
            raise InvalidPMF("PMF 必须是非空一维向量", details={"shape": list(values.shape)})
        if not np.all(np.isfinite(values)):
            raise InvalidPMF("PMF 含有非有限值")
        if values.min() < 0.0 or values.max() > 1.0:
            raise InvalidPMF(
                "PMF 分量超出 [0, 1]",
                details={"min": float(values.min()), "max": float(values.max())},
            )
        total = float(values.sum())
        if abs(total - 1.0) > sum_tolerance():
            raise InvalidPMF("PMF 总和不为 1", details={"sum": total})
        values.setflags(write=False)
        object.__setattr__(self, "probabilities", values)

    # ---- 构造 ---------------------------------------------------------

    @classmethod
    def from_sequence(cls, values: Iterable[float]) -> "PMF":
        return cls(np.fromiter(values, dtype=np.float64))

    @classmethod
    def uniform(cls, t: int) -> "PMF":
        if t < 1:
            raise InvalidPMF("行为者全集不能为空", details={"t": t})
        return cls(np.full(t, 1.0 / t))

    @classmethod
    def from_json(cls, text: str) -> "PMF":
        """解析 JSON 数组形式，例如 ``"[0.25, 0.75]"``。"""

        data = json.loads(text)
        if not isinstance(data, list):
            raise InvalidPMF("PMF JSON 必须是数组")
        return cls.from_sequence(float(v) for v in data)

    # ---- 访问 ---------------------------------------------------------

    @property
    def actor_universe_size(self) -> int:
        return int(self.probabilities.size)

    def __len__(self) -> int:
        return self.actor_universe_size

    def __getitem__(self, actor: int) -> float:
        return float(self.probabilities[actor])

    def as_dict(self) -> dict[int, float]:
        """``{actor_id: probability}`` 形式，包含全部行为者。"""

        return {actor: float(p) for actor, p in enumerate(self.probabilities)}

    def to_list(self) -> list[float]:
        return [float(p) for p in self.probabilities]

    def to_json(self) -> str:
        return json.dumps(self.to_list())

    def argmax(self) -> int:
        """概率最大的行为者；并列时取编号最小者。"""

        return int(np.argmax(self.probabilities))

    def top(self, k: int) -> list[tuple[int, float]]:
        """按概率降序（并列按编号升序）返回前 ``k`` 个 ``(actor, probability)``。"""

        order = np.lexsort((np.arange(self.actor_universe_size), -self.probabilities))
        return [(int(a), float(self.probabilities[a])) for a in order[:k]]

    def isclose(self, other: "PMF", *, atol: float = 1e-9) -> bool:
        """L∞ 距离不超过 ``atol`` 且全集相同。"""

        return self.actor_universe_size == other.actor_universe_size and linf(self, other) <= atol

    def __repr__(self) -> str:
        shown = ", ".join(f"{p:.6g}" for p in self.probabilities[:8])
        more = ", ..." if self.actor_universe_size > 8 else ""
        return f"PMF([{shown}{more}])"


def linf(a: PMF, b: PMF) -> float:
    """两个 PMF 之间的 L∞ 距离。"""

    return float(np.max(np.abs(a.probabilities - b.probabilities)))


def normalize(raw: Sequence[float] | np.ndarray) -> PMF:
    """将非负向量按总和归一化为 PMF。

    参数：
        raw：长度为 ``t`` 的非负实数向量，例如 ``[2.0, 2.0]``。

    返回：每个分量除以总和后的 :class:`PMF`，例如 ``PMF([0.5, 0.5])``。

    异常：
        AllZeroMass：总和为 0，表示被合并的 PMF 之间完全矛盾。
        InvalidPMF：含负数或非有限值。
    """

    values = np.asarray(raw, dtype=np.float64)
    if values.ndim != 1 or values.size == 0:
        raise InvalidPMF("待归一化向量必须是非空一维向量", details={"shape": list(values.shape)})
    if not np.all(np.isfinite(values)) or values.min() < 0.0:
        raise InvalidPMF("待归一化向量必须为有限非负值")
    total = values.sum()
    if total <= 0.0:
        raise AllZeroMass("全部质量为 0，无法归一化", details={"t": int(values.size)})
    return PMF(values / total)


@dataclass(frozen=True, slots=True)
class PoolWeights:
    """意见池权重 ``w_k``：非负且总和为 1。

    总和与 1 的差在 ``sum_tolerance`` 以内即可接受，保存时按总和重新归一。
    """

    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        weights = tuple(float(w) for w in self.weights)
        if not weights:
            raise InvalidWeights("权重列表不能为空")
        if any(not np.isfinite(w) or w < 0.0 for w in weights):
            raise InvalidWeights("权重必须为有限非负值", details={"weights": list(weights)})
        total = sum(weights)
        if abs(total - 1.0) > sum_tolerance():
            raise InvalidWeights("权重总和必须为 1", details={"sum": total})
        object.__setattr__(self, "weights", tuple(w / total for w in weights))

    @classmethod
    def equal(cls, k: int) -> "PoolWeights":
        """等权重 ``1/K``。"""

        if k < 1:
            raise InvalidWeights("权重数量必须 >= 1", details={"k": k})
        return cls((1.0 / k,) * k)

    @classmethod
    def from_sequence(cls, values: Iterable[float]) -> "PoolWeights":
        return cls(tuple(values))

    def __len__(self) -> int:
        return len(self.weights)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=np.float64)


__all__ = ["PMF", "PoolWeights", "normalize", "linf", "sum_tolerance", "endpoint_tolerance"]
