"""聚合器：线性池、对数池、Hölder 池与配对聚合器（Pairing Aggregator）。

配对聚合器的两步：

1. 对每一对不同的归因器 ``(a, b)``，用等权对数池得到中间 PMF ``r_ab``；
2. 用等权线性池合并全部中间 PMF，得到最终 PMF。

原始定义按有序对枚举（``K(K-1)`` 对）。等权对数池对输入顺序对称，``(a, b)`` 与 ``(b, a)``
的中间结果相同，线性池对重复项取平均不改变结果，因此这里只枚举无序对（``K(K-1)/2``）。
``K=1`` 时没有配对，直接返回唯一输入。
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Callable, Protocol, Sequence

import numpy as np

from sf_attribution.attribution.types import AttributionTrace, Attributor, AttributorBinding, Incident, PairKey
from sf_attribution.common.exceptions import (
    AllZeroMass,
    EmptyInput,
    ErrorCode,
    InputValidationError,
    InvalidIncident,
    TooFewAttributors,
    UniverseMismatch,
    UnknownStrategy,
    UntrainedModel,
)
from sf_attribution.pmf.pmf import PMF
from sf_attribution.pmf.pools import (
    exp_normalize,
    holder_pool_stack,
    linear_pool_stack,
    log_pool_stack,
    stack_pmfs,
)

NamedPMF = tuple[str, PMF]


# ---- 具体归因器 -----------------------------------------------------------


def attribute(binding: AttributorBinding, incident: Incident) -> PMF:
    """调用具体归因器，返回只基于 ``binding.feature_indices`` 证据的 PMF。

    异常：
        UntrainedModel：绑定尚未关联模型。
        InvalidIncident：特征下标超出事件特征数。
        UniverseMismatch：事件标签超出模型的行为者全集。
    """

    model = binding.model
    if model is None:
        raise UntrainedModel("归因器尚未训练", details={"name": binding.name})
    if max(binding.feature_indices) >= incident.m:
        raise InvalidIncident(
            "特征下标超出事件特征数",
            details={"name": binding.name, "feature_indices": list(binding.feature_indices), "m": incident.m},
        )
    if incident.label is not None and incident.label >= model.t:
        raise UniverseMismatch(
            "事件标签超出模型的行为者全集",
            details={"name": binding.name, "label": incident.label, "t": model.t},
        )
    return model.predict(incident)


# ---- 配对 -----------------------------------------------------------------


def _check_names(names: Sequence[str]) -> None:
    if len(set(names)) != len(names):
        raise InputValidationError(ErrorCode.BAD_REQUEST, "归因器名称必须唯一", details={"names": list(names)})


def pair_attributors(attributor_pmfs: Sequence[NamedPMF]) -> list[tuple[PairKey, tuple[PMF, PMF]]]:
    """枚举全部 ``C(K, 2)`` 个无序对，按名称字典序排列。

    例如 ``a, b, c`` → ``[(a, b), (a, c), (b, c)]``。

    异常：TooFewAttributors：``K < 2``。
    """

    if len(attributor_pmfs) < 2:
        raise TooFewAttributors("配对至少需要两个归因器", details={"k": len(attributor_pmfs)})
    _check_names([name for name, _ in attributor_pmfs])
    ordered = sorted(attributor_pmfs, key=lambda item: item[0])
    return [((a, b), (pa, pb)) for (a, pa), (b, pb) in combinations(ordered, 2)]


def ordered_pairs(names: Sequence[str]) -> list[PairKey]:
    """按原始定义枚举 ``K(K-1)`` 个有序对（``a ≠ b``），用于等价性校验。"""

    _check_names(names)
    return list(permutations(sorted(names), 2))


def _pair_index(k: int) -> tuple[np.ndarray, np.ndarray]:
    left, right = zip(*combinations(range(k), 2))
    return np.asarray(left), np.asarray(right)


def combine_pairs(pair_probs: np.ndarray, alive: np.ndarray) -> np.ndarray:
    """对存活配对做等权线性池：``(..., P, t)`` → ``(..., t)``。

    异常：AllZeroMass，某一行的全部配对都完全矛盾。
    """

    counts = alive.sum(axis=-1, keepdims=True)
    if np.any(counts == 0):
        raise AllZeroMass(
            "所有配对的对数池结果都完全矛盾",
            details={"rows": int(np.count_nonzero(counts == 0))},
        )
    weights = alive / counts
    return (pair_probs * weights[..., None]).sum(axis=-2)


def pair_layer_stack(stack: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """计算配对层：``(..., K, t)`` → ``(pair_probs (..., P, t), alive (..., P))``。

    配对顺序与 ``combinations(range(K), 2)`` 一致；调用方需保证 K 轴已按名称排序。
    """

    k = stack.shape[-2]
    left, right = _pair_index(k)
    with np.errstate(divide="ignore"):
        logs = np.log(stack)
    # 等权对数池：0.5·log q_a + 0.5·log q_b
    pair_log_mass = logs[..., left, :] * 0.5 + logs[..., right, :] * 0.5
    return exp_normalize(pair_log_mass)


def pairing_aggregate_stack(stack: np.ndarray) -> np.ndarray:
    """批量配对聚合：``(..., K, t)`` → ``(..., t)``，``K=1`` 时原样返回。"""

    array = np.asarray(stack, dtype=np.float64)
    if array.shape[-2] < 1:
        raise EmptyInput("聚合至少需要一个输入 PMF")
    if array.shape[-2] == 1:
        return array[..., 0, :].copy()
    pair_probs, alive = pair_layer_stack(array)
    return combine_pairs(pair_probs, alive)


def pairing_aggregate(attributor_pmfs: Sequence[NamedPMF]) -> AttributionTrace:
    """配对聚合并返回完整轨迹。

    参数：
        attributor_pmfs：``[(name, PMF), ...]``，名称唯一，``K >= 1``。

    返回：:class:`AttributionTrace`，``final`` 为最终 PMF。

    异常：
        AllZeroMass：全部配对都完全矛盾。
        UniverseMismatch：输入 PMF 的行为者全集不一致。
    """

    if not attributor_pmfs:
        raise EmptyInput("聚合至少需要一个输入 PMF")
    names = [name for name, _ in attributor_pmfs]
    _check_names(names)
    modules = dict(attributor_pmfs)
    if len(attributor_pmfs) == 1:
        only = attributor_pmfs[0][1]
        return AttributionTrace(module_outputs=modules, pair_outputs={}, final=only)

    ordered = sorted(attributor_pmfs, key=lambda item: item[0])
    stack = stack_pmfs([pmf for _, pmf in ordered])
    pair_probs, alive = pair_layer_stack(stack)
    final = combine_pairs(pair_probs, alive)

    keys = [(a, b) for a, b in combinations([name for name, _ in ordered], 2)]
    pair_outputs: dict[PairKey, PMF] = {}
    contradictory: list[PairKey] = []
    for key, probs, ok in zip(keys, pair_probs, alive):
        if ok:
            pair_outputs[key] = PMF(probs)
        else:
            contradictory.append(key)
    return AttributionTrace(
        module_outputs=modules,
        pair_outputs=pair_outputs,
        final=PMF(final),
        contradictory_pairs=tuple(contradictory),
    )


def repool_trace(trace: AttributionTrace) -> PMF:
    """由轨迹自身的配对层重新做线性池；结果应与 ``trace.final`` 逐位一致。"""

    if not trace.pair_outputs and not trace.contradictory_pairs:
        (only,) = trace.module_outputs.values()
        return only
    names = sorted(trace.module_outputs)
    keys = list(combinations(names, 2))
    t = next(iter(trace.module_outputs.values())).actor_universe_size
    probs = np.zeros((len(keys), t))
    alive = np.zeros(len(keys), dtype=bool)
    for row, key in enumerate(keys):
        pmf = trace.pair_outputs.get(key)
        if pmf is not None:
            probs[row] = pmf.probabilities
            alive[row] = True
    return PMF(combine_pairs(probs, alive))


# ---- 策略 -----------------------------------------------------------------


class Aggregator(Protocol):
    """聚合策略：把 ``(..., K, t)`` 的归因器输出合并为 ``(..., t)``。"""

    name: str

    def combine(self, stack: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True, slots=True)
class LinearAggregator:
    name: str = "linear"

    def combine(self, stack: np.ndarray) -> np.ndarray:
        return linear_pool_stack(stack)


@dataclass(frozen=True, slots=True)
class LogarithmicAggregator:
    name: str = "logarithmic"

    def combine(self, stack: np.ndarray) -> np.ndarray:
        return log_pool_stack(stack)


@dataclass(frozen=True, slots=True)
class PairingAggregator:
    name: str = "pairing"

    def combine(self, stack: np.ndarray) -> np.ndarray:
        return pairing_aggregate_stack(stack)


@dataclass(frozen=True, slots=True)
class HolderAggregator:
    alpha: float = 0.5
    name: str = "holder"

    def combine(self, stack: np.ndarray) -> np.ndarray:
        return holder_pool_stack(stack, alpha=self.alpha)


_FACTORIES: dict[str, Callable[[float | None], Aggregator]] = {
    "linear": lambda _alpha: LinearAggregator(),
    "logarithmic": lambda _alpha: LogarithmicAggregator(),
    "pairing": lambda _alpha: PairingAggregator(),
    "holder": lambda alpha: HolderAggregator(alpha=_holder_alpha() if alpha is None else alpha),
}

AGGREGATION_STRATEGIES: tuple[str, ...] = tuple(_FACTORIES)


def _holder_alpha() -> float:
    from sf_attribution.common.config import ConfigManager

    return ConfigManager.current().settings.pmf.holder_alpha


def get_aggregator(strategy: str, *, alpha: float | None = None) -> Aggregator:
    """按名称返回聚合策略：``linear`` / ``logarithmic`` / ``pairing`` / ``holder``。"""

    factory = _FACTORIES.get(strategy)
    if factory is None:
        raise UnknownStrategy(
            "未知的聚合策略",
            details={"strategy": strategy, "supported": list(AGGREGATION_STRATEGIES)},
        )
    return factory(alpha)


def _as_named(attributor_pmfs: Sequence[PMF] | Sequence[NamedPMF]) -> list[NamedPMF]:
    named: list[NamedPMF] = []
    for index, item in enumerate(attributor_pmfs):
        if isinstance(item, PMF):
            named.append((f"q{index:03d}", item))
        else:
            name, pmf = item
            named.append((str(name), pmf))
    return named


def aggregate(
    strategy: str,
    attributor_pmfs: Sequence[PMF] | Sequence[NamedPMF],
    *,
    alpha: float | None = None,
) -> PMF:
    """按策略合并归因器输出（均为等权）。

    参数：
        strategy：``linear`` / ``logarithmic`` / ``pairing`` / ``holder``。
        attributor_pmfs：PMF 列表，或 ``(name, PMF)`` 列表（配对顺序按名称字典序）。
        alpha：``holder`` 策略的参数，缺省读取 ``settings.pmf.holder_alpha``。
    """

    named = _as_named(attributor_pmfs)
    if not named:
        raise EmptyInput("聚合至少需要一个输入 PMF")
    if strategy == "pairing":
        return pairing_aggregate(named).final
    aggregator = get_aggregator(strategy, alpha=alpha)
    return PMF(aggregator.combine(stack_pmfs([pmf for _, pmf in named])))


def aggregate_stack(strategy: str, stack: np.ndarray, *, alpha: float | None = None) -> np.ndarray:
    """批量版 :func:`aggregate`；``stack`` 的 K 轴须按归因器名称字典序排列。"""

    return get_aggregator(strategy, alpha=alpha).combine(np.asarray(stack, dtype=np.float64))


# ---- 组合归因器 -----------------------------------------------------------


@dataclass(frozen=True, slots=True)
class CompositeAttributor:
    """组合归因器：自身也是 :class:`Attributor`，内部按策略合并成员的输出。

    成员按名称字典序排列后再聚合，保证配对顺序与批量路径一致。
    """

    name: str
    members: tuple[Attributor, ...]
    aggregator: Aggregator

    def __post_init__(self) -> None:
        if not self.members:
            raise EmptyInput("组合归因器至少需要一个成员", details={"name": self.name})
        members = tuple(sorted(self.members, key=lambda member: member.name))
        _check_names([member.name for member in members])
        object.__setattr__(self, "members", members)

    def attribute(self, incident: Incident) -> PMF:
        stack = stack_pmfs([member.attribute(incident) for member in self.members])
        return PMF(self.aggregator.combine(stack))


def explain(bindings: Sequence[AttributorBinding], incident: Incident) -> AttributionTrace:
    """对单个事件运行全部归因器并做配对聚合，返回三层轨迹供人工检查。"""

    if not bindings:
        raise EmptyInput("解释至少需要一个归因器")
    outputs = [(binding.name, attribute(binding, incident)) for binding in bindings]
    return pairing_aggregate(outputs)


__all__ = [
    "attribute",
    "pair_attributors",
    "ordered_pairs",
    "pairing_aggregate",
    "pairing_aggregate_stack",
    "pair_layer_stack",
    "combine_pairs",
    "repool_trace",
    "aggregate",
    "aggregate_stack",
    "get_aggregator",
    "explain",
    "Aggregator",
    "LinearAggregator",
    "LogarithmicAggregator",
    "PairingAggregator",
    "HolderAggregator",
    "CompositeAttributor",
    "AGGREGATION_STRATEGIES",
]
