"""意见池：线性池、对数池与 Hölder 池。

每种池都有两层接口：

* ``*_stack``：作用于形状 ``(..., K, t)`` 的 numpy 数组，前导维度为批次（例如整个测试集），
  返回形状 ``(..., t)``；评估与基准测试直接使用。
* ``linear_pool`` / ``log_pool`` / ``holder_pool``：作用于 :class:`PMF` 列表的便捷封装，
  内部调用同一个内核，保证单条与批量结果逐位一致。

对数池在对数域求和后做 exp-normalize（先减去最大对数质量），输入中的精确 0 会使对应行为者的
输出质量为 0，而不是被抬升到某个下限。
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from sf_attribution.common.exceptions import AllZeroMass, EmptyInput, InvalidPMF, InvalidWeights, UniverseMismatch
from sf_attribution.pmf.pmf import PMF, PoolWeights, endpoint_tolerance

# |alpha| 低于该值时改用 log1p/expm1 形式，避免 (1+ε)^(1/α) 的精度损失
_SMALL_ALPHA = 1e-3


def _resolve_weights(weights: PoolWeights | np.ndarray | Sequence[float] | None, k: int) -> np.ndarray:
    if weights is None:
        return np.full(k, 1.0 / k)
    if isinstance(weights, PoolWeights):
        resolved = weights.as_array()
    else:
        resolved = PoolWeights.from_sequence(np.asarray(weights, dtype=np.float64).tolist()).as_array()
    if resolved.size != k:
        raise InvalidWeights("权重数量与输入数量不一致", details={"weights": int(resolved.size), "inputs": k})
    return resolved


def _check_stack(stack: np.ndarray) -> np.ndarray:
    array = np.asarray(stack, dtype=np.float64)
    if array.ndim < 2:
        raise InvalidPMF("池化输入必须至少是 (K, t) 二维数组", details={"shape": list(array.shape)})
    if array.shape[-2] < 1:
        raise EmptyInput("池化至少需要一个输入 PMF")
    return array


def exp_normalize(log_mass: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """对最后一维做数值稳定的 exp-normalize。

    返回：``(probabilities, alive)``；``alive`` 为前导维度上的布尔数组，
    ``False`` 表示该行所有对数质量都是 ``-inf``（完全矛盾），对应概率行填 0。
    """

    peak = log_mass.max(axis=-1, keepdims=True)
    alive = np.isfinite(peak)
    safe_peak = np.where(alive, peak, 0.0)
    with np.errstate(invalid="ignore"):
        shifted = np.exp(log_mass - safe_peak)
    shifted = np.where(alive, shifted, 0.0)
    totals = shifted.sum(axis=-1, keepdims=True)
    probabilities = shifted / np.where(alive, totals, 1.0)
    return probabilities, alive[..., 0]


def _strict(probabilities: np.ndarray, alive: np.ndarray) -> np.ndarray:
    if not np.all(alive):
        raise AllZeroMass(
            "池化结果所有行为者质量均为 0（输入完全矛盾）",
            details={"contradictory_rows": int(np.size(alive) - np.count_nonzero(alive))},
        )
    return probabilities


# ---- 批量内核 -------------------------------------------------------------


def linear_pool_stack(stack: np.ndarray, weights: PoolWeights | Sequence[float] | None = None) -> np.ndarray:
    """线性池：``g(θ) = Σ_k w_k q_k(θ)``。权重已归一，结果截断到 ``[0, 1]`` 以吸收舍入误差。"""

    array = _check_stack(stack)
    w = _resolve_weights(weights, array.shape[-2])
    return np.clip(np.einsum("...kt,k->...t", array, w), 0.0, 1.0)


def log_mass_stack(stack: np.ndarray, weights: PoolWeights | Sequence[float] | None = None) -> np.ndarray:
    """对数池的未归一化对数质量 ``Σ_k w_k log q_k(θ)``；权重为 0 的输入不参与。"""

    array = _check_stack(stack)
    w = _resolve_weights(weights, array.shape[-2])
    active = (w > 0.0)[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.log(array)
        contributions = np.where(active, logs * w[:, None], 0.0)
    return contributions.sum(axis=-2)


def log_pool_stack(stack: np.ndarray, weights: PoolWeights | Sequence[float] | None = None) -> np.ndarray:
    """对数池：``g(θ) = c · Π_k q_k(θ)^{w_k}``。

    异常：AllZeroMass，任一批次行中每个行为者都至少有一个输入为 0。
    """

    return _strict(*exp_normalize(log_mass_stack(stack, weights)))


def holder_pool_stack(
    stack: np.ndarray,
    weights: PoolWeights | Sequence[float] | None = None,
    *,
    alpha: float,
) -> np.ndarray:
    """Hölder（幂均值）池：``g(θ) ∝ (Σ_k w_k q_k(θ)^α)^{1/α}``，``alpha=0`` 退化为对数池。

    ``alpha=1`` 与线性池一致；``alpha→0`` 趋近对数池；``alpha<0`` 时任一正权输入为 0 则输出为 0。
    ``alpha`` 距 0 或 1 在 ``endpoint_tolerance`` 以内时直接使用对数池或线性池。
    """

    tolerance = endpoint_tolerance()
    if abs(alpha) <= tolerance:
        return log_pool_stack(stack, weights)
    if abs(alpha - 1.0) <= tolerance:
        return linear_pool_stack(stack, weights)
    array = _check_stack(stack)
    w = _resolve_weights(weights, array.shape[-2])
    active = (w > 0.0)[:, None]
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if abs(alpha) < _SMALL_ALPHA:
            # log Σ w q^α = log1p(Σ w (q^α - 1))，依赖 Σ w = 1
            terms = np.where(active, np.expm1(alpha * np.log(array)) * w[:, None], 0.0)
            inner = np.log1p(terms.sum(axis=-2))
        else:
            terms = np.where(active, np.power(array, alpha) * w[:, None], 0.0)
            inner = np.log(terms.sum(axis=-2))
        log_mass = inner / alpha
    log_mass = np.where(np.isnan(log_mass), -np.inf, log_mass)
    return _strict(*exp_normalize(log_mass))


# ---- PMF 封装 -------------------------------------------------------------


def stack_pmfs(inputs: Sequence[PMF]) -> np.ndarray:
    """将 PMF 列表堆叠为 ``(K, t)`` 数组，并校验行为者全集一致。"""

    if not inputs:
        raise EmptyInput("池化至少需要一个输入 PMF")
    sizes = {pmf.actor_universe_size for pmf in inputs}
    if len(sizes) != 1:
        raise UniverseMismatch("输入 PMF 的行为者全集不一致", details={"sizes": sorted(sizes)})
    return np.stack([pmf.probabilities for pmf in inputs])


def linear_pool(inputs: Sequence[PMF], weights: PoolWeights | None = None) -> PMF:
    """线性意见池（算术加权平均）。``weights=None`` 表示等权 ``1/K``。"""

    return PMF(linear_pool_stack(stack_pmfs(inputs), weights))


def log_pool(inputs: Sequence[PMF], weights: PoolWeights | None = None) -> PMF:
    """对数意见池（归一化加权几何平均）。``weights=None`` 表示等权 ``1/K``。"""

    return PMF(log_pool_stack(stack_pmfs(inputs), weights))


def holder_pool(inputs: Sequence[PMF], weights: PoolWeights | None = None, alpha: float = 1.0) -> PMF:
    """Hölder 意见池，参见 :func:`holder_pool_stack`。"""

    return PMF(holder_pool_stack(stack_pmfs(inputs), weights, alpha=alpha))


__all__ = [
    "linear_pool",
    "log_pool",
    "holder_pool",
    "linear_pool_stack",
    "log_pool_stack",
    "log_mass_stack",
    "holder_pool_stack",
    "exp_normalize",
    "stack_pmfs",
]
