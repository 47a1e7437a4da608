"""归因质量指标：k-rank 与其累计分布、阈值扫描的微平均精确率/召回率、最优 F 值。

并列一律按行为者编号升序打破（与 :meth:`PMF.argmax` 一致）。

召回率有两种口径：

* ``recall``：分母为阈值 0 时被正确归因的事件数（即 argmax 正确的事件数）；
* ``standard_recall``：分母为全部事件数。
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from sf_attribution.common.exceptions import (
    DegenerateRecallBase,
    EmptyInput,
    ErrorCode,
    InputValidationError,
    UniverseMismatch,
)
from sf_attribution.pmf.pmf import PMF
from sf_attribution.utils import stable_argmax


@dataclass(frozen=True, slots=True)
class PRPoint:
    """阈值 θ 下的一个精确率/召回率点。"""

    threshold: float
    precision: float
    recall: float
    standard_recall: float
    attributed: int
    correct: int

    @property
    def f_measure(self) -> float:
        total = self.precision + self.recall
        return 0.0 if total == 0.0 else 2.0 * self.precision * self.recall / total


def rank_of_true(pmf: PMF, true_actor: int) -> int:
    """真实行为者在降序排列中的名次（从 1 开始）。

    例如 ``[0.4, 0.4, 0.2]`` 中行为者 1 的名次为 2（并列时编号小者在前）。
    """

    t = pmf.actor_universe_size
    if not 0 <= true_actor < t:
        raise UniverseMismatch("真实行为者超出 PMF 的行为者全集", details={"true_actor": true_actor, "t": t})
    probs = pmf.probabilities
    p = probs[true_actor]
    return int(np.count_nonzero(probs > p) + np.count_nonzero(probs[:true_actor] == p) + 1)


def ranks_of_true(probabilities: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """批量名次：``(n, t)`` 概率矩阵与 ``(n,)`` 标签 → ``(n,)`` 名次。"""

    probs = np.asarray(probabilities, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    n, t = probs.shape
    if labels.shape != (n,):
        raise InputValidationError(
            ErrorCode.BAD_REQUEST, "标签数量与预测数量不一致", details={"n": n, "labels": list(labels.shape)}
        )
    if n and (labels.min() < 0 or labels.max() >= t):
        raise UniverseMismatch("标签超出行为者全集", details={"t": t})
    p_true = probs[np.arange(n), labels][:, None]
    higher = np.count_nonzero(probs > p_true, axis=1)
    earlier_ties = np.count_nonzero((probs == p_true) & (np.arange(t)[None, :] < labels[:, None]), axis=1)
    return higher + earlier_ties + 1


def k_accuracy_cdf(ranks: Sequence[int] | np.ndarray, t: int) -> np.ndarray:
    """k-准确率累计分布：第 ``k`` 项（下标从 0 开始）为名次 ``<= k+1`` 的事件比例。

    例如 ``ranks=[1, 1, 2], t=2`` → ``[2/3, 1.0]``。

    异常：
        EmptyInput：没有任何名次。
    """

    values = np.asarray(ranks, dtype=np.int64)
    if values.size == 0:
        raise EmptyInput("名次列表为空")
    if values.min() < 1 or values.max() > t:
        raise InputValidationError(
            ErrorCode.BAD_REQUEST,
            "名次必须位于 [1, t]",
            details={"min": int(values.min()), "max": int(values.max()), "t": t},
        )
    counts = np.bincount(values - 1, minlength=t)
    return np.cumsum(counts) / values.size


def _check_thresholds(thresholds: Sequence[float] | np.ndarray) -> np.ndarray:
    grid = np.asarray(thresholds, dtype=np.float64)
    if grid.ndim != 1 or grid.size == 0:
        raise InputValidationError(ErrorCode.BAD_REQUEST, "阈值必须是非空一维序列")
    if grid.min() < 0.0 or grid.max() > 1.0 or np.any(np.diff(grid) < 0.0):
        raise InputValidationError(ErrorCode.BAD_REQUEST, "阈值必须升序且位于 [0, 1]")
    return grid


def pr_curve_arrays(
    probabilities: np.ndarray,
    labels: np.ndarray,
    thresholds: Sequence[float] | np.ndarray,
) -> list[PRPoint]:
    """批量版 :func:`pr_curve`：``(n, t)`` 概率矩阵 + ``(n,)`` 标签。"""

    probs = np.asarray(probabilities, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if probs.ndim != 2 or probs.shape[0] == 0:
        raise EmptyInput("预测列表为空")
    grid = _check_thresholds(thresholds)
    n = probs.shape[0]

    top = probs.max(axis=1)
    hit = stable_argmax(probs) == labels
    recall_base = int(np.count_nonzero(hit))
    if recall_base == 0:
        raise DegenerateRecallBase("阈值为 0 时没有任何正确归因，召回率无定义", details={"n": n})

    # 最大概率 >= θ 的事件被归因
    all_sorted = np.sort(top)
    hit_sorted = np.sort(top[hit])
    attributed = n - np.searchsorted(all_sorted, grid, side="left")
    correct = recall_base - np.searchsorted(hit_sorted, grid, side="left")

    points: list[PRPoint] = []
    for theta, a, c in zip(grid, attributed, correct):
        if a == 0:
            continue
        points.append(
            PRPoint(
                threshold=float(theta),
                precision=float(c) / float(a),
                recall=float(c) / recall_base,
                standard_recall=float(c) / n,
                attributed=int(a),
                correct=int(c),
            )
        )
    return points


def pr_curve(
    predictions: Sequence[tuple[PMF, int]],
    thresholds: Sequence[float] | np.ndarray,
) -> list[PRPoint]:
    """阈值扫描的微平均精确率/召回率曲线。

    对每个 θ：最大概率 ``>= θ`` 的事件被归因给 argmax；精确率 = 正确数 / 归因数，
    召回率 = θ 下正确数 / θ=0 下正确数。没有任何事件被归因的 θ 不产生点。

    参数：
        predictions：``[(PMF, 真实行为者), ...]``。
        thresholds：``[0, 1]`` 内的升序阈值。

    异常：
        EmptyInput：预测为空。
        DegenerateRecallBase：θ=0 时没有任何正确归因。
    """

    if not predictions:
        raise EmptyInput("预测列表为空")
    t = predictions[0][0].actor_universe_size
    if any(pmf.actor_universe_size != t for pmf, _ in predictions):
        raise UniverseMismatch("预测 PMF 的行为者全集不一致")
    probs = np.stack([pmf.probabilities for pmf, _ in predictions])
    labels = np.fromiter((actor for _, actor in predictions), dtype=np.int64, count=len(predictions))
    return pr_curve_arrays(probs, labels, thresholds)


def optimal_f_measure(curve: Sequence[PRPoint]) -> tuple[float, float]:
    """曲线上的最大 F 值及取得它的最小阈值。

    异常：
        EmptyInput：曲线为空。
    """

    if not curve:
        raise EmptyInput("PR 曲线为空")
    best_f = -1.0
    best_theta = 0.0
    for point in sorted(curve, key=lambda p: p.threshold):
        f = point.f_measure
        if f > best_f:
            best_f, best_theta = f, point.threshold
    return best_f, best_theta


def max_precision(curve: Sequence[PRPoint]) -> float:
    if not curve:
        raise EmptyInput("PR 曲线为空")
    return max(point.precision for point in curve)


__all__ = [
    "PRPoint",
    "rank_of_true",
    "ranks_of_true",
    "k_accuracy_cdf",
    "pr_curve",
    "pr_curve_arrays",
    "optimal_f_measure",
    "max_precision",
]
