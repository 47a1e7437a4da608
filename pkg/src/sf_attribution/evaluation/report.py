"""评估报告的数据结构与跨种子汇总。"""
from __future__ import annotations

import statistics
from dataclasses import dataclass, field
from typing import Any, Iterable, Literal, Sequence

import numpy as np

from sf_attribution.common.config import ConfigManager
from sf_attribution.common.exceptions import DegenerateRecallBase, EmptyInput, InvariantViolation
from sf_attribution.evaluation.metrics import (
    PRPoint,
    k_accuracy_cdf,
    max_precision,
    optimal_f_measure,
    pr_curve_arrays,
    ranks_of_true,
)
from sf_attribution.simulator.config import SimConfig
from sf_attribution.utils import stable_argmax

Phase = Literal["train", "predict", "aggregate"]

# 模块化归因器与单体基线在计时表中的名称
MODULAR = "modular"
MONOLITHIC = "monolithic"


@dataclass(frozen=True, slots=True)
class TimingRow:
    phase: Phase
    strategy: str
    seconds: float
    incidents: int


@dataclass(frozen=True, slots=True)
class TimingTable:
    """按 ``(phase, strategy)`` 索引的计时表。"""

    rows: tuple[TimingRow, ...] = ()

    def get(self, phase: Phase, strategy: str) -> float:
        for row in self.rows:
            if row.phase == phase and row.strategy == strategy:
                return row.seconds
        raise KeyError((phase, strategy))

    def has(self, phase: Phase, strategy: str) -> bool:
        return any(row.phase == phase and row.strategy == strategy for row in self.rows)

    def strategies(self, phase: Phase) -> list[str]:
        return [row.strategy for row in self.rows if row.phase == phase]

    def to_dicts(self) -> list[dict[str, Any]]:
        return [
            {"phase": row.phase, "strategy": row.strategy, "seconds": row.seconds, "incidents": row.incidents}
            for row in self.rows
        ]


@dataclass(frozen=True, slots=True, eq=False)
class StrategyReport:
    """单个策略在测试集上的指标。

    属性：
        cdf：长度为 ``t`` 的 k-准确率累计分布。
        curve：PR 曲线（跳过无归因的阈值）。
        f_measure / f_threshold：最优 F 值及其最小阈值；召回率无定义时为 ``0.0`` / ``None``。
        degenerate_recall：θ=0 时无任何正确归因。
    """

    strategy: str
    cdf: np.ndarray
    curve: tuple[PRPoint, ...]
    f_measure: float
    f_threshold: float | None
    max_precision: float
    recall_base: int
    incidents: int
    degenerate_recall: bool = False

    def cdf_at(self, k: int) -> float:
        """前 ``k`` 名内命中的比例，``k`` 超过 ``t`` 时取 1.0。"""

        if k < 1:
            raise ValueError("k must be >= 1")
        return float(self.cdf[min(k, self.cdf.size) - 1])

    def to_dict(self) -> dict[str, Any]:
        return {
            "strategy": self.strategy,
            "incidents": self.incidents,
            "k_accuracy": self.cdf.tolist(),
            "pr_curve": [
                {
                    "theta": p.threshold,
                    "precision": p.precision,
                    "recall": p.recall,
                    "standard_recall": p.standard_recall,
                    "attributed": p.attributed,
                    "correct": p.correct,
                }
                for p in self.curve
            ],
            "optimal_f_measure": self.f_measure,
            "optimal_threshold": self.f_threshold,
            "max_precision": self.max_precision,
            "recall_base": self.recall_base,
            "degenerate_recall": self.degenerate_recall,
        }


def build_strategy_report(
    strategy: str,
    probabilities: np.ndarray,
    labels: np.ndarray,
    thresholds: np.ndarray,
) -> StrategyReport:
    """由 ``(n, t)`` 预测矩阵计算完整指标并校验单调性。"""

    probs = np.asarray(probabilities, dtype=np.float64)
    if probs.shape[0] == 0:
        raise EmptyInput("测试集为空，无法评估", details={"strategy": strategy})
    t = probs.shape[1]
    cdf = k_accuracy_cdf(ranks_of_true(probs, labels), t)
    try:
        curve = tuple(pr_curve_arrays(probs, labels, thresholds))
    except DegenerateRecallBase:
        report = StrategyReport(
            strategy=strategy,
            cdf=cdf,
            curve=(),
            f_measure=0.0,
            f_threshold=None,
            max_precision=0.0,
            recall_base=0,
            incidents=probs.shape[0],
            degenerate_recall=True,
        )
    else:
        f, theta = optimal_f_measure(curve)
        report = StrategyReport(
            strategy=strategy,
            cdf=cdf,
            curve=curve,
            f_measure=f,
            f_threshold=theta,
            max_precision=max_precision(curve),
            recall_base=int(np.count_nonzero(stable_argmax(probs) == labels)),
            incidents=probs.shape[0],
        )
    check_report_invariants(report)
    return report


def check_report_invariants(report: StrategyReport) -> None:
    """累计分布单调且终值为 1；召回率与归因数随阈值单调不增；精确率、召回率位于 [0, 1]。

    异常：
        InvariantViolation：任一性质不成立。
    """

    cdf = report.cdf
    if np.any(np.diff(cdf) < 0.0) or not np.isclose(cdf[-1], 1.0, rtol=0.0, atol=1e-12):
        raise InvariantViolation("k-准确率累计分布不单调或终值不为 1", details={"strategy": report.strategy})
    recalls = [p.recall for p in report.curve]
    attributed = [p.attributed for p in report.curve]
    if any(b > a for a, b in zip(recalls, recalls[1:])) or any(b > a for a, b in zip(attributed, attributed[1:])):
        raise InvariantViolation("召回率或归因数随阈值上升", details={"strategy": report.strategy})
    for p in report.curve:
        if not (0.0 <= p.precision <= 1.0 and 0.0 <= p.recall <= 1.0 and p.correct <= p.attributed):
            raise InvariantViolation(
                "精确率或召回率越界", details={"strategy": report.strategy, "threshold": p.threshold}
            )


@dataclass(frozen=True, slots=True, eq=False)
class EvaluationReport:
    """一次评估运行（一个数据集、一个种子）的完整结果。"""

    seed: int
    config: SimConfig
    train_incidents: int
    test_incidents: int
    strategies: dict[str, StrategyReport]
    timings: TimingTable
    grid_size: int
    metadata: dict[str, Any] = field(default_factory=dict)

    def __getitem__(self, strategy: str) -> StrategyReport:
        return self.strategies[strategy]

    def to_dict(self) -> dict[str, Any]:
        return {
            "seed": self.seed,
            "config": self.config.model_dump(mode="json"),
            "counts": {"train": self.train_incidents, "test": self.test_incidents},
            "grid_size": self.grid_size,
            "metadata": dict(self.metadata),
            "strategies": {name: report.to_dict() for name, report in self.strategies.items()},
            "timings": self.timings.to_dicts(),
        }


@dataclass(frozen=True, slots=True)
class SeedSummary:
    """跨种子的中位数汇总与方向性检查。

    ``checks`` 中的值为 ``None`` 表示参与比较的策略缺失。
    """

    seeds: tuple[int, ...]
    k: int
    medians: dict[str, dict[str, float]]
    checks: dict[str, bool | None]

    def to_dict(self) -> dict[str, Any]:
        return {"seeds": list(self.seeds), "k": self.k, "medians": self.medians, "checks": self.checks}


def summarize_seeds(reports: Sequence[EvaluationReport], *, k: int | None = None) -> SeedSummary:
    """计算各策略 CDF@k、最优 F 值与最大精确率的中位数，并检查：

    * 配对聚合器的 CDF@k 不低于单体基线；
    * 配对聚合器的最大精确率不低于其他每个策略。
    """

    if not reports:
        raise EmptyInput("没有可汇总的评估报告")
    k = ConfigManager.current().settings.evaluation.summary_k if k is None else k
    names = _ordered_union(report.strategies for report in reports)
    medians: dict[str, dict[str, float]] = {}
    for name in names:
        present = [report[name] for report in reports if name in report.strategies]
        medians[name] = {
            "cdf_at_k": statistics.median(r.cdf_at(k) for r in present),
            "optimal_f_measure": statistics.median(r.f_measure for r in present),
            "max_precision": statistics.median(r.max_precision for r in present),
        }

    checks: dict[str, bool | None] = {}
    pairing = medians.get("pairing")
    monolithic = medians.get(MONOLITHIC)
    checks["pairing_cdf_at_k_ge_monolithic"] = (
        None if pairing is None or monolithic is None else pairing["cdf_at_k"] >= monolithic["cdf_at_k"]
    )
    for name in names:
        if name == "pairing":
            continue
        checks[f"pairing_max_precision_ge_{name}"] = (
            None if pairing is None else pairing["max_precision"] >= medians[name]["max_precision"]
        )
    return SeedSummary(seeds=tuple(r.seed for r in reports), k=k, medians=medians, checks=checks)


def _ordered_union(groups: Iterable[Iterable[str]]) -> list[str]:
    seen: dict[str, None] = {}
    for group in groups:
        for name in group:
            seen.setdefault(name, None)
    return list(seen)


__all__ = [
    "TimingRow",
    "TimingTable",
    "StrategyReport",
    "EvaluationReport",
    "SeedSummary",
    "build_strategy_report",
    "check_report_invariants",
    "summarize_seeds",
    "MODULAR",
    "MONOLITHIC",
]
