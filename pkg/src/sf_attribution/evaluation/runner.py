"""评估编排：训练 → 逐事件模块归因 → 批量聚合 → 指标。

模块化预测分两段：

1. 每个测试事件依次调用各个具体归因器（:func:`attribute`），得到 ``(n, K, t)`` 的模块输出；
2. 对模块输出按策略做批量聚合，按 ``CHUNK_ROWS`` 行分块以控制内存。

单体基线逐事件调用 :meth:`TrainedAttributor.predict`。
"""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from sf_attribution.attribution.aggregator import aggregate_stack, attribute
from sf_attribution.attribution.types import AttributorBinding, Incident
from sf_attribution.common.config import ConfigManager
from sf_attribution.common.exceptions import EmptyInput, EmptyTrainingSet, UnknownStrategy
from sf_attribution.common.logging import LoggerFactory
from sf_attribution.evaluation.report import (
    MODULAR,
    MONOLITHIC,
    EvaluationReport,
    TimingRow,
    TimingTable,
    build_strategy_report,
)
from sf_attribution.models.gaussian import TrainedAttributor, TrainingSet, fit_baseline, make_modular_bindings
from sf_attribution.simulator.generator import Dataset
from sf_attribution.utils import threshold_grid

_logger = LoggerFactory.create_default_logger(__name__)

CHUNK_ROWS = 2048

POOLED_STRATEGIES = ("linear", "logarithmic", "pairing", "holder")
EVALUATION_STRATEGIES = POOLED_STRATEGIES + (MONOLITHIC,)


@dataclass(frozen=True, slots=True)
class FittedModels:
    """训练得到的模块化归因器（按名称排序）与单体基线。"""

    bindings: tuple[AttributorBinding, ...]
    baseline: TrainedAttributor
    modular_seconds: float = 0.0
    baseline_seconds: float = 0.0


def fit_models(train: Sequence[Incident], t: int, m: int) -> FittedModels:
    """在训练集上为每个特征训练一个归因器，并训练全特征的单体基线。

    异常：
        EmptyTrainingSet：训练集为空。
    """

    training = TrainingSet.from_incidents(train)
    if len(training) == 0:
        raise EmptyTrainingSet("训练集为空，无法拟合")
    started = time.perf_counter()
    bindings = make_modular_bindings(training, m, t)
    modular_seconds = time.perf_counter() - started
    started = time.perf_counter()
    baseline = fit_baseline(training, t)
    baseline_seconds = time.perf_counter() - started
    return FittedModels(
        bindings=tuple(sorted(bindings, key=lambda b: b.name)),
        baseline=baseline,
        modular_seconds=modular_seconds,
        baseline_seconds=baseline_seconds,
    )


def _chunks(n: int, size: int) -> list[slice]:
    return [slice(start, min(start + size, n)) for start in range(0, n, size)]


def _map_rows(fill, n: int, workers: int) -> None:
    """对 ``[0, n)`` 的分块调用 ``fill(slice)``；``workers > 1`` 时使用线程池。"""

    parts = _chunks(n, CHUNK_ROWS)
    if workers <= 1 or len(parts) <= 1:
        for part in parts:
            fill(part)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(fill, parts))


def module_stack(
    bindings: Sequence[AttributorBinding],
    incidents: Sequence[Incident],
    *,
    workers: int = 1,
) -> np.ndarray:
    """逐事件调用各归因器：返回 ``(n, K, t)``，K 轴顺序与 ``bindings`` 一致。"""

    if not bindings:
        raise EmptyInput("至少需要一个归因器")
    n, k = len(incidents), len(bindings)
    t = bindings[0].model.t if bindings[0].model is not None else 0
    out = np.empty((n, k, t))

    def fill(rows: slice) -> None:
        for row in range(rows.start, rows.stop):
            incident = incidents[row]
            for col, binding in enumerate(bindings):
                out[row, col] = attribute(binding, incident).probabilities

    _map_rows(fill, n, workers)
    return out


def baseline_probabilities(
    baseline: TrainedAttributor,
    incidents: Sequence[Incident],
    *,
    workers: int = 1,
) -> np.ndarray:
    """单体基线逐事件预测：返回 ``(n, t)``。"""

    out = np.empty((len(incidents), baseline.t))

    def fill(rows: slice) -> None:
        for row in range(rows.start, rows.stop):
            out[row] = baseline.predict(incidents[row]).probabilities

    _map_rows(fill, len(incidents), workers)
    return out


def aggregate_modules(strategy: str, stack: np.ndarray) -> np.ndarray:
    """分块批量聚合 ``(n, K, t)`` → ``(n, t)``。"""

    n, _, t = stack.shape
    out = np.empty((n, t))
    for rows in _chunks(n, CHUNK_ROWS):
        out[rows] = aggregate_stack(strategy, stack[rows])
    return out


def select_strategies(strategies: Sequence[str]) -> tuple[str, ...]:
    """去重并校验策略名称，保持原有顺序。"""

    selected = tuple(dict.fromkeys(strategies))
    if not selected:
        raise EmptyInput("至少需要一个评估策略")
    unknown = [name for name in selected if name not in EVALUATION_STRATEGIES]
    if unknown:
        raise UnknownStrategy(
            "未知的评估策略", details={"unknown": unknown, "supported": list(EVALUATION_STRATEGIES)}
        )
    return selected


def predict_split(
    models: FittedModels,
    incidents: Sequence[Incident],
    strategies: Sequence[str],
    *,
    workers: int = 1,
) -> tuple[dict[str, np.ndarray], list[TimingRow]]:
    """按每个策略预测给定事件，返回 ``({strategy: (n, t)}, 计时行)``。

    池化策略共享同一份模块输出；其 ``predict`` 计时为模块归因耗时加该策略的聚合耗时。
    """

    selected = select_strategies(strategies)
    n = len(incidents)
    predictions: dict[str, np.ndarray] = {}
    rows: list[TimingRow] = []

    pooled = [name for name in selected if name in POOLED_STRATEGIES]
    if pooled:
        started = time.perf_counter()
        stack = module_stack(models.bindings, incidents, workers=workers)
        module_seconds = time.perf_counter() - started
        for name in pooled:
            started = time.perf_counter()
            predictions[name] = aggregate_modules(name, stack)
            aggregate_seconds = time.perf_counter() - started
            rows.append(TimingRow("predict", name, module_seconds + aggregate_seconds, n))
            rows.append(TimingRow("aggregate", name, aggregate_seconds, n))

    if MONOLITHIC in selected:
        started = time.perf_counter()
        predictions[MONOLITHIC] = baseline_probabilities(models.baseline, incidents, workers=workers)
        rows.append(TimingRow("predict", MONOLITHIC, time.perf_counter() - started, n))

    return {name: predictions[name] for name in selected}, rows


def run_evaluation(
    dataset: Dataset,
    strategies: Sequence[str] | None = None,
    *,
    grid_size: int | None = None,
    workers: int | None = None,
    models: FittedModels | None = None,
) -> EvaluationReport:
    """在数据集上训练并评估各策略。

    参数：
        dataset：含训练、测试两部分的数据集。
        strategies：策略列表，缺省读取 ``settings.evaluation.strategies``。
        grid_size：阈值网格点数，缺省读取 ``settings.evaluation.threshold_grid_size``。
        workers：预测线程数，缺省读取 ``settings.evaluation.workers``。
        models：已训练的模型；为 ``None`` 时在训练集上训练。带有训练耗时的模型会在计时表中产生 ``train`` 行。

    返回：:class:`EvaluationReport`。

    异常：
        EmptyTrainingSet：训练集为空。
        EmptyInput：测试集为空。
        InvariantViolation：指标单调性被破坏。
    """

    settings = ConfigManager.current().settings.evaluation
    strategies = list(settings.strategies if strategies is None else strategies)
    grid_size = settings.threshold_grid_size if grid_size is None else grid_size
    workers = settings.workers if workers is None else workers
    config = dataset.config
    test = dataset.test
    if not test:
        raise EmptyInput("测试集为空，无法评估", details={"seed": config.seed})

    _logger.info(
        "开始评估",
        extra={"seed": config.seed, "train": len(dataset.train), "test": len(test), "strategies": ",".join(strategies)},
    )
    timing_rows: list[TimingRow] = []
    if models is None:
        models = fit_models(dataset.train, config.t, config.m)
    if models.modular_seconds or models.baseline_seconds:
        timing_rows.append(TimingRow("train", MODULAR, models.modular_seconds, len(dataset.train)))
        timing_rows.append(TimingRow("train", MONOLITHIC, models.baseline_seconds, len(dataset.train)))

    predictions, predict_rows = predict_split(models, test, strategies, workers=workers)
    timing_rows.extend(predict_rows)

    labels = np.fromiter((incident.label for incident in test), dtype=np.int64, count=len(test))
    grid = threshold_grid(grid_size)
    reports = {name: build_strategy_report(name, probs, labels, grid) for name, probs in predictions.items()}
    _logger.info(
        "评估完成",
        extra={"seed": config.seed, **{f"top1_{name}": round(r.cdf_at(1), 4) for name, r in reports.items()}},
    )
    return EvaluationReport(
        seed=config.seed,
        config=config,
        train_incidents=len(dataset.train),
        test_incidents=len(test),
        strategies=reports,
        timings=TimingTable(tuple(timing_rows)),
        grid_size=grid_size,
        metadata={
            "tie_break": "ascending actor id",
            "recall": "correct at theta / correct at theta=0",
            "standard_recall": "correct at theta / all test incidents",
            "skipped_points": "thresholds with no attributed incident are omitted",
            "workers": workers,
        },
    )


__all__ = [
    "FittedModels",
    "fit_models",
    "module_stack",
    "baseline_probabilities",
    "aggregate_modules",
    "predict_split",
    "select_strategies",
    "run_evaluation",
    "POOLED_STRATEGIES",
    "EVALUATION_STRATEGIES",
    "CHUNK_ROWS",
]
