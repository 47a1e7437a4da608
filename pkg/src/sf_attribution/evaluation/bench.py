"""运行时基准：训练、逐策略预测与纯聚合耗时。

基准固定在单线程下运行，每项取 ``repeat`` 次中的最小值：

* ``train``：``modular``（全部单特征归因器）与 ``monolithic``（全特征基线）；
* ``predict``：每个策略在测试集上的端到端预测；
* ``aggregate``：池化策略仅对预先算好的模块输出做聚合的耗时。
"""
from __future__ import annotations

import time
from typing import Sequence

from sf_attribution.common.exceptions import EmptyInput
from sf_attribution.common.logging import LoggerFactory
from sf_attribution.evaluation.report import MODULAR, MONOLITHIC, TimingRow, TimingTable
from sf_attribution.evaluation.runner import (
    POOLED_STRATEGIES,
    aggregate_modules,
    baseline_probabilities,
    fit_models,
    module_stack,
    select_strategies,
)
from sf_attribution.simulator.generator import Dataset

_logger = LoggerFactory.create_default_logger(__name__)


def _timed(action) -> tuple[float, object]:
    started = time.perf_counter()
    result = action()
    return time.perf_counter() - started, result


def bench(dataset: Dataset, strategies: Sequence[str], *, repeat: int = 1) -> TimingTable:
    """测量训练与预测耗时。

    参数：
        dataset：含训练、测试两部分的数据集。
        strategies：需要计时的策略，例如 ``["linear", "pairing", "monolithic"]``。
        repeat：重复次数，每项取最小值，``>= 1``。

    返回：:class:`TimingTable`；池化策略同时有 ``predict`` 与 ``aggregate`` 两行。
    """

    selected = select_strategies(strategies)
    repeat = max(1, int(repeat))
    train, test = dataset.train, dataset.test
    if not test:
        raise EmptyInput("测试集为空，无法计时", details={"seed": dataset.config.seed})
    config = dataset.config
    best: dict[tuple[str, str], float] = {}

    def record(phase: str, strategy: str, seconds: float) -> None:
        key = (phase, strategy)
        best[key] = min(seconds, best.get(key, float("inf")))

    pooled = [name for name in selected if name in POOLED_STRATEGIES]
    for _ in range(repeat):
        models = fit_models(train, config.t, config.m)
        record("train", MODULAR, models.modular_seconds)
        record("train", MONOLITHIC, models.baseline_seconds)

        if pooled:
            module_seconds, stack = _timed(lambda: module_stack(models.bindings, test, workers=1))
            for name in pooled:
                aggregate_seconds, _ = _timed(lambda: aggregate_modules(name, stack))
                record("predict", name, module_seconds + aggregate_seconds)
                record("aggregate", name, aggregate_seconds)
        if MONOLITHIC in selected:
            seconds, _ = _timed(lambda: baseline_probabilities(models.baseline, test, workers=1))
            record("predict", MONOLITHIC, seconds)

    rows = [TimingRow("train", MODULAR, best[("train", MODULAR)], len(train))]
    rows.append(TimingRow("train", MONOLITHIC, best[("train", MONOLITHIC)], len(train)))
    for name in selected:
        rows.append(TimingRow("predict", name, best[("predict", name)], len(test)))
    for name in pooled:
        rows.append(TimingRow("aggregate", name, best[("aggregate", name)], len(test)))
    table = TimingTable(tuple(rows))
    _logger.info("基准完成", extra={"repeat": repeat, "rows": len(rows), "test": len(test)})
    return table


__all__ = ["bench"]
