"""评估报告的文件导出。

一次运行写出：

- ``report.json``：完整的 :class:`EvaluationReport`；
- ``k_accuracy.csv``：``k, proportion, strategy``；
- ``pr_curve.csv``：``theta, precision, recall, standard_recall, strategy``；
- ``timings.csv``：``phase, strategy, seconds, incidents``。

多种子运行另写 ``summary.json``（:class:`SeedSummary`）。生成数据集时另写数据集画像：

- ``actor_counts.csv``：``actor, train, test, total``，每个行为者的事件数；
- ``activity.csv``：``step, actor, activity``，被追踪行为者逐时间步的活跃度。

CSV 是交给外部绘图工具的接口。
"""
from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from sf_attribution.common.exceptions import ErrorCode, InputValidationError, StorageError
from sf_attribution.common.logging import LoggerFactory
from sf_attribution.evaluation.report import EvaluationReport, SeedSummary, TimingTable
from sf_attribution.simulator.generator import Dataset

K_ACCURACY_FIELDS = ("k", "proportion", "strategy")
PR_CURVE_FIELDS = ("theta", "precision", "recall", "standard_recall", "strategy")
TIMING_FIELDS = ("phase", "strategy", "seconds", "incidents")
ACTOR_COUNT_FIELDS = ("actor", "train", "test", "total")
ACTIVITY_FIELDS = ("step", "actor", "activity")


class ReportWriter:
    """把报告写入输出目录，目录不存在时自动创建。"""

    def __init__(self, out_dir: str | Path) -> None:
        self._out_dir = Path(out_dir)
        self._logger = LoggerFactory.create_default_logger(__name__)

    @property
    def out_dir(self) -> Path:
        return self._out_dir

    def write_report(self, report: EvaluationReport) -> list[Path]:
        """写出 JSON 报告与 k-准确率、PR 曲线、计时三个 CSV。"""

        paths = [
            self._write_json("report.json", report.to_dict()),
            self._write_csv("k_accuracy.csv", K_ACCURACY_FIELDS, self._k_accuracy_rows(report)),
            self._write_csv("pr_curve.csv", PR_CURVE_FIELDS, self._pr_rows(report)),
            self.write_timings(report.timings),
        ]
        self._logger.info(
            "评估报告已写出",
            extra={"out_dir": str(self._out_dir), "strategies": ",".join(report.strategies)},
        )
        return paths

    def write_timings(self, timings: TimingTable) -> Path:
        return self._write_csv("timings.csv", TIMING_FIELDS, timings.to_dicts())

    def write_summary(self, summary: SeedSummary) -> Path:
        return self._write_json("summary.json", summary.to_dict())

    def write_dataset_profile(self, dataset: Dataset) -> list[Path]:
        """写出每个行为者的事件数；数据集带活跃度轨迹时一并写出 ``activity.csv``。"""

        paths = [self.write_actor_counts(dataset)]
        if dataset.activity_trace is not None:
            paths.append(self.write_activity(dataset.activity_trace))
        return paths

    def write_actor_counts(self, dataset: Dataset) -> Path:
        train, test = dataset.actor_counts("train"), dataset.actor_counts("test")
        rows = (
            {"actor": actor, "train": int(a), "test": int(b), "total": int(a + b)}
            for actor, (a, b) in enumerate(zip(train, test))
        )
        return self._write_csv("actor_counts.csv", ACTOR_COUNT_FIELDS, rows)

    def write_activity(self, trace: np.ndarray) -> Path:
        """``trace`` 形状为 ``(s, n)``，按行为者分组、时间步升序写出。"""

        trace = np.asarray(trace, dtype=float)
        if trace.ndim != 2:
            raise InputValidationError(ErrorCode.BAD_REQUEST, "活跃度轨迹必须是二维数组", details={"shape": list(trace.shape)})
        rows = (
            {"step": step, "actor": actor, "activity": value}
            for actor in range(trace.shape[1])
            for step, value in enumerate(trace[:, actor].tolist())
        )
        return self._write_csv("activity.csv", ACTIVITY_FIELDS, rows)

    def write_text(self, name: str, text: str) -> Path:
        path = self._target(name)
        try:
            path.write_text(text, encoding="utf-8")
        except OSError as exc:
            raise StorageError("文件写入失败", details={"path": str(path), "error": str(exc)}) from exc
        return path

    # ---- 内部工具 ----

    @staticmethod
    def _k_accuracy_rows(report: EvaluationReport) -> Iterable[dict[str, Any]]:
        for name, strategy in report.strategies.items():
            for k, proportion in enumerate(strategy.cdf.tolist(), start=1):
                yield {"k": k, "proportion": proportion, "strategy": name}

    @staticmethod
    def _pr_rows(report: EvaluationReport) -> Iterable[dict[str, Any]]:
        for name, strategy in report.strategies.items():
            for point in strategy.curve:
                yield {
                    "theta": point.threshold,
                    "precision": point.precision,
                    "recall": point.recall,
                    "standard_recall": point.standard_recall,
                    "strategy": name,
                }

    def _target(self, name: str) -> Path:
        try:
            self._out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise StorageError("输出目录无法创建", details={"path": str(self._out_dir), "error": str(exc)}) from exc
        return self._out_dir / name

    def _write_json(self, name: str, payload: dict[str, Any]) -> Path:
        path = self._target(name)
        try:
            path.write_text(json.dumps(payload, ensure_ascii=False, indent=2), encoding="utf-8")
        except OSError as exc:
            raise StorageError("报告写入失败", details={"path": str(path), "error": str(exc)}) from exc
        return path

    def _write_csv(self, name: str, fields: Sequence[str], rows: Iterable[dict[str, Any]]) -> Path:
        path = self._target(name)
        try:
            with path.open("w", encoding="utf-8", newline="") as handle:
                writer = csv.DictWriter(handle, fieldnames=list(fields))
                writer.writeheader()
                writer.writerows(rows)
        except OSError as exc:
            raise StorageError("CSV 写入失败", details={"path": str(path), "error": str(exc)}) from exc
        return path


__all__ = [
    "ReportWriter",
    "K_ACCURACY_FIELDS",
    "PR_CURVE_FIELDS",
    "TIMING_FIELDS",
    "ACTOR_COUNT_FIELDS",
    "ACTIVITY_FIELDS",
]
