"""解释轨迹的格式化。

支持两种输出：

- ``"json"``：``{"modules": {name: [p...]}, "pairs": [{"a", "b", "pmf"}], "contradictory_pairs": [...], "final": [p...]}``；
- ``"text"``：三层文本视图，每层列出概率最高的若干行为者，便于人工检查。
"""
from __future__ import annotations

import json
from typing import Any, Literal

from sf_attribution.attribution.types import AttributionTrace
from sf_attribution.common.exceptions import ErrorCode, InputValidationError
from sf_attribution.common.logging import LoggerFactory
from sf_attribution.pmf.pmf import PMF

TraceFormat = Literal["json", "text"]


class TraceFormatter:
    """把 :class:`AttributionTrace` 转成 JSON 文档或文本。

    无共享可变状态，可并发复用。
    """

    def __init__(self, *, top: int = 3) -> None:
        """参数：
            top：文本视图中每个 PMF 列出的行为者数量，例如 ``3``。
        """

        self._top = max(1, int(top))
        self._logger = LoggerFactory.create_default_logger(__name__)

    def to_dict(self, trace: AttributionTrace, *, incident_id: int | None = None, label: int | None = None) -> dict[str, Any]:
        document: dict[str, Any] = {}
        if incident_id is not None:
            document["incident"] = {"id": incident_id, "actor": label}
        document["modules"] = {name: pmf.to_list() for name, pmf in trace.module_outputs.items()}
        document["pairs"] = [{"a": a, "b": b, "pmf": pmf.to_list()} for (a, b), pmf in trace.pair_outputs.items()]
        document["contradictory_pairs"] = [[a, b] for a, b in trace.contradictory_pairs]
        document["final"] = trace.final.to_list()
        return document

    def format_trace(
        self,
        trace: AttributionTrace,
        *,
        format_type: TraceFormat = "json",
        incident_id: int | None = None,
        label: int | None = None,
    ) -> str:
        """格式化轨迹。

        参数：
            trace：解释轨迹。
            format_type：``"json"`` 或 ``"text"``。
            incident_id / label：可选的事件编号与真实行为者，写入输出头部。

        异常：
            InputValidationError：``format_type`` 不受支持。
        """

        if format_type == "json":
            return json.dumps(self.to_dict(trace, incident_id=incident_id, label=label), ensure_ascii=False, indent=2)
        if format_type == "text":
            return self._to_text(trace, incident_id=incident_id, label=label)
        raise InputValidationError(
            ErrorCode.BAD_REQUEST, "不支持的轨迹格式", details={"format": format_type, "supported": ["json", "text"]}
        )

    # ---- 内部工具 ----

    def _describe(self, pmf: PMF) -> str:
        return "  ".join(f"actor {actor}: {p:.4f}" for actor, p in pmf.top(self._top))

    def _to_text(self, trace: AttributionTrace, *, incident_id: int | None, label: int | None) -> str:
        lines: list[str] = []
        if incident_id is not None:
            lines.append(f"incident {incident_id} (actor {label})")
        lines.append("modules:")
        for name, pmf in trace.module_outputs.items():
            lines.append(f"  {name:<12} {self._describe(pmf)}")
        if trace.pair_outputs or trace.contradictory_pairs:
            lines.append("pairs:")
            for (a, b), pmf in trace.pair_outputs.items():
                lines.append(f"  {a + ' x ' + b:<12} {self._describe(pmf)}")
            for a, b in trace.contradictory_pairs:
                lines.append(f"  {a + ' x ' + b:<12} contradictory (excluded)")
        lines.append("final:")
        lines.append(f"  {'':<12} {self._describe(trace.final)}")
        return "\n".join(lines) + "\n"


__all__ = ["TraceFormatter", "TraceFormat"]
