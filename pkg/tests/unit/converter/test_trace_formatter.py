from __future__ import annotations

"""TraceFormatter 单元测试。

覆盖内容：
- JSON 文档的键与配对层结构
- 文本视图的三层输出与 top-k 截断
- 矛盾配对在两种格式中的呈现
- 非法格式参数校验
"""

import json
import math

import pytest

from sf_attribution.attribution import pairing_aggregate
from sf_attribution.common.exceptions import ErrorCode, InputValidationError
from sf_attribution.converter import TraceFormatter
from sf_attribution.pmf import PMF

PAIRING_FINAL = (
    math.sqrt(0.54) / (math.sqrt(0.54) + math.sqrt(0.04))
    + 0.75
    + math.sqrt(0.30) / (math.sqrt(0.30) + math.sqrt(0.20))
) / 3


class TestTraceFormatter:
    def setup_method(self) -> None:
        """准备三模块的轨迹（三个输入 0.9/0.6/0.5 的配对聚合算例）与含矛盾配对的轨迹。"""

        self.formatter = TraceFormatter(top=2)
        self.trace = pairing_aggregate(
            [
                ("q1", PMF.from_sequence([0.9, 0.1])),
                ("q2", PMF.from_sequence([0.6, 0.4])),
                ("q3", PMF.from_sequence([0.5, 0.5])),
            ]
        )
        self.contradictory = pairing_aggregate(
            [
                ("a", PMF.from_sequence([1.0, 0.0])),
                ("b", PMF.from_sequence([0.0, 1.0])),
                ("c", PMF.from_sequence([0.5, 0.5])),
            ]
        )

    def test_json_document(self) -> None:
        """验证 JSON 文档的模块层、配对层与最终 PMF。"""

        document = json.loads(self.formatter.format_trace(self.trace, incident_id=7, label=0))

        assert document["incident"] == {"id": 7, "actor": 0}
        assert list(document["modules"]) == ["q1", "q2", "q3"]
        assert document["modules"]["q1"] == [0.9, 0.1]
        assert [(pair["a"], pair["b"]) for pair in document["pairs"]] == [("q1", "q2"), ("q1", "q3"), ("q2", "q3")]
        assert document["final"][0] == pytest.approx(PAIRING_FINAL, abs=1e-12)
        assert document["contradictory_pairs"] == []

    def test_json_without_incident_header(self) -> None:
        """验证未给事件编号时 JSON 文档不含事件头部。"""

        document = self.formatter.to_dict(self.trace)

        assert "incident" not in document
        assert set(document) == {"modules", "pairs", "contradictory_pairs", "final"}

    def test_text_view(self) -> None:
        """验证文本视图的事件头部与三层输出。"""

        text = self.formatter.format_trace(self.trace, format_type="text", incident_id=7, label=0)
        lines = text.splitlines()

        assert lines[0] == "incident 7 (actor 0)"
        assert "modules:" in lines and "pairs:" in lines and "final:" in lines
        assert any(line.strip().startswith("q1 x q2") for line in lines)
        assert "actor 0: 0.6955" in lines[-1]
        assert text.endswith("\n")

    def test_contradictory_pairs_are_listed(self) -> None:
        """验证矛盾配对在两种格式中都被列出。"""

        document = self.formatter.to_dict(self.contradictory)
        text = self.formatter.format_trace(self.contradictory, format_type="text")

        assert document["contradictory_pairs"] == [["a", "b"]]
        assert len(document["pairs"]) == 2
        assert "a x b" in text and "contradictory (excluded)" in text

    def test_single_module_has_no_pair_section(self) -> None:
        """验证单模块轨迹的文本视图没有配对段。"""

        trace = pairing_aggregate([("only", PMF.from_sequence([0.3, 0.7]))])
        text = self.formatter.format_trace(trace, format_type="text")

        assert "pairs:" not in text
        assert "actor 1: 0.7000" in text

    def test_invalid_format(self) -> None:
        """验证未知输出格式抛出 BAD_REQUEST。"""

        with pytest.raises(InputValidationError) as excinfo:
            self.formatter.format_trace(self.trace, format_type="yaml")  # type: ignore[arg-type]

        assert excinfo.value.code is ErrorCode.BAD_REQUEST
