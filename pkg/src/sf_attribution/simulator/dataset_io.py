"""数据集的 JSON Lines 编解码。

文件首行为头部 ``{"meta": {...配置字段, "counts": {...}, "false_flags": n}}``，其后每行一个事件：

    {"id": 0, "t": 17, "split": "train", "actor": 3, "x": [0.12, -0.4], "ff": [false, false]}

字段顺序固定，相同数据集总是得到逐字节相同的文件。
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Iterator, Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from sf_attribution.attribution.types import Incident
from sf_attribution.common.exceptions import DatasetFormatError, InvalidIncident, StorageError
from sf_attribution.common.logging import LoggerFactory
from sf_attribution.simulator.config import SimConfig
from sf_attribution.simulator.generator import Dataset, is_train_step

_logger = LoggerFactory.create_default_logger(__name__)

_SEPARATORS = (",", ":")


class IncidentRecord(BaseModel):
    """单行事件记录。"""

    model_config = ConfigDict(extra="forbid")

    id: int = Field(ge=0)
    t: int = Field(ge=0)
    split: Literal["train", "test"]
    actor: int = Field(ge=0)
    x: list[float] = Field(min_length=1)
    ff: list[bool]


def _header(dataset: Dataset) -> dict[str, Any]:
    stats = dataset.meta
    meta = dataset.config.model_dump(mode="json")
    meta["counts"] = stats["counts"]
    meta["false_flags"] = stats["false_flags"]
    return {"meta": meta}


def _record(dataset: Dataset, incident: Incident) -> dict[str, Any]:
    mask = incident.false_flag_mask or (False,) * incident.m
    return {
        "id": incident.id,
        "t": incident.time_step,
        "split": dataset.split_of(incident),
        "actor": incident.label,
        "x": incident.features.tolist(),
        "ff": list(mask),
    }


def iter_lines(dataset: Dataset) -> Iterator[str]:
    yield json.dumps(_header(dataset), separators=_SEPARATORS)
    for incident in dataset.incidents:
        yield json.dumps(_record(dataset, incident), separators=_SEPARATORS)


def write_dataset(dataset: Dataset, path: str | Path) -> Path:
    """写出数据集文件。

    异常：
        StorageError：目标不可写。
    """

    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        with target.open("w", encoding="utf-8", newline="\n") as handle:
            for line in iter_lines(dataset):
                handle.write(line)
                handle.write("\n")
    except OSError as exc:
        raise StorageError("数据集写入失败", details={"path": str(target), "error": str(exc)}) from exc
    _logger.info("数据集已写出", extra={"path": str(target), "incidents": len(dataset.incidents)})
    return target


def read_dataset(path: str | Path) -> Dataset:
    """读取 :func:`write_dataset` 写出的文件。

    异常：
        StorageError：文件不存在或不可读。
        DatasetFormatError：头部缺失、行格式错误或与配置不一致。
    """

    source = Path(path)
    try:
        handle = source.open("r", encoding="utf-8")
    except FileNotFoundError as exc:
        raise StorageError("数据集文件不存在", details={"path": str(source)}) from exc
    except OSError as exc:
        raise StorageError("数据集文件读取失败", details={"path": str(source), "error": str(exc)}) from exc

    with handle:
        config = _read_header(handle.readline(), source)
        incidents = [
            _read_incident(line, lineno, config, source)
            for lineno, line in enumerate(handle, start=2)
            if line.strip()
        ]
    _logger.info("数据集已读取", extra={"path": str(source), "incidents": len(incidents)})
    return Dataset(config=config, incidents=tuple(incidents))


# ---- 内部工具 ----


def _read_header(line: str, source: Path) -> SimConfig:
    if not line.strip():
        raise DatasetFormatError("数据集文件为空", details={"path": str(source)})
    try:
        header = json.loads(line)
        meta = dict(header["meta"])
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise DatasetFormatError("数据集头部缺失或格式错误", details={"path": str(source), "line": 1}) from exc
    meta.pop("counts", None)
    meta.pop("false_flags", None)
    try:
        return SimConfig.model_validate(meta)
    except ValidationError as exc:
        raise DatasetFormatError(
            "数据集头部配置非法",
            details={"path": str(source), "errors": exc.errors(include_url=False)},
        ) from exc


def _read_incident(line: str, lineno: int, config: SimConfig, source: Path) -> Incident:
    try:
        record = IncidentRecord.model_validate_json(line)
    except ValidationError as exc:
        raise DatasetFormatError(
            "事件行格式错误",
            details={"path": str(source), "line": lineno, "errors": exc.errors(include_url=False)},
        ) from exc
    expected_split = "train" if is_train_step(record.t, config.s) else "test"
    if record.split != expected_split or len(record.x) != config.m or record.actor >= config.t:
        raise DatasetFormatError(
            "事件行与数据集配置不一致",
            details={"path": str(source), "line": lineno, "id": record.id},
        )
    try:
        return Incident(
            id=record.id,
            time_step=record.t,
            features=record.x,
            label=record.actor,
            false_flag_mask=tuple(record.ff),
        )
    except InvalidIncident as exc:
        raise DatasetFormatError(
            "事件行内容非法", details={"path": str(source), "line": lineno, **exc.details}
        ) from exc


__all__ = ["IncidentRecord", "write_dataset", "read_dataset", "iter_lines"]
